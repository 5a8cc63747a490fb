#pragma once

#include <cstddef>
#include <string_view>

#include "policylens/html/dom.hpp"

namespace policylens::preprocess {

/// Removes boilerplate nodes in place: blocked tags (head, header, footer, nav,
/// aside, script, style, noscript, iframe, form, button) and elements whose
/// id/class contains nav, menu, footer, header, sidebar, cookie-banner or
/// breadcrumb. html, body, main and article, and elements whose id/class also
/// names content, policy or privacy, are exempt from the attribute rule.
void remove_boilerplate(html::Node& root);

/// Score used to rank candidate containers: main=3, article=2, plus 2 when
/// id/class contains "content", "policy" or "privacy".
int container_score(const html::Node& element);

/// Parses html, strips boilerplate and returns the highest-scoring element
/// with at least min_words visible words (ties: longest visible text).
/// Throws Error(InvalidDocument) when no element qualifies.
html::Node isolate_main_content(std::string_view html_bytes, std::size_t min_words = 50);

}  // namespace policylens::preprocess
