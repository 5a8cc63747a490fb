#pragma once

#include <string>
#include <string_view>

#include "policylens/html/dom.hpp"

namespace policylens::html {

/// Tolerant HTML parser. Never fails: unclosed elements are closed at end of
/// input, stray end tags are ignored, and the usual implied end tags
/// (p, li, dt/dd, tr, td/th, headings) are inserted. Input that is not valid
/// UTF-8 is decoded as Windows-1252. Returns a Document node.
Node parse(std::string_view bytes);

/// Decodes character references in s (named subset plus numeric).
std::string decode_entities(std::string_view s);

/// UTF-8 passthrough (BOM stripped); otherwise Windows-1252 to UTF-8.
std::string decode_to_utf8(std::string_view bytes);

}  // namespace policylens::html
