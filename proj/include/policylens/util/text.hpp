#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace policylens::text {

bool is_space(char c) noexcept;

std::string_view trim(std::string_view s) noexcept;

/// Collapses every run of ASCII whitespace into a single space. Leading and
/// trailing runs are kept as one space each.
std::string collapse_whitespace(std::string_view s);

std::string to_lower_ascii(std::string_view s);

/// Splits on ASCII whitespace; empty tokens are never produced.
std::vector<std::string_view> split_whitespace(std::string_view s);

std::size_t word_count(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

/// Replaces invalid UTF-8 sequences with U+FFFD.
std::string sanitize_utf8(std::string_view s);

/// Longest prefix holding at most max_chars code points (input assumed valid UTF-8).
std::string_view utf8_prefix(std::string_view s, std::size_t max_chars);

void append_utf8(std::string& out, char32_t cp);

}  // namespace policylens::text
