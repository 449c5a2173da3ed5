#pragma once

#include <string>
#include <string_view>

namespace farm::text {

std::string trim(std::string_view s);

// Trims and collapses internal whitespace runs to single spaces.
std::string normalize_whitespace(std::string_view s);

// ASCII lowercase copy.
std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

// Case-insensitive find; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t pos = 0);

// Number of non-overlapping occurrences of needle.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Truncates to at most max_bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view s, std::size_t max_bytes);

}  // namespace farm::text
