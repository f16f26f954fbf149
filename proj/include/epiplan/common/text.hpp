#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace epiplan::text {

// Trim, collapse internal whitespace runs to one space, ASCII case-fold.
std::string canonical(std::string_view s);

std::string trim(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

// Finds `needle` in `haystack` at word boundaries, starting from `from`.
// Returns std::string::npos when absent.
std::size_t find_word(std::string_view haystack, std::string_view needle, std::size_t from = 0);

}  // namespace epiplan::text
