#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bms::text {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Whole-string parse; a leading '+' is accepted.
bool try_parse_double(std::string_view s, double& v);

/// Throws ParseError carrying `line` when `s` is not a number.
double parse_double(std::string_view s, std::size_t line);

/// Comma-separated cells with surrounding blanks trimmed. No quoting.
std::vector<std::string> split_csv(std::string_view line);

}  // namespace bms::text
