#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gpo::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Strict parsers: the whole (trimmed) field must be consumed. Throw ParseError.
long long parse_int(std::string_view s);
double parse_double(std::string_view s);
bool parse_bool(std::string_view s);
std::vector<int> parse_int_list(std::string_view s);
std::vector<double> parse_double_list(std::string_view s);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
/// 17 significant digits; round-trips bit-exactly through parse_double.
std::string format_double17(double x);

std::string join_ints(const std::vector<int>& v, char sep = ',');

}  // namespace gpo::text
