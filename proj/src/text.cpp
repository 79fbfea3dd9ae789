#include "gpo/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "gpo/errors.hpp"

namespace gpo::text {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

long long parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "expected integer, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ParseError, "expected number, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::ParseError, "expected boolean, got '" + std::string(s) + "'");
}

std::vector<int> parse_int_list(std::string_view s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (auto f : split(s, ',')) out.push_back(static_cast<int>(parse_int(f)));
  return out;
}

std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (auto f : split(s, ',')) out.push_back(parse_double(f));
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string format_double17(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, p);
}

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace gpo::text
