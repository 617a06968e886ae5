#include "blockdbg/core/value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace blockdbg {
namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Value::Value(double n) : data_(std::isnan(n) ? 0.0 : n) {}

bool parse_number(std::string_view text, double& out) {
  std::string_view t = trim(text);
  if (t.empty()) return false;
  std::string_view body = t;
  bool negative = false;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body == "Infinity") {
    out = negative ? -INFINITY : INFINITY;
    return true;
  }
  // from_chars would accept "inf"/"nan" and rejects a leading '+', so
  // only hand it an unsigned body that starts like a decimal literal.
  if (body.empty() || !(std::isdigit(static_cast<unsigned char>(body.front())) || body.front() == '.')) {
    return false;
  }
  double parsed = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), parsed,
                                   std::chars_format::general);
  if (ptr != body.data() + body.size()) return false;
  if (ec == std::errc::result_out_of_range) {
    parsed = std::strtod(std::string(body).c_str(), nullptr);
  } else if (ec != std::errc()) {
    return false;
  }
  out = negative ? -parsed : parsed;
  return true;
}

std::string format_number(double n) {
  if (std::isinf(n)) return n > 0 ? "Infinity" : "-Infinity";
  if (n == 0) return "0";
  if (std::trunc(n) == n && std::fabs(n) < 1e21) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), n, std::chars_format::fixed, 0);
    return std::string(buf, ptr);
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), n);
  return std::string(buf, ptr);
}

double Value::to_number() const {
  if (const auto* n = std::get_if<double>(&data_)) return *n;
  if (const auto* b = std::get_if<bool>(&data_)) return *b ? 1.0 : 0.0;
  double parsed = 0;
  const auto& s = std::get<std::string>(data_);
  if (trim(s).empty()) return 0.0;
  if (!parse_number(s, parsed) || std::isnan(parsed)) return 0.0;
  return parsed;
}

std::string Value::to_string() const {
  if (const auto* n = std::get_if<double>(&data_)) return format_number(*n);
  if (const auto* b = std::get_if<bool>(&data_)) return *b ? "true" : "false";
  return std::get<std::string>(data_);
}

bool Value::to_bool() const {
  if (const auto* b = std::get_if<bool>(&data_)) return *b;
  if (const auto* n = std::get_if<double>(&data_)) return *n != 0;
  const auto& s = std::get<std::string>(data_);
  if (s.empty() || s == "0") return false;
  return lower(s) != "false";
}

bool Value::looks_numeric() const {
  if (is_number() || is_bool()) return true;
  double ignored = 0;
  return parse_number(std::get<std::string>(data_), ignored);
}

int compare_values(const Value& a, const Value& b) {
  if (a.looks_numeric() && b.looks_numeric()) {
    double x = a.to_number();
    double y = b.to_number();
    if (x < y) return -1;
    if (x > y) return 1;
    return 0;
  }
  std::string x = lower(a.to_string());
  std::string y = lower(b.to_string());
  int c = x.compare(y);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace blockdbg
