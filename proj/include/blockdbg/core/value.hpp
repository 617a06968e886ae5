#pragma once

#include <string>
#include <string_view>
#include <variant>

namespace blockdbg {

// Dynamically typed runtime value with Scratch-style coercions.
// A stored number is never NaN: construction from NaN yields 0.
class Value {
 public:
  Value() : data_(0.0) {}
  Value(double n);  // NOLINT(google-explicit-constructor)
  Value(int n) : Value(static_cast<double>(n)) {}  // NOLINT
  Value(std::string s) : data_(std::move(s)) {}    // NOLINT
  Value(const char* s) : data_(std::string(s)) {}  // NOLINT
  Value(bool b) : data_(b) {}                      // NOLINT

  bool is_number() const { return std::holds_alternative<double>(data_); }
  bool is_text() const { return std::holds_alternative<std::string>(data_); }
  bool is_bool() const { return std::holds_alternative<bool>(data_); }

  double as_number_unchecked() const { return std::get<double>(data_); }
  const std::string& as_text_unchecked() const { return std::get<std::string>(data_); }
  bool as_bool_unchecked() const { return std::get<bool>(data_); }

  // Coercions. Non-numeric text becomes 0 in numeric context.
  double to_number() const;
  std::string to_string() const;
  bool to_bool() const;

  // True when the value would be treated as a number by comparisons
  // (numbers, and text that parses cleanly as one).
  bool looks_numeric() const;

  // Structural equality: same alternative and same payload.
  friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }

 private:
  std::variant<double, std::string, bool> data_;
};

// Number formatting used for `say` output and joins: integers print without
// a fractional part, infinities as "Infinity"/"-Infinity".
std::string format_number(double n);

// Parses text as a number. Leading/trailing whitespace is ignored; returns
// false when the text is empty or not a complete numeric literal.
bool parse_number(std::string_view text, double& out);

// Scratch ordering: numeric when both sides look numeric, otherwise a
// case-insensitive string comparison. Returns <0, 0, >0.
int compare_values(const Value& a, const Value& b);

}  // namespace blockdbg
