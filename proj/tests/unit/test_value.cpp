#include <doctest.h>

#include <cmath>

#include "blockdbg/core/value.hpp"

using namespace blockdbg;

TEST_CASE("numbers format without a trailing fraction when integral") {
  CHECK(format_number(6) == "6");
  CHECK(format_number(-3) == "-3");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e6) == "1000000");
  CHECK(format_number(INFINITY) == "Infinity");
  CHECK(format_number(-INFINITY) == "-Infinity");
}

TEST_CASE("NaN never survives construction") {
  Value v(std::nan(""));
  CHECK(v.is_number());
  CHECK(v.to_number() == 0);
}

TEST_CASE("parse_number accepts trimmed decimal literals only") {
  double out = 0;
  CHECK(parse_number(" 42 ", out));
  CHECK(out == 42);
  CHECK(parse_number("-1.5", out));
  CHECK(out == -1.5);
  CHECK(parse_number("+7", out));
  CHECK(out == 7);
  CHECK(parse_number(".25", out));
  CHECK(out == 0.25);
  CHECK(parse_number("-Infinity", out));
  CHECK(std::isinf(out));
  CHECK_FALSE(parse_number("", out));
  CHECK_FALSE(parse_number("12abc", out));
  CHECK_FALSE(parse_number("nan", out));
  CHECK_FALSE(parse_number("inf", out));
  CHECK_FALSE(parse_number("--1", out));
}

TEST_CASE("coercions") {
  CHECK(Value("3").to_number() == 3);
  CHECK(Value("apple").to_number() == 0);
  CHECK(Value("").to_number() == 0);
  CHECK(Value(true).to_number() == 1);
  CHECK(Value(2.5).to_string() == "2.5");
  CHECK(Value(false).to_string() == "false");
  CHECK(Value("false").to_bool() == false);
  CHECK(Value("0").to_bool() == false);
  CHECK(Value("").to_bool() == false);
  CHECK(Value("no").to_bool() == true);
  CHECK(Value(0).to_bool() == false);
}

TEST_CASE("compare_values is numeric only when both sides look numeric") {
  CHECK(compare_values(Value(10), Value("9")) > 0);
  CHECK(compare_values(Value("10"), Value("9")) > 0);
  CHECK(compare_values(Value("10"), Value("9a")) < 0);  // text: "1" < "9"
  CHECK(compare_values(Value("Apple"), Value("apple")) == 0);
  CHECK(compare_values(Value(1), Value(true)) == 0);
  CHECK(compare_values(Value(" 2 "), Value(2)) == 0);
}

TEST_CASE("structural equality distinguishes alternatives") {
  CHECK(Value(1) == Value(1.0));
  CHECK_FALSE(Value(1) == Value("1"));
  CHECK_FALSE(Value(true) == Value(1));
}
