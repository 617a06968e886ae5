#pragma once

#include <string>
#include <string_view>

#include "blockdbg/core/program.hpp"

namespace blockdbg {

// Parses the textual reporter grammar used for watch expressions:
//
//   expr     := or
//   or       := and ("or" and)*
//   and      := not ("and" not)*
//   not      := "not" not | compare
//   compare  := sum (("<" | ">" | "=" | "==") sum | "contains" sum)?
//   sum      := product (("+" | "-") product)*
//   product  := unary (("*" | "/" | "mod" | "%") unary)*
//   unary    := "-" unary | primary
//   primary  := number | "text" | true | false | name | "(" expr ")"
//             | "item" sum "of" name | "length" "of" name | "length" "(" expr ")"
//             | "letter" sum "of" unary | "join" "(" expr "," expr ")"
//             | "round" unary
//
// `l contains x` requires a bare list name on the left. Bare names become
// variable references; parameters resolve through the same lookup at
// evaluation time. Throws Error{kExpressionParse} with a column number.
Expr parse_expression(std::string_view text);

// Renders an expression back into the grammar above (fully parenthesized
// binary operators).
std::string format_expression(const Expr& expr);

}  // namespace blockdbg
