#include "blockdbg/core/expr_parser.hpp"

#include <cctype>
#include <vector>

#include "blockdbg/core/error.hpp"

namespace blockdbg {
namespace {

enum class Tok { kNumber, kText, kName, kSymbol, kEnd };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  std::size_t column = 1;
};

[[noreturn]] void fail(std::size_t column, const std::string& what) {
  throw Error(ErrorKind::kExpressionParse, "column " + std::to_string(column) + ": " + what);
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    std::size_t col = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t start = i;
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t save = i++;
        if (i < src.size() && (src[i] == '+' || src[i] == '-')) ++i;
        if (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        } else {
          i = save;
        }
      }
      std::string lexeme(src.substr(start, i - start));
      double value = 0;
      if (!parse_number(lexeme, value)) fail(col, "malformed number '" + lexeme + "'");
      out.push_back({Tok::kNumber, lexeme, value, col});
    } else if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < src.size()) {
        if (src[i] == '\\' && i + 1 < src.size()) {
          text.push_back(src[i + 1]);
          i += 2;
        } else if (src[i] == '"') {
          ++i;
          closed = true;
          break;
        } else {
          text.push_back(src[i++]);
        }
      }
      if (!closed) fail(col, "unterminated string");
      out.push_back({Tok::kText, text, 0, col});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        ++i;
      }
      out.push_back({Tok::kName, std::string(src.substr(start, i - start)), 0, col});
    } else if (c == '=' && i + 1 < src.size() && src[i + 1] == '=') {
      out.push_back({Tok::kSymbol, "==", 0, col});
      i += 2;
    } else if (std::string_view("()+-*/%<>=,").find(c) != std::string_view::npos) {
      out.push_back({Tok::kSymbol, std::string(1, c), 0, col});
      ++i;
    } else {
      fail(col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::kEnd, "", 0, src.size() + 1});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* kKeywords[] = {"or",     "and",    "not",   "contains", "mod",
                                    "item",   "of",     "length", "letter",  "join",
                                    "round",  "true",   "false"};
  for (const char* k : kKeywords) {
    if (s == k) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Expr parse() {
    Expr e = parse_or();
    if (peek().kind != Tok::kEnd) fail(peek().column, "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  bool at_word(const char* w) const { return peek().kind == Tok::kName && peek().text == w; }
  bool at_symbol(const char* s) const { return peek().kind == Tok::kSymbol && peek().text == s; }

  void expect_word(const char* w) {
    if (!at_word(w)) fail(peek().column, std::string("expected '") + w + "'");
    ++pos_;
  }
  void expect_symbol(const char* s) {
    if (!at_symbol(s)) fail(peek().column, std::string("expected '") + s + "'");
    ++pos_;
  }

  std::string expect_name() {
    if (peek().kind != Tok::kName || is_keyword(peek().text)) {
      fail(peek().column, "expected a name");
    }
    return next().text;
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (at_word("or")) {
      ++pos_;
      lhs = Expr::binary(ExprOp::kOr, std::move(lhs), parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (at_word("and")) {
      ++pos_;
      lhs = Expr::binary(ExprOp::kAnd, std::move(lhs), parse_not());
    }
    return lhs;
  }

  Expr parse_not() {
    if (at_word("not")) {
      ++pos_;
      return Expr{ExprOp::kNot, {}, {}, {parse_not()}};
    }
    return parse_compare();
  }

  Expr parse_compare() {
    std::size_t lhs_col = peek().column;
    Expr lhs = parse_sum();
    if (at_symbol("<") || at_symbol(">") || at_symbol("=") || at_symbol("==")) {
      std::string sym = next().text;
      ExprOp op = sym == "<" ? ExprOp::kLt : (sym == ">" ? ExprOp::kGt : ExprOp::kEq);
      return Expr::binary(op, std::move(lhs), parse_sum());
    }
    if (at_word("contains")) {
      ++pos_;
      if (lhs.op != ExprOp::kVar) fail(lhs_col, "'contains' needs a list name on its left");
      return Expr{ExprOp::kListContains, {}, lhs.name, {parse_sum()}};
    }
    return lhs;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (at_symbol("+") || at_symbol("-")) {
      ExprOp op = next().text == "+" ? ExprOp::kAdd : ExprOp::kSub;
      lhs = Expr::binary(op, std::move(lhs), parse_product());
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (at_symbol("*") || at_symbol("/") || at_symbol("%") || at_word("mod")) {
      std::string t = next().text;
      ExprOp op = t == "*" ? ExprOp::kMul : (t == "/" ? ExprOp::kDiv : ExprOp::kMod);
      lhs = Expr::binary(op, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (at_symbol("-")) {
      ++pos_;
      if (peek().kind == Tok::kNumber) return Expr::lit(-next().number);
      return Expr::binary(ExprOp::kSub, Expr::lit(0.0), parse_unary());
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        ++pos_;
        return Expr::lit(t.number);
      case Tok::kText:
        ++pos_;
        return Expr::lit(Value(t.text));
      case Tok::kEnd:
        fail(t.column, "unexpected end of expression");
      case Tok::kSymbol:
        if (t.text == "(") {
          ++pos_;
          Expr inner = parse_or();
          expect_symbol(")");
          return inner;
        }
        fail(t.column, "unexpected '" + t.text + "'");
      case Tok::kName:
        break;
    }
    if (at_word("true") || at_word("false")) return Expr::lit(Value(next().text == "true"));
    if (at_word("item")) {
      ++pos_;
      Expr index = parse_sum();
      expect_word("of");
      return Expr{ExprOp::kItem, {}, expect_name(), {std::move(index)}};
    }
    if (at_word("length")) {
      ++pos_;
      if (at_word("of")) {
        ++pos_;
        return Expr{ExprOp::kListLength, {}, expect_name(), {}};
      }
      expect_symbol("(");
      Expr inner = parse_or();
      expect_symbol(")");
      return Expr{ExprOp::kStringLength, {}, {}, {std::move(inner)}};
    }
    if (at_word("letter")) {
      ++pos_;
      Expr index = parse_sum();
      expect_word("of");
      return Expr::binary(ExprOp::kLetterOf, std::move(index), parse_unary());
    }
    if (at_word("join")) {
      ++pos_;
      expect_symbol("(");
      Expr a = parse_or();
      expect_symbol(",");
      Expr b = parse_or();
      expect_symbol(")");
      return Expr::binary(ExprOp::kJoin, std::move(a), std::move(b));
    }
    if (at_word("round")) {
      ++pos_;
      return Expr{ExprOp::kRound, {}, {}, {parse_unary()}};
    }
    return Expr::var(expect_name());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(tokenize(text)).parse(); }

std::string format_expression(const Expr& e) {
  auto arg = [&](std::size_t i) { return i < e.args.size() ? format_expression(e.args[i]) : "?"; };
  auto infix = [&](const char* op) { return "(" + arg(0) + " " + op + " " + arg(1) + ")"; };
  switch (e.op) {
    case ExprOp::kLiteral:
      if (e.literal.is_text()) return quote(e.literal.as_text_unchecked());
      return e.literal.to_string();
    case ExprOp::kVar:
    case ExprOp::kParam: return e.name;
    case ExprOp::kItem: return "item " + arg(0) + " of " + e.name;
    case ExprOp::kListLength: return "length of " + e.name;
    case ExprOp::kListContains: return "(" + e.name + " contains " + arg(0) + ")";
    case ExprOp::kStringLength: return "length(" + arg(0) + ")";
    case ExprOp::kLetterOf: return "letter " + arg(0) + " of " + arg(1);
    case ExprOp::kJoin: return "join(" + arg(0) + ", " + arg(1) + ")";
    case ExprOp::kAdd: return infix("+");
    case ExprOp::kSub: return infix("-");
    case ExprOp::kMul: return infix("*");
    case ExprOp::kDiv: return infix("/");
    case ExprOp::kMod: return infix("mod");
    case ExprOp::kRound: return "round " + arg(0);
    case ExprOp::kLt: return infix("<");
    case ExprOp::kGt: return infix(">");
    case ExprOp::kEq: return infix("=");
    case ExprOp::kAnd: return infix("and");
    case ExprOp::kOr: return infix("or");
    case ExprOp::kNot: return "(not " + arg(0) + ")";
  }
  return "?";
}

}  // namespace blockdbg
