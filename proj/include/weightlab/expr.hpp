#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace weightlab {

// Arithmetic in one variable n: numbers, n, + - * / ^, unary minus, parentheses,
// and the functions log, exp, sqrt. Throws Error(ParseError).
class SequenceExpr {
 public:
  struct Node;

  static SequenceExpr parse(std::string_view text);
  double operator()(double n) const;
  const std::string& text() const { return text_; }
  bool uses_n() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

// Constant expression, e.g. "1/2" or "2.5".
double parse_number_expr(std::string_view text);

}  // namespace weightlab
