#include "weightlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "weightlab/error.hpp"

namespace weightlab {

struct SequenceExpr::Node {
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Log, Exp, Sqrt } op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double n) const {
    switch (op) {
      case Op::Num: return value;
      case Op::Var: return n;
      case Op::Add: return lhs->eval(n) + rhs->eval(n);
      case Op::Sub: return lhs->eval(n) - rhs->eval(n);
      case Op::Mul: return lhs->eval(n) * rhs->eval(n);
      case Op::Div: return lhs->eval(n) / rhs->eval(n);
      case Op::Pow: return std::pow(lhs->eval(n), rhs->eval(n));
      case Op::Neg: return -lhs->eval(n);
      case Op::Log: return std::log(lhs->eval(n));
      case Op::Exp: return std::exp(lhs->eval(n));
      case Op::Sqrt: return std::sqrt(lhs->eval(n));
    }
    return 0.0;
  }
  bool has_var() const {
    if (op == Op::Var) return true;
    return (lhs && lhs->has_var()) || (rhs && rhs->has_var());
  }
};

namespace {

using Node = SequenceExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
  auto node = std::make_shared<Node>();
  node->op = op;
  node->lhs = std::move(l);
  node->rhs = std::move(r);
  node->value = v;
  return node;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError,
                "expression '" + std::string(s_) + "' at column " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Node::Op::Sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Node::Op::Div, lhs, unary());
      else return lhs;
    }
  }
  // Unary minus binds looser than ^, so -n^2 = -(n^2) while 3^-n = 3^(-n).
  NodePtr unary() {
    if (accept('-')) return make(Node::Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Node::Op::Pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string buf(s_.substr(pos_));
      char* end = nullptr;
      double v = std::strtod(buf.c_str(), &end);
      if (end == buf.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - buf.c_str());
      return make(Node::Op::Num, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (name == "n") return make(Node::Op::Var);
      if (name == "e") return make(Node::Op::Num, nullptr, nullptr, std::exp(1.0));
      Node::Op op;
      if (name == "log") op = Node::Op::Log;
      else if (name == "exp") op = Node::Op::Exp;
      else if (name == "sqrt") op = Node::Op::Sqrt;
      else fail("unknown name '" + name + "'");
      if (!accept('(')) fail("expected '(' after " + name);
      auto arg = expr();
      if (!accept(')')) fail("missing ')'");
      return make(op, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

SequenceExpr SequenceExpr::parse(std::string_view text) {
  SequenceExpr e;
  e.root_ = Parser(text).parse();
  e.text_ = std::string(text);
  return e;
}

double SequenceExpr::operator()(double n) const { return root_->eval(n); }

bool SequenceExpr::uses_n() const { return root_->has_var(); }

double parse_number_expr(std::string_view text) {
  auto e = SequenceExpr::parse(text);
  if (e.uses_n()) throw Error(ErrorCode::ParseError, "parameter '" + std::string(text) + "' must not use n");
  double v = e(0.0);
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "parameter '" + std::string(text) + "' is not finite");
  return v;
}

}  // namespace weightlab
