#include "stochorder/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "stochorder/errors.hpp"

namespace stochorder::expr {

struct Expression::Node {
  enum class Op { Number, Var, Const, Add, Sub, Mul, Div, Pow, Exp, Neg };
  Op op;
  double value = 0.0;  // Number payload; Pow stores the integer exponent here
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr,
             double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->value = value;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

  bool uses_c = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("expression parse error at column " +
                     std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char ch) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+'))
        lhs = make(Node::Op::Add, lhs, term());
      else if (eat('-'))
        lhs = make(Node::Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*'))
        lhs = make(Node::Op::Mul, lhs, unary());
      else if (eat('/'))
        lhs = make(Node::Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Node::Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) {
      skip_ws();
      bool neg = false;
      if (eat('-')) neg = true;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      if (pos_ == start) fail("exponent must be an integer literal");
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' ||
                                  text_[pos_] == 'E'))
        fail("exponent must be an integer literal");
      long expn = std::strtol(text_.substr(start, pos_ - start).c_str(), nullptr, 10);
      if (neg) expn = -expn;
      return make(Node::Op::Pow, base, nullptr, static_cast<double>(expn));
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      char* end = nullptr;
      const double v = std::strtod(text_.c_str() + pos_, &end);
      if (end == text_.c_str() + pos_) fail("malformed number");
      pos_ = static_cast<std::size_t>(end - text_.c_str());
      return make(Node::Op::Number, nullptr, nullptr, v);
    }
    if (text_.compare(pos_, 3, "exp") == 0 &&
        (pos_ + 3 >= text_.size() ||
         !std::isalnum(static_cast<unsigned char>(text_[pos_ + 3])))) {
      pos_ += 3;
      if (!eat('(')) fail("expected '(' after exp");
      NodePtr inner = expression();
      if (!eat(')')) fail("expected ')'");
      return make(Node::Op::Exp, inner);
    }
    if (ch == 'x' && (pos_ + 1 >= text_.size() ||
                      !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      return make(Node::Op::Var);
    }
    if (ch == 'c' && (pos_ + 1 >= text_.size() ||
                      !std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      uses_c = true;
      return make(Node::Op::Const);
    }
    if (eat('(')) {
      NodePtr inner = expression();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + ch + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

double eval_node(const Node& n, double x, double c) {
  switch (n.op) {
    case Node::Op::Number: return n.value;
    case Node::Op::Var: return x;
    case Node::Op::Const: return c;
    case Node::Op::Add: return eval_node(*n.lhs, x, c) + eval_node(*n.rhs, x, c);
    case Node::Op::Sub: return eval_node(*n.lhs, x, c) - eval_node(*n.rhs, x, c);
    case Node::Op::Mul: return eval_node(*n.lhs, x, c) * eval_node(*n.rhs, x, c);
    case Node::Op::Div: return eval_node(*n.lhs, x, c) / eval_node(*n.rhs, x, c);
    case Node::Op::Exp: return std::exp(eval_node(*n.lhs, x, c));
    case Node::Op::Neg: return -eval_node(*n.lhs, x, c);
    case Node::Op::Pow: {
      const double base = eval_node(*n.lhs, x, c);
      long e = static_cast<long>(n.value);
      const bool invert = e < 0;
      unsigned long k = invert ? static_cast<unsigned long>(-e)
                               : static_cast<unsigned long>(e);
      double result = 1.0;
      double b = base;
      while (k > 0) {
        if (k & 1) result *= b;
        b *= b;
        k >>= 1;
      }
      return invert ? 1.0 / result : result;
    }
  }
  return 0.0;
}

}  // namespace

Expression::Expression() = default;
Expression::Expression(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(const Expression&) = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::~Expression() = default;

double Expression::eval(double x, double c) const {
  if (!root_) throw std::logic_error("eval on empty expression");
  return eval_node(*root_, x, c);
}

bool Expression::uses_constant() const { return uses_c_; }

const std::string& Expression::source() const { return source_; }

Expression parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.run();
  e.source_ = text;
  e.uses_c_ = p.uses_c;
  return e;
}

}  // namespace stochorder::expr
