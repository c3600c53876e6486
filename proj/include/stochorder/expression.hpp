#pragma once

#include <memory>
#include <string>

namespace stochorder::expr {

// Arithmetic over x with +, -, *, /, ^ (integer powers), exp(...) and
// parentheses, plus the free normalization constant `c` used by piecewise
// densities whose normalization is implicit. Parsed by recursive descent;
// there is no general function library.
class Expression {
 public:
  Expression();
  Expression(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(const Expression&);
  Expression& operator=(Expression&&) noexcept;
  ~Expression();

  double eval(double x, double c = 0.0) const;
  bool uses_constant() const;  // references `c` somewhere
  const std::string& source() const;

  struct Node;  // exposed for the parser implementation

 private:
  friend Expression parse(const std::string&);
  std::shared_ptr<const Node> root_;
  std::string source_;
  bool uses_c_ = false;
};

// Throws InputError with a 1-based column position on malformed input.
Expression parse(const std::string& text);

}  // namespace stochorder::expr
