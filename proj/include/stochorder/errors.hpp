#pragma once

#include <stdexcept>
#include <string>

namespace stochorder {

// Quadrature / limit estimation ran out of budget before meeting tolerance.
// Carries the best estimate so callers can degrade gracefully or report it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_(best_estimate) {}
  double best_estimate() const { return best_; }

 private:
  double best_;
};

// Malformed user input (spec files, expressions, CLI values).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency violation: two routes that are theorems of each other
// disagree (criterion vs oracle, survival-ratio vs hazard form, implication
// chain). Signals a numerics bug or tolerance misconfiguration, never a
// property of the input pair.
class DiagnosticError : public std::logic_error {
 public:
  explicit DiagnosticError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace stochorder
