#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace cylspec {

/// Immutable arithmetic expression over the cross-section variables
/// xi1..xip. Nodes are shared, so copies are cheap and evaluation is safe
/// from any number of threads.
class Expr {
public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

  struct Node {
    Kind kind;
    double value = 0.0;  // Constant
    int index = 0;       // Variable: 0-based xi index
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v);
  static Expr variable(int index);

  Kind kind() const noexcept { return node_->kind; }
  bool is_constant() const noexcept { return node_->kind == Kind::Constant; }
  double constant_value() const noexcept { return node_->value; }

  /// Evaluates at ξ. Throws CoefficientError on a zero denominator, a
  /// variable index outside `xi`, or a non-finite result.
  double evaluate(std::span<const double> xi) const;

  /// Highest variable index used plus one (0 for constant expressions).
  int arity() const;

  /// Fully parenthesised infix form that parse_expr reads back to an
  /// expression with identical evaluations.
  std::string to_string() const;

  // Builders with constant folding.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  const Node& node() const noexcept { return *node_; }

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, const Expr* a, const Expr* b);
  std::shared_ptr<const Node> node_;
};

/// Parses an infix expression: numbers, xi1..xi9, + - * / ^ (right
/// associative, binds tighter than unary minus), sin, cos, exp and
/// parentheses. `max_vars` bounds the admissible variable index.
Expr parse_expr(std::string_view src, int max_vars = 9);

/// Sum of coefficient * term, dropping exact-zero coefficients.
Expr linear_combination(std::span<const double> coefficients, std::span<const Expr> terms);

}  // namespace cylspec
