#include "cylspec/expr.hpp"

#include "cylspec/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace cylspec {

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->index = index;
  return Expr(std::move(n));
}

namespace {

double apply(Expr::Kind k, double a, double b) {
  switch (k) {
    case Expr::Kind::Add: return a + b;
    case Expr::Kind::Sub: return a - b;
    case Expr::Kind::Mul: return a * b;
    case Expr::Kind::Div: return a / b;
    case Expr::Kind::Pow: return std::pow(a, b);
    case Expr::Kind::Neg: return -a;
    case Expr::Kind::Sin: return std::sin(a);
    case Expr::Kind::Cos: return std::cos(a);
    case Expr::Kind::Exp: return std::exp(a);
    default: return 0.0;
  }
}

double eval_node(const Expr::Node& n, std::span<const double> xi) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Constant: return n.value;
    case K::Variable:
      if (n.index < 0 || static_cast<std::size_t>(n.index) >= xi.size())
        throw CoefficientError("variable xi" + std::to_string(n.index + 1) + " not defined for p = " +
                               std::to_string(xi.size()));
      return xi[n.index];
    case K::Neg:
    case K::Sin:
    case K::Cos:
    case K::Exp: return apply(n.kind, eval_node(*n.lhs, xi), 0.0);
    case K::Div: {
      const double num = eval_node(*n.lhs, xi);
      const double den = eval_node(*n.rhs, xi);
      if (den == 0.0) throw CoefficientError("division by zero in coefficient expression");
      return num / den;
    }
    default: return apply(n.kind, eval_node(*n.lhs, xi), eval_node(*n.rhs, xi));
  }
}

int arity_node(const Expr::Node& n) {
  if (n.kind == Expr::Kind::Variable) return n.index + 1;
  int a = 0;
  if (n.lhs) a = std::max(a, arity_node(*n.lhs));
  if (n.rhs) a = std::max(a, arity_node(*n.rhs));
  return a;
}

std::string format_constant(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0.0 || s[0] == '-') return "(" + s + ")";
  return s;
}

std::string print_node(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Constant: return format_constant(n.value);
    case K::Variable: return "xi" + std::to_string(n.index + 1);
    case K::Neg: return "(-" + print_node(*n.lhs) + ")";
    case K::Sin: return "sin(" + print_node(*n.lhs) + ")";
    case K::Cos: return "cos(" + print_node(*n.lhs) + ")";
    case K::Exp: return "exp(" + print_node(*n.lhs) + ")";
    default: break;
  }
  const char* op = n.kind == K::Add ? "+" : n.kind == K::Sub ? "-" : n.kind == K::Mul ? "*" : n.kind == K::Div ? "/" : "^";
  return "(" + print_node(*n.lhs) + op + print_node(*n.rhs) + ")";
}

}  // namespace

Expr Expr::make(Kind k, const Expr* a, const Expr* b) {
  if (a->is_constant() && (!b || b->is_constant())) {
    const double bv = b ? b->constant_value() : 0.0;
    const double r = apply(k, a->constant_value(), bv);
    if (std::isfinite(r) && !(k == Kind::Div && bv == 0.0)) return constant(r);
  }
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = a->node_;
  if (b) n->rhs = b->node_;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && a.constant_value() == 0.0) return b;
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  return Expr::make(Expr::Kind::Add, &a, &b);
}
Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  return Expr::make(Expr::Kind::Sub, &a, &b);
}
Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return Expr::make(Expr::Kind::Mul, &a, &b);
}
Expr operator/(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Div, &a, &b); }
Expr operator-(const Expr& a) { return Expr::make(Expr::Kind::Neg, &a, nullptr); }
Expr pow(const Expr& a, const Expr& b) { return Expr::make(Expr::Kind::Pow, &a, &b); }
Expr sin(const Expr& a) { return Expr::make(Expr::Kind::Sin, &a, nullptr); }
Expr cos(const Expr& a) { return Expr::make(Expr::Kind::Cos, &a, nullptr); }
Expr exp(const Expr& a) { return Expr::make(Expr::Kind::Exp, &a, nullptr); }

double Expr::evaluate(std::span<const double> xi) const {
  const double v = eval_node(*node_, xi);
  if (!std::isfinite(v)) throw CoefficientError("coefficient expression evaluated to a non-finite value");
  return v;
}

int Expr::arity() const { return arity_node(*node_); }

std::string Expr::to_string() const { return print_node(*node_); }

Expr linear_combination(std::span<const double> coefficients, std::span<const Expr> terms) {
  Expr sum = Expr::constant(0.0);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (coefficients[i] == 0.0) continue;
    sum = sum + Expr::constant(coefficients[i]) * terms[i];
  }
  return sum;
}

namespace {

class Parser {
public:
  Parser(std::string_view src, int max_vars) : src_(src), max_vars_(max_vars) {}

  Expr parse() {
    Expr e = expression();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("syntax error: unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) throw ParseError(std::string("syntax error: expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("syntax error: expected '") + c + "'", pos_);
    }
  }

  Expr expression() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = lhs * unary();
      else if (accept('/')) lhs = lhs / unary();
      else return lhs;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("syntax error: unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("syntax error: unexpected '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc() || ptr == src_.data() + pos_) throw ParseError("syntax error: malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string name(src_.substr(start, pos_ - start));

    if (name == "sin" || name == "cos" || name == "exp") {
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '(')
        throw ParseError("arity mismatch: " + name + " takes exactly 1 argument", pos_);
      ++pos_;
      Expr arg = expression();
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ',')
        throw ParseError("arity mismatch: " + name + " takes exactly 1 argument", pos_);
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      return exp(arg);
    }
    if (name.size() > 2 && name.compare(0, 2, "xi") == 0) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 2, name.data() + name.size(), idx);
      if (ec == std::errc() && ptr == name.data() + name.size() && idx >= 1 && idx <= max_vars_) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(')
          throw ParseError("arity mismatch: variable " + name + " is not a function", pos_);
        return Expr::variable(idx - 1);
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view src_;
  int max_vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view src, int max_vars) { return Parser(src, max_vars).parse(); }

}  // namespace cylspec
