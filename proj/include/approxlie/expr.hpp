#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "approxlie/normal_form.hpp"

namespace approxlie {

// Immutable expression tree. Smart constructors flatten nested sums and
// products and fold constants, nothing more.
class Expr {
 public:
  enum class Kind : std::uint8_t { Constant, Symbol, Call, Sum, Product, Power };

  Expr();
  Expr(int c);               // NOLINT(google-explicit-constructor)
  Expr(const Rational& c);   // NOLINT(google-explicit-constructor)

  static Expr symbol(AtomId a);
  static Expr call(Transcendental fn, const Expr& arg);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr power(const Expr& base, int exponent);

  Kind kind() const;
  const Rational& value() const;
  AtomId atom() const;
  Transcendental function() const;
  std::span<const Expr> operands() const;
  int exponent() const;
  bool is_constant(const Rational& c) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);

Expr parse(std::string_view text);
std::string to_string(const Expr& e);

Expr diff(const Expr& e, AtomId v);
// Simultaneous substitution; with `fixpoint` the rules are reapplied until no
// rule symbol remains.
Expr substitute(const Expr& e, const std::vector<std::pair<AtomId, Expr>>& rules, bool fixpoint = false);

NormalForm normalize(const Expr& e);
Expr to_expr(const NormalForm& f);

// Parse straight to a normal form.
inline NormalForm nf(std::string_view text) { return normalize(parse(text)); }

using Bindings = std::unordered_map<AtomId, double>;
double eval(const Expr& e, const Bindings& bindings);

}  // namespace approxlie
