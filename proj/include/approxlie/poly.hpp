#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <gmpxx.h>

#include "approxlie/symbols.hpp"

namespace approxlie {

using Rational = mpq_class;

// Laurent monomial: atom exponents may be negative.
class Monomial {
 public:
  using Factor = std::pair<AtomId, std::int32_t>;
  using Factors = boost::container::small_vector<Factor, 4>;

  Monomial() = default;
  static Monomial atom(AtomId a, std::int32_t e = 1);
  static Monomial from_factors(Factors factors);

  const Factors& factors() const { return factors_; }
  std::int32_t degree() const { return degree_; }
  bool is_one() const { return factors_.empty(); }
  std::int32_t exponent(AtomId a) const;
  bool has_negative() const;

  Monomial operator*(const Monomial& o) const;
  Monomial inverse() const;
  Monomial pow(std::int32_t n) const;
  // Monomial with atom `a` removed.
  Monomial without(AtomId a) const;
  // True when every exponent of `o` is <= the matching exponent here.
  bool divisible_by(const Monomial& o) const;
  // Componentwise minimum with `o` (absent atoms count as exponent 0).
  Monomial min_with(const Monomial& o) const;

  std::size_t hash() const { return hash_; }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.hash_ == b.hash_ && a.factors_ == b.factors_;
  }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

 private:
  void finish();
  Factors factors_;
  std::int32_t degree_ = 0;
  std::size_t hash_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

// Graded lexicographic order by atom registration id: -1, 0, 1.
int compare_internal(const Monomial& a, const Monomial& b);
// Graded lexicographic order by the atoms' display keys.
int compare_display(const Monomial& a, const Monomial& b);

class Poly {
 public:
  using Term = std::pair<Monomial, Rational>;

  Poly() = default;
  explicit Poly(const Rational& c);
  static Poly monomial(const Monomial& m, const Rational& c = 1);
  static Poly atom(AtomId a) { return monomial(Monomial::atom(a)); }
  // Takes terms in any order; sums duplicates and drops zeros.
  static Poly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<Rational> constant_value() const;
  std::size_t size() const { return terms_.size(); }
  const Term& leading() const { return terms_.front(); }
  const Term& trailing() const { return terms_.back(); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& c) const;
  Poly shifted(const Monomial& m) const;
  Poly pow(unsigned n) const;

  Monomial min_exponents() const;
  std::vector<AtomId> atoms() const;
  bool contains(AtomId a) const;
  Poly partial(AtomId a) const;
  // Exact division; both operands are shifted to ordinary polynomials first.
  std::optional<Poly> divide_exact(const Poly& q) const;

  std::size_t hash() const;
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

 private:
  std::vector<Term> terms_;  // strictly decreasing in the internal order
};

// Hash-based term accumulator; `finish` applies the sin^2 = 1 - cos^2 rewrite.
class PolyAccumulator {
 public:
  void add(const Monomial& m, const Rational& c);
  void add(const Poly& p, const Rational& scale = 1);
  void add_product(const Poly& p, const Monomial& m, const Rational& c);
  Poly finish();
  bool empty() const { return map_.empty(); }

 private:
  std::unordered_map<Monomial, Rational, MonomialHash> map_;
};

// Rewrites every sin(a)^k with k >= 2 via sin^2 = 1 - cos^2.
Poly reduce_trig(const Poly& p);

}  // namespace approxlie
