#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "approxlie/poly.hpp"

namespace approxlie {

using FactorId = std::uint32_t;

// Registry of monic, content-free denominator polynomials.
class FactorRegistry {
 public:
  static FactorRegistry& instance();
  FactorId intern(const Poly& monic);
  std::optional<FactorId> find(const Poly& monic) const;
  const Poly& get(FactorId id) const { return factors_[id]; }
  std::size_t size() const;

 private:
  FactorRegistry() = default;
  mutable std::shared_mutex mutex_;
  StableArray<Poly> factors_;
  std::unordered_multimap<std::size_t, FactorId> byHash_;
};

// Canonical rational expression: Laurent polynomial numerator over a product of
// registered factors. Two equal expressions have identical normal forms up to
// the (rare) case of a registered factor that is itself reducible; the zero
// test is exact regardless.
class NormalForm {
 public:
  using Den = std::vector<std::pair<FactorId, int>>;  // sorted by id, exponents > 0

  NormalForm() = default;
  NormalForm(int c) : num_(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  NormalForm(const Rational& c) : num_(c) {}  // NOLINT(google-explicit-constructor)
  explicit NormalForm(Poly num) : num_(std::move(num)) {}
  NormalForm(Poly num, Den den);
  static NormalForm atom(AtomId a) { return NormalForm(Poly::atom(a)); }

  const Poly& numerator() const { return num_; }
  const Den& denominator() const { return den_; }
  Poly denominator_poly() const;
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }
  std::optional<Rational> constant_value() const;
  std::vector<AtomId> atoms() const;
  bool contains(AtomId a) const;
  bool depends_on(AtomId a) const;  // also looks inside transcendental arguments

  NormalForm operator-() const;
  friend NormalForm operator+(const NormalForm& a, const NormalForm& b);
  friend NormalForm operator-(const NormalForm& a, const NormalForm& b);
  friend NormalForm operator*(const NormalForm& a, const NormalForm& b);
  friend NormalForm operator/(const NormalForm& a, const NormalForm& b);
  NormalForm& operator+=(const NormalForm& o) { return *this = *this + o; }
  NormalForm& operator-=(const NormalForm& o) { return *this = *this - o; }
  NormalForm& operator*=(const NormalForm& o) { return *this = *this * o; }
  NormalForm inverse() const;
  NormalForm pow(int n) const;

  friend bool operator==(const NormalForm& a, const NormalForm& b) {
    return a.den_ == b.den_ && a.num_ == b.num_;
  }
  friend bool operator!=(const NormalForm& a, const NormalForm& b) { return !(a == b); }

 private:
  void cancel();
  Poly num_;
  Den den_;
};

// Canonical application of a transcendental function.
NormalForm apply_function(Transcendental fn, const NormalForm& arg);

// A derivation determined by a rule on atoms. The rule returns true when it
// handled the atom (leaving `out` zero for a vanishing image); unhandled
// transcendental atoms are differentiated by the chain rule, other unhandled
// atoms map to zero.
class Derivation {
 public:
  using Rule = std::function<bool(AtomId, const AtomInfo&, NormalForm& out)>;
  explicit Derivation(Rule rule) : rule_(std::move(rule)) {}

  NormalForm operator()(const NormalForm& f);
  NormalForm of_poly(const Poly& p);
  // Image of a single atom (memoized); nullopt when zero.
  const std::optional<NormalForm>& of_atom(AtomId a);

 private:
  Rule rule_;
  std::unordered_map<AtomId, std::optional<NormalForm>> memo_;
};

// Total derivative: jets of functions depending on `v` gain one more index.
NormalForm diff(const NormalForm& f, AtomId v);
// Partial derivative treating every other atom (including jets) as independent.
NormalForm partial_atom(const NormalForm& f, AtomId a);
// Partial derivative in an independent variable where jets of dependent
// unknowns (Dependent and Expanded roles) are held fixed but auxiliary
// functions still vary with the variable.
NormalForm explicit_partial(const NormalForm& f, AtomId v);
// Jet obtained by adding `extra` to the index of a jet atom.
AtomId jet_shift(AtomId jetAtom, const std::vector<int>& extra);
// Position of independent `v` among the arguments of a jet's function, or -1.
int argument_position(const AtomInfo& jet, AtomId v);

using SubstitutionMap = std::unordered_map<AtomId, NormalForm>;
// Simultaneous single-pass substitution.
NormalForm substitute(const NormalForm& f, const SubstitutionMap& rules);

// Coefficients of `f` viewed as a polynomial in `indeterminates`, in graded
// lexicographic display order.
std::vector<std::pair<Monomial, NormalForm>> collect(const NormalForm& f,
                                                     const std::vector<AtomId>& indeterminates);

// Canonical text of a normal form (round-trips through the parser).
std::string to_string(const NormalForm& f);
std::string to_string(const Monomial& m);

}  // namespace approxlie
