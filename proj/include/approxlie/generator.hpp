#pragma once

#include <map>
#include <string>
#include <vector>

#include "approxlie/series.hpp"

namespace approxlie {

inline constexpr int kDefaultJetDepth = 4;
inline constexpr int kMaxProlongation = 3;

// Approximate point generator. Slot xi[i][k] holds the order-k piece of the
// infinitesimal of the i-th independent variable as a function of x and the
// expansion values u_(0..k); eta[alpha][k] likewise for the alpha-th unknown.
class Generator {
 public:
  Generator(JetSpace space, int order);
  Generator(JetSpace space, int order, std::vector<std::vector<NormalForm>> xi,
            std::vector<std::vector<NormalForm>> eta);
  // Expands closed-form infinitesimals xi(x, u; eps), eta(x, u; eps).
  static Generator from_closed_form(const JetSpace& space, int order, const std::vector<NormalForm>& xi,
                                    const std::vector<NormalForm>& eta);

  const JetSpace& space() const { return space_; }
  int order() const { return order_; }
  const NormalForm& xi(std::size_t i, int k) const { return xi_[i][static_cast<std::size_t>(k)]; }
  const NormalForm& eta(std::size_t alpha, int k) const { return eta_[alpha][static_cast<std::size_t>(k)]; }
  NormalForm& xi(std::size_t i, int k) { return xi_[i][static_cast<std::size_t>(k)]; }
  NormalForm& eta(std::size_t alpha, int k) { return eta_[alpha][static_cast<std::size_t>(k)]; }
  EpsSeries xi_series(std::size_t i) const { return EpsSeries(xi_[i]); }
  EpsSeries eta_series(std::size_t alpha) const { return EpsSeries(eta_[alpha]); }
  bool is_zero() const;

  Generator operator+(const Generator& o) const;
  Generator operator-(const Generator& o) const;
  Generator scaled(const NormalForm& c) const;
  // eps times the generator, truncated at its order.
  Generator eps_multiple() const;
  // The order-0 pieces alone, as a generator of the given order.
  Generator zero_order() const;
  Generator with_order(int order) const;
  // Checks that slot k involves expansion values of order at most k only.
  void validate() const;

  // Action on a function of x and the expansion values, as an eps-series.
  EpsSeries apply(const NormalForm& f) const;
  EpsSeries apply(const EpsSeries& f) const;

  friend bool operator==(const Generator& a, const Generator& b) {
    return a.space_ == b.space_ && a.order_ == b.order_ && a.xi_ == b.xi_ && a.eta_ == b.eta_;
  }

 private:
  JetSpace space_;
  int order_;
  std::vector<std::vector<NormalForm>> xi_;
  std::vector<std::vector<NormalForm>> eta_;
};

std::string to_string(const Generator& g);

// Total derivative over the expanded jet space; jets of depth jetDepth may not
// be differentiated further.
NormalForm total_derivative(const NormalForm& e, AtomId v, int jetDepth = kDefaultJetDepth);
EpsSeries total_derivative(const EpsSeries& e, AtomId v, int jetDepth = kDefaultJetDepth);

// Prolongation coefficients indexed by (alpha, derivative counts per
// independent variable).
struct ProlongedGenerator {
  Generator base;
  int order = 0;
  std::map<std::pair<std::size_t, std::vector<int>>, EpsSeries> etaDeriv;

  const EpsSeries& coefficient(std::size_t alpha, const std::vector<int>& counts) const;
  // Xi^(r) applied to an expression in the unexpanded unknowns and their jets,
  // expanded and truncated.
  EpsSeries apply(const NormalForm& delta) const;
};

ProlongedGenerator prolong(const Generator& g, int r, int jetDepth = kDefaultJetDepth,
                           int maxOrder = kMaxProlongation);

// Prolongation coefficient reached by differentiating along `path` (indices of
// independent variables in the order applied).
EpsSeries prolong_along(const Generator& g, std::size_t alpha, const std::vector<std::size_t>& path,
                        int jetDepth = kDefaultJetDepth);

Generator commutator(const Generator& a, const Generator& b);

}  // namespace approxlie
