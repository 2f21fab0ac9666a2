#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "approxlie/normal_form.hpp"

namespace approxlie {

// Independent variables and unexpanded dependent unknowns, together with the
// per-order expansion symbols u_k of each unknown.
class JetSpace {
 public:
  JetSpace(std::vector<AtomId> independents, std::vector<FunctionId> dependents);
  // x, y with unknowns u, v, p.
  static JetSpace plane_flow();

  const std::vector<AtomId>& independents() const { return independents_; }
  const std::vector<FunctionId>& dependents() const { return dependents_; }
  std::size_t n() const { return independents_.size(); }
  std::size_t m() const { return dependents_.size(); }

  FunctionId expanded(std::size_t alpha, int k) const;
  AtomId expanded_jet(std::size_t alpha, int k, const std::vector<int>& index) const;
  AtomId expanded_value(std::size_t alpha, int k) const;
  AtomId dependent_jet(std::size_t alpha, const std::vector<int>& index) const;
  // (alpha, order) for an expansion symbol, (alpha, -1) for an unexpanded unknown.
  std::optional<std::pair<std::size_t, int>> classify(FunctionId f) const;
  int independent_position(AtomId v) const;

  friend bool operator==(const JetSpace& a, const JetSpace& b) {
    return a.independents_ == b.independents_ && a.dependents_ == b.dependents_;
  }

 private:
  std::vector<AtomId> independents_;
  std::vector<FunctionId> dependents_;
};

// Truncated power series in eps with coefficients free of eps.
class EpsSeries {
 public:
  explicit EpsSeries(int order = 0) : coeffs_(static_cast<std::size_t>(order) + 1) {}
  explicit EpsSeries(std::vector<NormalForm> coeffs);
  static EpsSeries constant(const NormalForm& c, int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const NormalForm& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  NormalForm& operator[](int k) { return coeffs_[static_cast<std::size_t>(k)]; }
  const std::vector<NormalForm>& coeffs() const { return coeffs_; }
  bool is_zero() const;

  EpsSeries operator+(const EpsSeries& o) const;
  EpsSeries operator-(const EpsSeries& o) const;
  EpsSeries operator-() const;
  EpsSeries operator*(const EpsSeries& o) const;
  EpsSeries& operator+=(const EpsSeries& o) { return *this = *this + o; }
  EpsSeries scaled(const NormalForm& c) const;
  // Multiplies by eps^j and truncates.
  EpsSeries shifted(int j) const;
  EpsSeries map(const std::function<NormalForm(const NormalForm&)>& f) const;
  NormalForm to_normal_form(AtomId eps) const;
  friend bool operator==(const EpsSeries& a, const EpsSeries& b) { return a.coeffs_ == b.coeffs_; }

 private:
  std::vector<NormalForm> coeffs_;
};

std::string to_string(const EpsSeries& s);

// Collects powers of eps in an expression polynomial in eps.
EpsSeries to_series(const NormalForm& f, int order, AtomId eps);
EpsSeries to_series(const NormalForm& f, int order);

// Replaces every unexpanded unknown (and its jets) by its eps-expansion.
EpsSeries expand_dependent(const NormalForm& e, const JetSpace& space, int order);

// Order-k coefficient function `stem` differentiated by tau with respect to the
// order-0 unknowns; used with the recursion operator.
AtomId coefficient_function(const std::string& stem, int k, const std::vector<int>& tau, const JetSpace& space);

// Recursion operator on polynomials in coefficient functions and expansion symbols.
NormalForm recursion_R(const NormalForm& f, const JetSpace& space, int maxOrder);

}  // namespace approxlie
