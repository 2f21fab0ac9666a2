#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "approxlie/expr.hpp"
#include "approxlie/solutions.hpp"

namespace approxlie {

using Quad = boost::multiprecision::cpp_bin_float_quad;

enum class Precision { Double, Quad };

// Flat postfix program evaluated in canonical print order.
template <class T>
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const NormalForm& f);

  const std::vector<AtomId>& variables() const { return vars_; }
  // Values in the order of variables().
  T operator()(std::span<const T> values) const;
  T operator()(const std::unordered_map<AtomId, T>& bindings) const;

 private:
  enum class OpKind : std::uint8_t { Const, Var, Call, Sum, Product, Power };
  struct Op {
    OpKind kind;
    int arg;
    Transcendental fn;
  };
  void emit(const Expr& e, std::unordered_map<AtomId, int>& slots);

  std::vector<Op> ops_;
  std::vector<T> consts_;
  std::vector<AtomId> vars_;
};

extern template class CompiledExpr<double>;
extern template class CompiledExpr<Quad>;

// |central difference of e along v - eval(diff(e, v))| / max(1, |eval(diff(e, v))|).
double fd_check(const NormalForm& e, AtomId v, const Bindings& point, double h = 1e-5);

struct SamplePlan {
  double xMin = -2, xMax = 2, yMin = -2, yMax = 2;
  int count = 64;
  std::uint64_t seed = 42;
};

SamplePlan default_plan(FamilyId id);
// Throws ConfigError when the box meets the family's singular locus.
void validate_plan(const SamplePlan& plan, const SolutionFamily& fam);
std::vector<std::pair<double, double>> sample_points(const SamplePlan& plan);

// Default numeric parameter values in a fixed order.
std::vector<std::pair<std::string, Rational>> default_parameters();
SubstitutionMap parameter_substitution(const std::vector<std::pair<std::string, Rational>>& values);
// Applies `values` to a family and to the model system.
PdeSystem bind_system(const PdeSystem& sys, const SubstitutionMap& values);
// The family with the first-order parts dropped.
SolutionFamily zero_order_truncation(const SolutionFamily& fam);

struct SweepResult {
  std::vector<double> epsValues;
  std::vector<double> residualNorms;
  std::vector<std::array<double, 3>> perEquation;
  double slope = 0;
  bool exact = false;
  int usedPoints = 0;
};

// Max |residual| over samples and equations of the full system evaluated on
// u_(0) + eps u_(1) for each eps, and the least-squares slope of
// log norm against log eps.
SweepResult eps_sweep(const SolutionFamily& fam, const PdeSystem& sys, const std::vector<double>& epsList,
                      const SamplePlan& plan, Precision precision = Precision::Double);

// Largest ratio |value| / (sum of |term values|) of the eps^0 and eps^1
// residual coefficients over the samples, evaluated term by term without
// symbolic cancellation.
double magnitude_ratio(const SolutionFamily& fam, const PdeSystem& sys, const SamplePlan& plan);

// Largest fd_check error over the derivative symbols of order 1..3 of the
// three fields, each compared against the central difference of its parent.
double family_fd_error(const SolutionFamily& fam, const SamplePlan& plan, double h = 1e-5);

// Worker count from APPROXLIE_THREADS (default: hardware concurrency).
unsigned worker_count();
// Runs f(i) for i in [0, n) on worker_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace approxlie
