#include "approxlie/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

#include "approxlie/errors.hpp"

namespace approxlie {

namespace {

template <class T>
T from_rational(const Rational& r) {
  if constexpr (std::is_same_v<T, double>) {
    return r.get_d();
  } else {
    return T(r.get_num().get_str()) / T(r.get_den().get_str());
  }
}

template <class T>
T apply(Transcendental fn, const T& a) {
  using std::atan, std::cos, std::exp, std::log, std::sin;
  switch (fn) {
    case Transcendental::Log:
      if (!(a > 0)) throw NumericSingularity("logarithm of a non-positive value");
      return log(a);
    case Transcendental::Exp: return exp(a);
    case Transcendental::Sin: return sin(a);
    case Transcendental::Cos: return cos(a);
    case Transcendental::Arctan: return atan(a);
  }
  return T(0);
}

}  // namespace

template <class T>
CompiledExpr<T>::CompiledExpr(const NormalForm& f) {
  std::unordered_map<AtomId, int> slots;
  emit(to_expr(f), slots);
}

template <class T>
void CompiledExpr<T>::emit(const Expr& e, std::unordered_map<AtomId, int>& slots) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      consts_.push_back(from_rational<T>(e.value()));
      ops_.push_back({OpKind::Const, static_cast<int>(consts_.size()) - 1, Transcendental::Exp});
      return;
    case Expr::Kind::Symbol: {
      auto [it, inserted] = slots.emplace(e.atom(), static_cast<int>(vars_.size()));
      if (inserted) vars_.push_back(e.atom());
      ops_.push_back({OpKind::Var, it->second, Transcendental::Exp});
      return;
    }
    case Expr::Kind::Call:
      emit(e.operands()[0], slots);
      ops_.push_back({OpKind::Call, 0, e.function()});
      return;
    case Expr::Kind::Sum:
    case Expr::Kind::Product:
      for (const auto& o : e.operands()) emit(o, slots);
      ops_.push_back({e.kind() == Expr::Kind::Sum ? OpKind::Sum : OpKind::Product, static_cast<int>(e.operands().size()),
                      Transcendental::Exp});
      return;
    case Expr::Kind::Power:
      emit(e.operands()[0], slots);
      ops_.push_back({OpKind::Power, e.exponent(), Transcendental::Exp});
      return;
  }
}

template <class T>
T CompiledExpr<T>::operator()(std::span<const T> values) const {
  std::vector<T> stack;
  stack.reserve(16);
  for (const Op& op : ops_) {
    switch (op.kind) {
      case OpKind::Const: stack.push_back(consts_[static_cast<std::size_t>(op.arg)]); break;
      case OpKind::Var: stack.push_back(values[static_cast<std::size_t>(op.arg)]); break;
      case OpKind::Call: stack.back() = apply(op.fn, stack.back()); break;
      case OpKind::Sum:
      case OpKind::Product: {
        auto first = stack.end() - op.arg;
        T acc = *first;
        for (auto it = first + 1; it != stack.end(); ++it) acc = op.kind == OpKind::Sum ? T(acc + *it) : T(acc * *it);
        stack.erase(first, stack.end());
        stack.push_back(acc);
        break;
      }
      case OpKind::Power: {
        T b = stack.back();
        using std::abs;
        if (op.arg < 0 && abs(b) < T(1e-300)) throw NumericSingularity("division by a vanishing value");
        T r(1);
        for (int i = 0; i < std::abs(op.arg); ++i) r *= b;
        stack.back() = op.arg < 0 ? T(T(1) / r) : r;
        break;
      }
    }
  }
  return stack.empty() ? T(0) : stack.back();
}

template <class T>
T CompiledExpr<T>::operator()(const std::unordered_map<AtomId, T>& bindings) const {
  std::vector<T> values;
  values.reserve(vars_.size());
  for (AtomId a : vars_) {
    auto it = bindings.find(a);
    if (it == bindings.end()) throw MissingBinding("no value bound for " + registry().info(a).name);
    values.push_back(it->second);
  }
  return (*this)(std::span<const T>(values));
}

template class CompiledExpr<double>;
template class CompiledExpr<Quad>;

double fd_check(const NormalForm& e, AtomId v, const Bindings& point, double h) {
  CompiledExpr<double> f(e), df(diff(e, v));
  Bindings at = point;
  double v0 = at.count(v) ? at.at(v) : 0.0;
  at[v] = v0 + h;
  double fp = f(at);
  at[v] = v0 - h;
  double fm = f(at);
  at[v] = v0;
  double exact = df(at);
  return std::abs((fp - fm) / (2 * h) - exact) / std::max(1.0, std::abs(exact));
}

SamplePlan default_plan(FamilyId id) {
  SamplePlan p;
  if (id == FamilyId::SCALE_I || id == FamilyId::BVP_MUD) {
    p.xMin = 0.5;
    p.xMax = 2.5;
    p.yMin = -1;
    p.yMax = 1;
  }
  return p;
}

void validate_plan(const SamplePlan& plan, const SolutionFamily& fam) {
  if (!(plan.xMin < plan.xMax) || !(plan.yMin < plan.yMax)) throw ConfigError("empty sampling box");
  if (plan.count <= 0) throw ConfigError("sample count must be positive");
  if (fam.similarity == "scale" && plan.xMin < 1e-3) {
    throw ConfigError("sampling box meets the singular locus of " + to_string(fam.id) + " (" + fam.singularLocus +
                      "); x must stay >= 1e-3");
  }
}

std::vector<std::pair<double, double>> sample_points(const SamplePlan& plan) {
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> ux(plan.xMin, plan.xMax), uy(plan.yMin, plan.yMax);
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < plan.count; ++i) {
    double x = ux(rng);
    double y = uy(rng);
    out.emplace_back(x, y);
  }
  return out;
}

std::vector<std::pair<std::string, Rational>> default_parameters() {
  return {{"Re", Rational(1)},        {"k1", Rational(3, 10)},   {"k2", Rational(7, 10)},   {"k3", Rational(2, 5)},
          {"k4", Rational(1, 5)},     {"a1", Rational(1)},       {"a2", Rational(1, 2)},    {"a3", Rational(1, 4)},
          {"a4", Rational(1, 10)},    {"a5", Rational(1, 5)},    {"a6", Rational(3, 10)},   {"a7", Rational(2, 5)},
          {"b", Rational(1)},         {"c1", Rational(1)},       {"c2", Rational(1, 2)},    {"c3", Rational(-1, 2)},
          {"c4", Rational(1, 4)},     {"c5", Rational(1, 10)},   {"c6", Rational(-1, 10)},  {"c7", Rational(1, 5)},
          {"c8", Rational(-1, 5)},    {"ushear", Rational(1)},   {"vsuction", Rational(1, 2)}, {"pfar", Rational(1, 4)}};
}

SubstitutionMap parameter_substitution(const std::vector<std::pair<std::string, Rational>>& values) {
  SubstitutionMap m;
  for (const auto& [name, v] : values) m[parse(name).atom()] = NormalForm(v);
  return m;
}

PdeSystem bind_system(const PdeSystem& sys, const SubstitutionMap& values) {
  PdeSystem out = sys;
  for (auto& e : out.equations) e = substitute(e, values);
  return out;
}

SolutionFamily zero_order_truncation(const SolutionFamily& fam) {
  SolutionFamily out = fam;
  out.u[1] = NormalForm();
  out.v[1] = NormalForm();
  out.p[1] = NormalForm();
  return out;
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("APPROXLIE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

// Order-0 and order-1 values of every jet of u, v, p up to order 3.
template <class T>
class FieldEvaluator {
 public:
  explicit FieldEvaluator(const SolutionFamily& fam) {
    JetSpace space = JetSpace::plane_flow();
    AtomId x = registry().x(), y = registry().y();
    const std::array<const EpsSeries*, 3> F{&fam.u, &fam.v, &fam.p};
    for (std::size_t alpha = 0; alpha < 3; ++alpha) {
      for (int k = 0; k <= 1; ++k) {
        NormalForm dx = (*F[alpha])[k];
        for (int i = 0; i <= 3; ++i) {
          NormalForm d = dx;
          for (int j = 0; i + j <= 3; ++j) {
            if (k == 0) jets_.push_back(space.dependent_jet(alpha, {i, j}));
            exprs_[static_cast<std::size_t>(k)].emplace_back(d);
            d = diff(d, y);
          }
          dx = diff(dx, x);
        }
      }
    }
    for (int k = 0; k <= 1; ++k) {
      for (const auto& c : exprs_[static_cast<std::size_t>(k)]) {
        for (AtomId a : c.variables()) {
          if (a != x && a != y) throw MissingBinding("family parameter " + registry().info(a).name + " has no value");
        }
      }
    }
  }

  const std::vector<AtomId>& jets() const { return jets_; }

  // values[k][j] for jet j at order k.
  std::array<std::vector<T>, 2> at(double px, double py) const {
    std::unordered_map<AtomId, T> b{{registry().x(), T(px)}, {registry().y(), T(py)}};
    std::array<std::vector<T>, 2> out;
    for (std::size_t k = 0; k < 2; ++k) {
      for (const auto& c : exprs_[k]) out[k].push_back(c(b));
    }
    return out;
  }

 private:
  std::vector<AtomId> jets_;
  std::array<std::vector<CompiledExpr<T>>, 2> exprs_;
};

template <class T>
SweepResult sweep(const SolutionFamily& fam, const PdeSystem& sys, const std::vector<double>& epsList,
                  const SamplePlan& plan) {
  FieldEvaluator<T> fields(fam);
  std::vector<CompiledExpr<T>> eqs;
  for (const auto& e : sys.equations) eqs.emplace_back(e);
  AtomId eps = registry().eps();
  auto points = sample_points(plan);
  // norms[point][eps][eq]
  std::vector<std::vector<std::array<double, 3>>> norms(points.size());
  parallel_for(points.size(), [&](std::size_t pi) {
    auto vals = fields.at(points[pi].first, points[pi].second);
    norms[pi].resize(epsList.size());
    for (std::size_t ei = 0; ei < epsList.size(); ++ei) {
      T e(epsList[ei]);
      std::unordered_map<AtomId, T> b{{eps, e}};
      for (std::size_t j = 0; j < fields.jets().size(); ++j) b[fields.jets()[j]] = vals[0][j] + e * vals[1][j];
      for (std::size_t q = 0; q < eqs.size() && q < 3; ++q) {
        using std::abs;
        norms[pi][ei][q] = static_cast<double>(abs(eqs[q](b)));
      }
    }
  });
  SweepResult r;
  r.epsValues = epsList;
  for (std::size_t ei = 0; ei < epsList.size(); ++ei) {
    std::array<double, 3> per{0, 0, 0};
    for (const auto& p : norms) {
      for (std::size_t q = 0; q < 3; ++q) per[q] = std::max(per[q], p[ei][q]);
    }
    r.perEquation.push_back(per);
    r.residualNorms.push_back(std::max({per[0], per[1], per[2]}));
  }
  double floor = 100 * static_cast<double>(std::numeric_limits<T>::epsilon());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < epsList.size(); ++i) {
    if (!(r.residualNorms[i] > floor)) continue;
    double lx = std::log10(epsList[i]), ly = std::log10(r.residualNorms[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  r.usedPoints = n;
  if (n < 2) {
    r.exact = true;
    r.slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return r;
}

}  // namespace

SweepResult eps_sweep(const SolutionFamily& fam, const PdeSystem& sys, const std::vector<double>& epsList,
                      const SamplePlan& plan, Precision precision) {
  if (epsList.empty()) throw ConfigError("empty eps list");
  for (std::size_t i = 0; i < epsList.size(); ++i) {
    if (!(epsList[i] > 0 && epsList[i] < 1)) throw ConfigError("eps values must lie in (0, 1)");
    if (i > 0 && !(epsList[i] < epsList[i - 1])) throw ConfigError("eps values must be descending");
  }
  validate_plan(plan, fam);
  return precision == Precision::Quad ? sweep<Quad>(fam, sys, epsList, plan) : sweep<double>(fam, sys, epsList, plan);
}

double magnitude_ratio(const SolutionFamily& fam, const PdeSystem& sys, const SamplePlan& plan) {
  validate_plan(plan, fam);
  FieldEvaluator<double> fields(fam);
  std::unordered_map<AtomId, std::size_t> slot;
  for (std::size_t j = 0; j < fields.jets().size(); ++j) slot[fields.jets()[j]] = j;
  AtomId eps = registry().eps();
  for (const auto& e : sys.equations) {
    if (!e.is_polynomial()) throw MissingBinding("model equations must be bound to numeric parameters");
  }
  auto points = sample_points(plan);
  std::vector<double> worst(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t pi) {
    auto vals = fields.at(points[pi].first, points[pi].second);
    for (const auto& e : sys.equations) {
      std::array<double, 2> value{0, 0}, magnitude{0, 0};
      for (const auto& [m, c] : e.numerator().terms()) {
        // Truncated series product of the term.
        std::array<double, 2> t{c.get_d(), 0};
        for (const auto& [a, n] : m.factors()) {
          std::array<double, 2> f{0, 0};
          if (a == eps) {
            f = {0, 1};
          } else {
            auto it = slot.find(a);
            if (it == slot.end()) throw MissingBinding("no value bound for " + registry().info(a).name);
            f = {vals[0][it->second], vals[1][it->second]};
          }
          for (int i = 0; i < n; ++i) t = {t[0] * f[0], t[0] * f[1] + t[1] * f[0]};
        }
        for (int k = 0; k < 2; ++k) {
          value[static_cast<std::size_t>(k)] += t[static_cast<std::size_t>(k)];
          magnitude[static_cast<std::size_t>(k)] += std::abs(t[static_cast<std::size_t>(k)]);
        }
      }
      for (std::size_t k = 0; k < 2; ++k) {
        if (magnitude[k] > 0) worst[pi] = std::max(worst[pi], std::abs(value[k]) / magnitude[k]);
      }
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

double family_fd_error(const SolutionFamily& fam, const SamplePlan& plan, double h) {
  validate_plan(plan, fam);
  AtomId x = registry().x(), y = registry().y();
  std::vector<NormalForm> parents;
  std::vector<AtomId> dirs;
  const std::array<const EpsSeries*, 3> F{&fam.u, &fam.v, &fam.p};
  for (const auto* f : F) {
    for (int k = 0; k <= 1; ++k) {
      NormalForm dx = (*f)[k];
      for (int i = 0; i <= 2; ++i) {
        NormalForm d = dx;
        for (int j = 0; i + j <= 2; ++j) {
          // d has order i + j; its x- and y-derivatives are the order-(i+j+1) jets.
          parents.push_back(d);
          dirs.push_back(y);
          if (j == 0) {
            parents.push_back(d);
            dirs.push_back(x);
          }
          d = diff(d, y);
        }
        dx = diff(dx, x);
      }
    }
  }
  // Symbolic work happens before the parallel section; the registry is not
  // safe for concurrent interning.
  struct Pair {
    CompiledExpr<double> f, df;
    AtomId dir;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    pairs.push_back({CompiledExpr<double>(parents[i]), CompiledExpr<double>(diff(parents[i], dirs[i])), dirs[i]});
  }
  auto points = sample_points(plan);
  std::vector<double> worst(points.size(), 0);
  parallel_for(points.size(), [&](std::size_t pi) {
    for (const auto& pr : pairs) {
      Bindings b{{x, points[pi].first}, {y, points[pi].second}};
      double v0 = b[pr.dir];
      b[pr.dir] = v0 + h;
      double fp = pr.f(b);
      b[pr.dir] = v0 - h;
      double fm = pr.f(b);
      b[pr.dir] = v0;
      double exact = pr.df(b);
      worst[pi] = std::max(worst[pi], std::abs((fp - fm) / (2 * h) - exact) / std::max(1.0, std::abs(exact)));
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace approxlie
