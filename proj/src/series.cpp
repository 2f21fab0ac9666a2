#include "approxlie/series.hpp"

#include <algorithm>

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"

namespace approxlie {

JetSpace::JetSpace(std::vector<AtomId> independents, std::vector<FunctionId> dependents)
    : independents_(std::move(independents)), dependents_(std::move(dependents)) {
  auto& reg = registry();
  for (FunctionId f : dependents_) {
    const FunctionInfo& fi = reg.function_info(f);
    if (fi.role != FunctionRole::Dependent) throw UnknownDependent(fi.name + " is not a dependent unknown");
    if (fi.args != independents_) throw UnknownDependent(fi.name + " has different arguments than the jet space");
  }
}

JetSpace JetSpace::plane_flow() {
  auto& reg = registry();
  return JetSpace({reg.x(), reg.y()},
                  {*reg.find_function("u"), *reg.find_function("v"), *reg.find_function("p")});
}

FunctionId JetSpace::expanded(std::size_t alpha, int k) const {
  auto& reg = registry();
  FunctionId base = dependents_.at(alpha);
  return reg.function(reg.function_info(base).name + std::to_string(k), independents_, FunctionRole::Expanded, base, k);
}

AtomId JetSpace::expanded_jet(std::size_t alpha, int k, const std::vector<int>& index) const {
  return registry().jet(expanded(alpha, k), index);
}

AtomId JetSpace::expanded_value(std::size_t alpha, int k) const {
  return expanded_jet(alpha, k, std::vector<int>(n(), 0));
}

AtomId JetSpace::dependent_jet(std::size_t alpha, const std::vector<int>& index) const {
  return registry().jet(dependents_.at(alpha), index);
}

std::optional<std::pair<std::size_t, int>> JetSpace::classify(FunctionId f) const {
  const FunctionInfo& fi = registry().function_info(f);
  for (std::size_t a = 0; a < dependents_.size(); ++a) {
    if (fi.role == FunctionRole::Dependent && f == dependents_[a]) return std::make_pair(a, -1);
    if (fi.role == FunctionRole::Expanded && fi.base == dependents_[a]) return std::make_pair(a, fi.order);
  }
  return std::nullopt;
}

int JetSpace::independent_position(AtomId v) const {
  auto it = std::find(independents_.begin(), independents_.end(), v);
  return it == independents_.end() ? -1 : static_cast<int>(it - independents_.begin());
}

EpsSeries::EpsSeries(std::vector<NormalForm> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.resize(1);
}

EpsSeries EpsSeries::constant(const NormalForm& c, int order) {
  EpsSeries s(order);
  s[0] = c;
  return s;
}

bool EpsSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const NormalForm& c) { return c.is_zero(); });
}

namespace {

void check_orders(const EpsSeries& a, const EpsSeries& b) {
  if (a.order() != b.order()) {
    throw OrderMismatch("series orders differ: " + std::to_string(a.order()) + " vs " + std::to_string(b.order()));
  }
}

}  // namespace

EpsSeries EpsSeries::operator+(const EpsSeries& o) const {
  check_orders(*this, o);
  EpsSeries r(order());
  for (int k = 0; k <= order(); ++k) r[k] = (*this)[k] + o[k];
  return r;
}

EpsSeries EpsSeries::operator-() const {
  EpsSeries r(order());
  for (int k = 0; k <= order(); ++k) r[k] = -(*this)[k];
  return r;
}

EpsSeries EpsSeries::operator-(const EpsSeries& o) const { return *this + (-o); }

EpsSeries EpsSeries::operator*(const EpsSeries& o) const {
  check_orders(*this, o);
  EpsSeries r(order());
  for (int i = 0; i <= order(); ++i) {
    if ((*this)[i].is_zero()) continue;
    for (int j = 0; i + j <= order(); ++j) {
      if (o[j].is_zero()) continue;
      r[i + j] += (*this)[i] * o[j];
    }
  }
  return r;
}

EpsSeries EpsSeries::scaled(const NormalForm& c) const {
  EpsSeries r(order());
  for (int k = 0; k <= order(); ++k) r[k] = (*this)[k] * c;
  return r;
}

EpsSeries EpsSeries::shifted(int j) const {
  EpsSeries r(order());
  for (int k = 0; k + j <= order(); ++k) r[k + j] = (*this)[k];
  return r;
}

EpsSeries EpsSeries::map(const std::function<NormalForm(const NormalForm&)>& f) const {
  EpsSeries r(order());
  for (int k = 0; k <= order(); ++k) r[k] = f((*this)[k]);
  return r;
}

NormalForm EpsSeries::to_normal_form(AtomId eps) const {
  NormalForm out;
  for (int k = 0; k <= order(); ++k) out += (*this)[k] * NormalForm::atom(eps).pow(k);
  return out;
}

std::string to_string(const EpsSeries& s) {
  std::string out;
  for (int k = 0; k <= s.order(); ++k) {
    if (s[k].is_zero()) continue;
    if (!out.empty()) out += " + ";
    std::string c = to_string(s[k]);
    if (k == 0) {
      out += c;
    } else {
      out += (k == 1 ? std::string("eps") : "eps^" + std::to_string(k)) + "*(" + c + ")";
    }
  }
  return out.empty() ? "0" : out;
}

EpsSeries to_series(const NormalForm& f, int order, AtomId eps) {
  auto& fr = FactorRegistry::instance();
  for (const auto& [id, e] : f.denominator()) {
    if (fr.get(id).contains(eps)) throw NotPolynomial("eps appears in a denominator");
  }
  std::vector<PolyAccumulator> buckets(static_cast<std::size_t>(order) + 1);
  auto& reg = registry();
  for (const auto& [m, c] : f.numerator().terms()) {
    std::int32_t e = m.exponent(eps);
    if (e < 0) throw NotPolynomial("negative power of eps");
    for (const auto& [a, k] : m.factors()) {
      const AtomInfo& info = reg.info(a);
      if (info.kind == AtomKind::Transcendental && info.arg->depends_on(eps)) {
        throw NotPolynomial("eps appears inside " + info.name);
      }
    }
    if (e > order) continue;
    buckets[static_cast<std::size_t>(e)].add(m.without(eps), c);
  }
  EpsSeries s(order);
  for (int k = 0; k <= order; ++k) s[k] = NormalForm(buckets[static_cast<std::size_t>(k)].finish(), f.denominator());
  return s;
}

EpsSeries to_series(const NormalForm& f, int order) { return to_series(f, order, registry().eps()); }

EpsSeries expand_dependent(const NormalForm& e, const JetSpace& space, int order) {
  auto& reg = registry();
  SubstitutionMap rules;
  NormalForm eps = NormalForm::atom(reg.eps());
  std::vector<AtomId> pending = e.atoms();
  std::vector<AtomId> seen;
  while (!pending.empty()) {
    AtomId a = pending.back();
    pending.pop_back();
    if (std::find(seen.begin(), seen.end(), a) != seen.end()) continue;
    seen.push_back(a);
    const AtomInfo& info = reg.info(a);
    if (info.kind == AtomKind::Transcendental) {
      auto inner = info.arg->atoms();
      pending.insert(pending.end(), inner.begin(), inner.end());
      continue;
    }
    if (info.kind != AtomKind::Jet) continue;
    const FunctionInfo& fi = reg.function_info(info.function);
    if (fi.role != FunctionRole::Dependent) continue;
    auto cls = space.classify(info.function);
    if (!cls) throw UnknownDependent(fi.name + " is not an unknown of this system");
    NormalForm image;
    for (int k = 0; k <= order; ++k) {
      image += eps.pow(k) * NormalForm::atom(space.expanded_jet(cls->first, k, info.index));
    }
    rules.emplace(a, image);
  }
  return to_series(substitute(e, rules), order);
}

AtomId coefficient_function(const std::string& stem, int k, const std::vector<int>& tau, const JetSpace& space) {
  std::vector<AtomId> args;
  for (std::size_t a = 0; a < space.m(); ++a) args.push_back(space.expanded_value(a, 0));
  auto& reg = registry();
  FunctionId f = reg.function(stem + "(" + std::to_string(k) + ")", args, FunctionRole::Coefficient, std::nullopt, k);
  return reg.jet(f, tau);
}

NormalForm recursion_R(const NormalForm& f, const JetSpace& space, int maxOrder) {
  Derivation r([&](AtomId, const AtomInfo& info, NormalForm& out) {
    if (info.kind == AtomKind::Transcendental) return false;
    if (info.kind != AtomKind::Jet) return true;
    auto& reg = registry();
    const FunctionInfo& fi = reg.function_info(info.function);
    if (fi.role == FunctionRole::Coefficient) {
      int k = fi.order;
      if (k + 1 > maxOrder) throw OrderOverflow("coefficient function order exceeds " + std::to_string(maxOrder));
      std::string stem = fi.name.substr(0, fi.name.rfind('('));
      out = NormalForm::atom(coefficient_function(stem, k + 1, info.index, space));
      for (std::size_t i = 0; i < space.m(); ++i) {
        std::vector<int> tau = info.index;
        ++tau[i];
        out += NormalForm::atom(coefficient_function(stem, k, tau, space)) *
               NormalForm::atom(space.expanded_value(i, 1));
      }
      return true;
    }
    auto cls = space.classify(info.function);
    if (!cls) return true;
    if (cls->second < 0) throw UnknownDependent("recursion operator applied to an unexpanded unknown");
    int k = cls->second;
    if (k + 1 > maxOrder) throw OrderOverflow("expansion order exceeds " + std::to_string(maxOrder));
    out = NormalForm(k + 1) * NormalForm::atom(space.expanded_jet(cls->first, k + 1, info.index));
    return true;
  });
  return r(f);
}

}  // namespace approxlie
