#include "approxlie/generator.hpp"

#include <algorithm>

#include "approxlie/errors.hpp"

namespace approxlie {

namespace {

// Atoms of f including those inside transcendental arguments.
void deep_atoms(const NormalForm& f, std::vector<AtomId>& out) {
  for (AtomId a : f.atoms()) {
    if (std::find(out.begin(), out.end(), a) != out.end()) continue;
    out.push_back(a);
    const AtomInfo& info = registry().info(a);
    if (info.kind == AtomKind::Transcendental) deep_atoms(*info.arg, out);
  }
}

std::vector<AtomId> deep_atoms(const NormalForm& f) {
  std::vector<AtomId> out;
  deep_atoms(f, out);
  return out;
}

bool is_value(const AtomInfo& info) {
  return std::all_of(info.index.begin(), info.index.end(), [](int c) { return c == 0; });
}

std::vector<std::vector<NormalForm>> zero_slots(std::size_t count, int order) {
  return std::vector<std::vector<NormalForm>>(count, std::vector<NormalForm>(static_cast<std::size_t>(order) + 1));
}

EpsSeries jet_series(const JetSpace& space, std::size_t alpha, const std::vector<int>& counts, int order) {
  EpsSeries s(order);
  for (int k = 0; k <= order; ++k) s[k] = NormalForm::atom(space.expanded_jet(alpha, k, counts));
  return s;
}

}  // namespace

Generator::Generator(JetSpace space, int order)
    : space_(std::move(space)), order_(order), xi_(zero_slots(space_.n(), order)), eta_(zero_slots(space_.m(), order)) {}

Generator::Generator(JetSpace space, int order, std::vector<std::vector<NormalForm>> xi,
                     std::vector<std::vector<NormalForm>> eta)
    : Generator(std::move(space), order) {
  if (xi.size() > space_.n() || eta.size() > space_.m()) throw ConfigError("too many generator components");
  auto fill = [&](std::vector<std::vector<NormalForm>>& dst, std::vector<std::vector<NormalForm>>& src) {
    for (std::size_t i = 0; i < src.size(); ++i) {
      if (src[i].size() > dst[i].size()) throw OrderMismatch("generator slot exceeds the series order");
      std::move(src[i].begin(), src[i].end(), dst[i].begin());
    }
  };
  fill(xi_, xi);
  fill(eta_, eta);
  validate();
}

Generator Generator::from_closed_form(const JetSpace& space, int order, const std::vector<NormalForm>& xi,
                                      const std::vector<NormalForm>& eta) {
  Generator g(space, order);
  for (std::size_t i = 0; i < xi.size(); ++i) g.xi_.at(i) = expand_dependent(xi[i], space, order).coeffs();
  for (std::size_t a = 0; a < eta.size(); ++a) g.eta_.at(a) = expand_dependent(eta[a], space, order).coeffs();
  g.validate();
  return g;
}

void Generator::validate() const {
  auto& reg = registry();
  auto check = [&](const std::vector<std::vector<NormalForm>>& slots) {
    for (const auto& comp : slots) {
      for (int k = 0; k <= order_; ++k) {
        for (AtomId a : deep_atoms(comp[static_cast<std::size_t>(k)])) {
          const AtomInfo& info = reg.info(a);
          if (info.kind != AtomKind::Jet) continue;
          auto cls = space_.classify(info.function);
          if (!cls) continue;
          if (cls->second < 0) throw UnknownDependent("generator slot contains an unexpanded unknown");
          if (!is_value(info)) throw UnsupportedOrder("point generator slot contains a derivative jet");
          if (cls->second > k) {
            throw OrderOverflow("slot of order " + std::to_string(k) + " depends on " + info.name);
          }
        }
      }
    }
  };
  check(xi_);
  check(eta_);
}

bool Generator::is_zero() const {
  auto zero = [](const std::vector<std::vector<NormalForm>>& slots) {
    for (const auto& c : slots) {
      for (const auto& f : c) {
        if (!f.is_zero()) return false;
      }
    }
    return true;
  };
  return zero(xi_) && zero(eta_);
}

Generator Generator::operator+(const Generator& o) const {
  if (order_ != o.order_) throw OrderMismatch("generator orders differ");
  if (!(space_ == o.space_)) throw ConfigError("generators act on different jet spaces");
  Generator r(space_, order_);
  for (std::size_t i = 0; i < xi_.size(); ++i) {
    for (int k = 0; k <= order_; ++k) r.xi(i, k) = xi(i, k) + o.xi(i, k);
  }
  for (std::size_t a = 0; a < eta_.size(); ++a) {
    for (int k = 0; k <= order_; ++k) r.eta(a, k) = eta(a, k) + o.eta(a, k);
  }
  return r;
}

Generator Generator::scaled(const NormalForm& c) const {
  Generator r = *this;
  for (auto& comp : r.xi_) {
    for (auto& f : comp) f = f * c;
  }
  for (auto& comp : r.eta_) {
    for (auto& f : comp) f = f * c;
  }
  return r;
}

Generator Generator::operator-(const Generator& o) const { return *this + o.scaled(-1); }

Generator Generator::eps_multiple() const {
  Generator r(space_, order_);
  for (std::size_t i = 0; i < xi_.size(); ++i) r.xi_[i] = xi_series(i).shifted(1).coeffs();
  for (std::size_t a = 0; a < eta_.size(); ++a) r.eta_[a] = eta_series(a).shifted(1).coeffs();
  return r;
}

Generator Generator::zero_order() const {
  Generator r(space_, order_);
  for (std::size_t i = 0; i < xi_.size(); ++i) r.xi(i, 0) = xi(i, 0);
  for (std::size_t a = 0; a < eta_.size(); ++a) r.eta(a, 0) = eta(a, 0);
  return r;
}

Generator Generator::with_order(int order) const {
  Generator r(space_, order);
  for (int k = 0; k <= std::min(order, order_); ++k) {
    for (std::size_t i = 0; i < xi_.size(); ++i) r.xi(i, k) = xi(i, k);
    for (std::size_t a = 0; a < eta_.size(); ++a) r.eta(a, k) = eta(a, k);
  }
  return r;
}

EpsSeries Generator::apply(const NormalForm& f) const {
  auto& reg = registry();
  EpsSeries out(order_);
  for (std::size_t i = 0; i < space_.n(); ++i) {
    NormalForm d = explicit_partial(f, space_.independents()[i]);
    if (!d.is_zero()) out += xi_series(i) * to_series(d, order_);
  }
  for (AtomId a : deep_atoms(f)) {
    const AtomInfo& info = reg.info(a);
    if (info.kind != AtomKind::Jet) continue;
    auto cls = space_.classify(info.function);
    if (!cls) continue;
    if (cls->second < 0) throw UnknownDependent("generator applied to an unexpanded unknown");
    if (!is_value(info)) throw UnsupportedOrder("point generator applied to a derivative jet");
    if (cls->second > order_) continue;
    NormalForm d = partial_atom(f, a);
    if (d.is_zero()) continue;
    out += EpsSeries::constant(eta(cls->first, cls->second), order_) * to_series(d, order_);
  }
  return out;
}

EpsSeries Generator::apply(const EpsSeries& f) const {
  if (f.order() != order_) throw OrderMismatch("series and generator orders differ");
  EpsSeries out(order_);
  for (int j = 0; j <= order_; ++j) {
    if (!f[j].is_zero()) out += apply(f[j]).shifted(j);
  }
  return out;
}

std::string to_string(const Generator& g) {
  auto& reg = registry();
  std::string out;
  auto emit = [&](const std::string& key, const NormalForm& f) {
    if (f.is_zero()) return;
    out += key + " = " + to_string(f) + "\n";
  };
  for (std::size_t i = 0; i < g.space().n(); ++i) {
    for (int k = 0; k <= g.order(); ++k) {
      emit("xi_" + reg.info(g.space().independents()[i]).name + "_" + std::to_string(k), g.xi(i, k));
    }
  }
  for (std::size_t a = 0; a < g.space().m(); ++a) {
    for (int k = 0; k <= g.order(); ++k) {
      emit("eta_" + reg.function_info(g.space().dependents()[a]).name + "_" + std::to_string(k), g.eta(a, k));
    }
  }
  return out.empty() ? "0\n" : out;
}

NormalForm total_derivative(const NormalForm& e, AtomId v, int jetDepth) {
  auto& reg = registry();
  for (AtomId a : deep_atoms(e)) {
    const AtomInfo& info = reg.info(a);
    if (info.kind != AtomKind::Jet) continue;
    FunctionRole role = reg.function_info(info.function).role;
    if (role != FunctionRole::Expanded && role != FunctionRole::Dependent) continue;
    if (argument_position(info, v) >= 0 && info.jet_order() >= jetDepth) {
      throw JetDepthExceeded(info.name + " is already at jet depth " + std::to_string(jetDepth));
    }
  }
  return diff(e, v);
}

EpsSeries total_derivative(const EpsSeries& e, AtomId v, int jetDepth) {
  return e.map([&](const NormalForm& c) { return total_derivative(c, v, jetDepth); });
}

namespace {

EpsSeries prolongation_step(const Generator& g, std::size_t alpha, const EpsSeries& prev,
                            const std::vector<int>& prevCounts, std::size_t i, int jetDepth) {
  const JetSpace& space = g.space();
  AtomId xi = space.independents()[i];
  EpsSeries out = total_derivative(prev, xi, jetDepth);
  for (std::size_t k = 0; k < space.n(); ++k) {
    EpsSeries dxi = total_derivative(g.xi_series(k), xi, jetDepth);
    if (dxi.is_zero()) continue;
    std::vector<int> counts = prevCounts;
    ++counts[k];
    out = out - dxi * jet_series(space, alpha, counts, g.order());
  }
  return out;
}

}  // namespace

const EpsSeries& ProlongedGenerator::coefficient(std::size_t alpha, const std::vector<int>& counts) const {
  auto it = etaDeriv.find({alpha, counts});
  if (it == etaDeriv.end()) throw UnsupportedOrder("prolongation coefficient beyond the prolongation order");
  return it->second;
}

EpsSeries ProlongedGenerator::apply(const NormalForm& delta) const {
  const JetSpace& space = base.space();
  const int p = base.order();
  auto& reg = registry();
  EpsSeries out(p);
  for (std::size_t i = 0; i < space.n(); ++i) {
    NormalForm d = explicit_partial(delta, space.independents()[i]);
    if (!d.is_zero()) out += base.xi_series(i) * expand_dependent(d, space, p);
  }
  for (AtomId a : deep_atoms(delta)) {
    const AtomInfo& info = reg.info(a);
    if (info.kind != AtomKind::Jet) continue;
    auto cls = space.classify(info.function);
    if (!cls) continue;
    if (cls->second >= 0) throw UnknownDependent("prolonged generator applied to an already expanded expression");
    NormalForm d = partial_atom(delta, a);
    if (d.is_zero()) continue;
    const EpsSeries& coef = is_value(info) ? base.eta_series(cls->first) : coefficient(cls->first, info.index);
    out += coef * expand_dependent(d, space, p);
  }
  return out;
}

ProlongedGenerator prolong(const Generator& g, int r, int jetDepth, int maxOrder) {
  if (r > maxOrder) {
    throw UnsupportedOrder("prolongation order " + std::to_string(r) + " exceeds " + std::to_string(maxOrder));
  }
  ProlongedGenerator pg{g, r, {}};
  const std::size_t n = g.space().n();
  for (std::size_t alpha = 0; alpha < g.space().m(); ++alpha) {
    std::vector<std::pair<std::vector<int>, EpsSeries>> layer{{std::vector<int>(n, 0), g.eta_series(alpha)}};
    for (int order = 1; order <= r; ++order) {
      std::vector<std::pair<std::vector<int>, EpsSeries>> next;
      for (const auto& [counts, series] : layer) {
        // Extend only with indices at or after the last one used so every
        // multi-index is produced once.
        std::size_t first = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (counts[i] > 0) first = i;
        }
        for (std::size_t i = first; i < n; ++i) {
          std::vector<int> c = counts;
          ++c[i];
          EpsSeries s = prolongation_step(g, alpha, series, counts, i, jetDepth);
          pg.etaDeriv.emplace(std::make_pair(alpha, c), s);
          next.emplace_back(c, std::move(s));
        }
      }
      layer = std::move(next);
    }
  }
  return pg;
}

EpsSeries prolong_along(const Generator& g, std::size_t alpha, const std::vector<std::size_t>& path, int jetDepth) {
  std::vector<int> counts(g.space().n(), 0);
  EpsSeries s = g.eta_series(alpha);
  for (std::size_t i : path) {
    s = prolongation_step(g, alpha, s, counts, i, jetDepth);
    ++counts[i];
  }
  return s;
}

Generator commutator(const Generator& a, const Generator& b) {
  if (a.order() != b.order()) throw OrderMismatch("generator orders differ");
  if (!(a.space() == b.space())) throw ConfigError("generators act on different jet spaces");
  Generator r(a.space(), a.order());
  for (std::size_t i = 0; i < a.space().n(); ++i) {
    EpsSeries c = a.apply(b.xi_series(i)) - b.apply(a.xi_series(i));
    for (int k = 0; k <= a.order(); ++k) r.xi(i, k) = c[k];
  }
  for (std::size_t al = 0; al < a.space().m(); ++al) {
    EpsSeries c = a.apply(b.eta_series(al)) - b.apply(a.eta_series(al));
    for (int k = 0; k <= a.order(); ++k) r.eta(al, k) = c[k];
  }
  return r;
}

}  // namespace approxlie
