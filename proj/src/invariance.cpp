#include "approxlie/invariance.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "approxlie/errors.hpp"

namespace approxlie {

namespace {

bool dominates(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

bool any_lhs(const NormalForm& f, const SubstitutionMap& rules) {
  for (AtomId a : f.atoms()) {
    if (rules.count(a)) return true;
    const AtomInfo& info = registry().info(a);
    if (info.kind == AtomKind::Transcendental && any_lhs(*info.arg, rules)) return true;
  }
  return false;
}

NormalForm reduce_with(const NormalForm& f, const SubstitutionMap& rules) {
  NormalForm cur = f;
  for (int it = 0; it < kFixpointLimit; ++it) {
    if (!any_lhs(cur, rules)) return cur;
    cur = substitute(cur, rules);
  }
  if (any_lhs(cur, rules)) throw FixpointExceeded("on-shell reduction did not terminate");
  return cur;
}

// Solves expr = 0 for `lead`, which must enter affinely.
NormalForm solve_affine(const NormalForm& expr, AtomId lead) {
  NormalForm a = partial_atom(expr, lead);
  if (a.is_zero()) throw NotAffine(registry().info(lead).name + " does not occur in the equation");
  if (a.depends_on(lead)) throw NotAffine("equation is nonlinear in " + registry().info(lead).name);
  NormalForm b = substitute(expr, {{lead, NormalForm()}});
  if (b.depends_on(lead)) throw NotAffine(registry().info(lead).name + " occurs inside a transcendental function");
  return -b / a;
}

class RuleBuilder {
 public:
  RuleBuilder(OnShellRules& out, const JetSpace& space) : out_(out), space_(space) {}

  // Adds lead -> rhs and every consequence with jet order up to the depth.
  void add_with_consequences(AtomId lead, const NormalForm& rhs) {
    std::deque<std::pair<AtomId, NormalForm>> queue{{lead, rhs}};
    while (!queue.empty()) {
      auto [l, r] = std::move(queue.front());
      queue.pop_front();
      if (!insert(l, r)) continue;
      const AtomInfo& info = registry().info(l);
      if (info.jet_order() >= out_.jetDepth) continue;
      for (AtomId v : space_.independents()) {
        int pos = argument_position(info, v);
        if (pos < 0) continue;
        std::vector<int> extra(info.index.size(), 0);
        ++extra[static_cast<std::size_t>(pos)];
        queue.emplace_back(jet_shift(l, extra), diff(r, v));
      }
    }
  }

  void close() {
    for (AtomId l : out_.lhs) out_.rules[l] = reduce_with(out_.rules[l], out_.rules);
    for (AtomId l : out_.lhs) {
      if (any_lhs(out_.rules[l], out_.rules)) {
        throw InconsistentChoice("rule for " + registry().info(l).name + " is not triangular");
      }
    }
  }

 private:
  // Returns false when the jet already had a rule (recording any mismatch).
  bool insert(AtomId l, const NormalForm& r) {
    NormalForm red = reduce_with(r, out_.rules);
    auto it = out_.rules.find(l);
    if (it != out_.rules.end()) {
      NormalForm diffr = reduce_with(red - it->second, out_.rules);
      if (!diffr.is_zero() &&
          std::find(out_.integrability.begin(), out_.integrability.end(), diffr) == out_.integrability.end() &&
          std::find(out_.integrability.begin(), out_.integrability.end(), -diffr) == out_.integrability.end()) {
        out_.integrability.push_back(diffr);
      }
      return false;
    }
    if (red.depends_on(l)) throw InconsistentChoice("rule for " + registry().info(l).name + " is circular");
    // Keep earlier rules reduced with respect to the new one.
    SubstitutionMap one{{l, red}};
    for (AtomId e : out_.lhs) {
      NormalForm& rhs = out_.rules[e];
      if (rhs.depends_on(l)) rhs = substitute(rhs, one);
    }
    out_.rules.emplace(l, red);
    out_.lhs.push_back(l);
    return true;
  }

  OnShellRules& out_;
  const JetSpace& space_;
};

}  // namespace

void PdeSystem::validate() const {
  auto& reg = registry();
  if (leading.size() != equations.size()) throw InconsistentChoice("one leading derivative per equation is required");
  for (std::size_t i = 0; i < leading.size(); ++i) {
    const AtomInfo& a = reg.info(leading[i]);
    if (a.kind != AtomKind::Jet || !space.classify(a.function) || space.classify(a.function)->second >= 0) {
      throw InconsistentChoice("leading derivative " + a.name + " is not a jet of an unknown");
    }
    for (std::size_t j = 0; j < leading.size(); ++j) {
      if (i == j) continue;
      const AtomInfo& b = reg.info(leading[j]);
      if (a.function == b.function && dominates(a.index, b.index)) {
        throw InconsistentChoice(a.name + " coincides with or is a derivative of " + b.name);
      }
    }
  }
}

PdeSystem PdeSystem::unperturbed() const {
  PdeSystem s = *this;
  for (auto& e : s.equations) e = substitute(e, {{registry().eps(), NormalForm()}});
  return s;
}

NormalForm OnShellRules::reduce(const NormalForm& f) const { return reduce_with(f, rules); }

EpsSeries OnShellRules::reduce(const EpsSeries& s) const {
  return s.map([this](const NormalForm& c) { return reduce(c); });
}

const NormalForm* OnShellRules::find(AtomId a) const {
  auto it = rules.find(a);
  return it == rules.end() ? nullptr : &it->second;
}

OnShellRules onshell_rules(const PdeSystem& sys, int p, int jetDepth) {
  sys.validate();
  OnShellRules out;
  out.order = p;
  out.jetDepth = jetDepth;
  auto& reg = registry();
  std::vector<EpsSeries> expanded;
  for (const auto& e : sys.equations) expanded.push_back(expand_dependent(e, sys.space, p));
  RuleBuilder builder(out, sys.space);
  for (int k = 0; k <= p; ++k) {
    for (std::size_t i = 0; i < sys.equations.size(); ++i) {
      const AtomInfo& lead = reg.info(sys.leading[i]);
      std::size_t alpha = sys.space.classify(lead.function)->first;
      AtomId lk = sys.space.expanded_jet(alpha, k, lead.index);
      NormalForm eq = reduce_with(expanded[i][k], out.rules);
      builder.add_with_consequences(lk, solve_affine(eq, lk));
    }
  }
  builder.close();
  return out;
}

void add_constraint(OnShellRules& rules, const PdeSystem& sys, const NormalForm& expr, std::optional<AtomId> leading) {
  auto& reg = registry();
  EpsSeries s = expand_dependent(expr, sys.space, rules.order);
  RuleBuilder builder(rules, sys.space);
  for (int k = 0; k <= rules.order; ++k) {
    NormalForm eq = rules.reduce(s[k]);
    if (eq.is_zero()) continue;
    AtomId lead = 0;
    if (leading && k == 0) {
      lead = *leading;
    } else {
      // Jet of an auxiliary function with the fewest arguments, then lowest
      // order, entering affinely.
      std::optional<std::tuple<std::size_t, int, std::string>> best;
      for (AtomId a : eq.atoms()) {
        const AtomInfo& info = reg.info(a);
        if (info.kind != AtomKind::Jet) continue;
        const FunctionInfo& fi = reg.function_info(info.function);
        if (fi.role != FunctionRole::Auxiliary) continue;
        NormalForm c = partial_atom(eq, a);
        if (c.depends_on(a)) continue;
        auto key = std::make_tuple(fi.args.size(), info.jet_order(), info.sortKey);
        if (!best || key < *best) {
          best = key;
          lead = a;
        }
      }
      if (!best) throw NotAffine("constraint has no auxiliary jet to solve for");
    }
    builder.add_with_consequences(lead, solve_affine(eq, lead));
  }
  builder.close();
}

std::vector<EpsSeries> invariance_residual(const PdeSystem& sys, const Generator& g, const OnShellRules& rules) {
  if (g.order() != rules.order) throw OrderMismatch("generator and on-shell rules have different orders");
  ProlongedGenerator pg = prolong(g, sys.maxOrder, rules.jetDepth);
  std::vector<EpsSeries> out;
  for (const auto& e : sys.equations) out.push_back(rules.reduce(pg.apply(e)));
  return out;
}

std::vector<EpsSeries> invariance_residual(const PdeSystem& sys, const Generator& g, int p) {
  return invariance_residual(sys, g.order() == p ? g : g.with_order(p), onshell_rules(sys, p));
}

bool DeterminingSet::empty() const { return size() == 0; }

std::size_t DeterminingSet::size() const {
  std::size_t n = 0;
  for (const auto& v : perOrder) n += v.size();
  return n;
}

DeterminingSet determining_equations(const std::vector<EpsSeries>& res, const PdeSystem& sys) {
  auto& reg = registry();
  DeterminingSet d;
  d.order = res.empty() ? 0 : res.front().order();
  d.perOrder.resize(static_cast<std::size_t>(d.order) + 1);
  for (std::size_t e = 0; e < res.size(); ++e) {
    for (int k = 0; k <= res[e].order(); ++k) {
      const NormalForm& c = res[e][k];
      if (c.is_zero()) continue;
      std::vector<AtomId> jets;
      for (AtomId a : c.atoms()) {
        const AtomInfo& info = reg.info(a);
        if (info.kind != AtomKind::Jet) continue;
        auto cls = sys.space.classify(info.function);
        if (cls && cls->second >= 0) jets.push_back(a);
      }
      for (auto& [m, coef] : collect(c, jets)) {
        d.perOrder[static_cast<std::size_t>(k)].push_back({e, k, m, coef});
      }
    }
  }
  return d;
}

VerificationReport verify_generator(const PdeSystem& sys, const Generator& g, const OnShellRules& rules) {
  VerificationReport r;
  r.determining = determining_equations(invariance_residual(sys, g, rules), sys);
  r.integrability = rules.integrability;
  r.pass = r.determining.empty();
  return r;
}

VerificationReport verify_generator(const PdeSystem& sys, const Generator& g, const std::vector<NormalForm>& modulo) {
  OnShellRules rules = onshell_rules(sys, g.order());
  for (const auto& m : modulo) add_constraint(rules, sys, m);
  return verify_generator(sys, g, rules);
}

std::string to_text(const DeterminingSet& d, const PdeSystem& sys) {
  std::string out;
  for (const auto& level : d.perOrder) {
    for (const auto& e : level) {
      std::string name = e.equation < sys.names.size() ? sys.names[e.equation] : "eq" + std::to_string(e.equation + 1);
      out += name + " eps^" + std::to_string(e.order) + " [" + to_string(e.monomial) + "]: " +
             to_string(e.coefficient) + "\n";
    }
  }
  return out;
}

std::vector<NormalForm> surface_conditions(const Generator& g) {
  const JetSpace& space = g.space();
  const int p = g.order();
  std::vector<NormalForm> out;
  for (std::size_t alpha = 0; alpha < space.m(); ++alpha) {
    EpsSeries s = -g.eta_series(alpha);
    for (std::size_t i = 0; i < space.n(); ++i) {
      std::vector<int> counts(space.n(), 0);
      ++counts[i];
      EpsSeries du(p);
      for (int k = 0; k <= p; ++k) du[k] = NormalForm::atom(space.expanded_jet(alpha, k, counts));
      s += g.xi_series(i) * du;
    }
    for (int k = 0; k <= p; ++k) out.push_back(s[k]);
  }
  return out;
}

bool is_inconsistent(const NormalForm& condition) {
  auto c = condition.constant_value();
  return c && *c != 0;
}

}  // namespace approxlie
