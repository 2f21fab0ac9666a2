#include "approxlie/normal_form.hpp"

#include <algorithm>
#include <map>

#include "approxlie/errors.hpp"

namespace approxlie {

FactorRegistry& FactorRegistry::instance() {
  static FactorRegistry r;
  return r;
}

std::optional<FactorId> FactorRegistry::find(const Poly& monic) const {
  std::size_t h = monic.hash();
  std::shared_lock lock(mutex_);
  auto [lo, hi] = byHash_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (factors_[it->second] == monic) return it->second;
  }
  return std::nullopt;
}

FactorId FactorRegistry::intern(const Poly& monic) {
  if (auto id = find(monic)) return *id;
  std::size_t h = monic.hash();
  std::unique_lock lock(mutex_);
  auto [lo, hi] = byHash_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    if (factors_[it->second] == monic) return it->second;
  }
  auto id = static_cast<FactorId>(factors_.push(monic));
  byHash_.emplace(h, id);
  return id;
}

std::size_t FactorRegistry::size() const {
  std::shared_lock lock(mutex_);
  return factors_.size();
}

namespace {

const Poly::Term& display_leading(const Poly& p) {
  const Poly::Term* best = &p.terms().front();
  for (const auto& t : p.terms()) {
    if (compare_display(t.first, best->first) > 0) best = &t;
  }
  return *best;
}

struct Factorization {
  Rational constant = 1;
  Monomial monomial;
  NormalForm::Den factors;
};

void add_factor(NormalForm::Den& den, FactorId id, int e) {
  auto it = std::lower_bound(den.begin(), den.end(), id, [](const auto& p, FactorId v) { return p.first < v; });
  if (it != den.end() && it->first == id) {
    it->second += e;
  } else {
    den.insert(it, {id, e});
  }
}

// Splits p into constant * monomial * product of registered monic factors.
Factorization factorize(const Poly& p) {
  Factorization out;
  if (auto c = p.constant_value()) {
    out.constant = *c;
    return out;
  }
  out.monomial = p.min_exponents();
  Poly q = p.shifted(out.monomial.inverse());
  if (q.size() == 1) {
    out.monomial = out.monomial * q.leading().first;
    out.constant = q.leading().second;
    return out;
  }
  out.constant = display_leading(q).second;
  q = q.scaled(1 / out.constant);
  auto& reg = FactorRegistry::instance();
  while (true) {
    if (q.is_constant()) break;
    if (auto id = reg.find(q)) {
      add_factor(out.factors, *id, 1);
      break;
    }
    bool divided = false;
    std::size_t n = reg.size();
    for (FactorId id = 0; id < n && !divided; ++id) {
      const Poly& f = reg.get(id);
      if (f.size() > q.size()) continue;
      if (auto quotient = q.divide_exact(f)) {
        add_factor(out.factors, id, 1);
        q = *quotient;
        divided = true;
      }
    }
    if (!divided) {
      add_factor(out.factors, reg.intern(q), 1);
      break;
    }
  }
  return out;
}

NormalForm::Den merge_den(const NormalForm::Den& a, const NormalForm::Den& b, bool add) {
  NormalForm::Den out;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, add ? i->second + j->second : std::max(i->second, j->second));
      ++i;
      ++j;
    }
  }
  return out;
}

int den_exponent(const NormalForm::Den& d, FactorId id) {
  for (const auto& [f, e] : d) {
    if (f == id) return e;
  }
  return 0;
}

Poly den_power_product(const NormalForm::Den& have, const NormalForm::Den& target) {
  Poly out(1);
  auto& reg = FactorRegistry::instance();
  for (const auto& [id, e] : target) {
    int missing = e - den_exponent(have, id);
    if (missing > 0) out = out * reg.get(id).pow(static_cast<unsigned>(missing));
  }
  return out;
}

}  // namespace

NormalForm::NormalForm(Poly num, Den den) : num_(std::move(num)), den_(std::move(den)) { cancel(); }

void NormalForm::cancel() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  auto& reg = FactorRegistry::instance();
  for (auto& [id, e] : den_) {
    while (e > 0) {
      auto q = num_.divide_exact(reg.get(id));
      if (!q) break;
      num_ = std::move(*q);
      --e;
    }
  }
  den_.erase(std::remove_if(den_.begin(), den_.end(), [](const auto& p) { return p.second == 0; }), den_.end());
}

Poly NormalForm::denominator_poly() const {
  Poly out(1);
  for (const auto& [id, e] : den_) out = out * FactorRegistry::instance().get(id).pow(static_cast<unsigned>(e));
  return out;
}

std::optional<Rational> NormalForm::constant_value() const {
  if (!den_.empty()) return std::nullopt;
  return num_.constant_value();
}

std::vector<AtomId> NormalForm::atoms() const {
  std::vector<AtomId> out = num_.atoms();
  for (const auto& [id, e] : den_) {
    auto more = FactorRegistry::instance().get(id).atoms();
    out.insert(out.end(), more.begin(), more.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool NormalForm::contains(AtomId a) const {
  auto v = atoms();
  return std::binary_search(v.begin(), v.end(), a);
}

bool NormalForm::depends_on(AtomId a) const {
  for (AtomId b : atoms()) {
    if (b == a) return true;
    const AtomInfo& info = registry().info(b);
    if (info.kind == AtomKind::Transcendental && info.arg->depends_on(a)) return true;
  }
  return false;
}

NormalForm NormalForm::operator-() const {
  NormalForm r = *this;
  r.num_ = -r.num_;
  return r;
}

NormalForm operator+(const NormalForm& a, const NormalForm& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) {
    if (a.den_.empty()) return NormalForm(a.num_ + b.num_);
    return NormalForm(a.num_ + b.num_, a.den_);
  }
  NormalForm::Den l = merge_den(a.den_, b.den_, false);
  Poly na = a.num_ * den_power_product(a.den_, l);
  Poly nb = b.num_ * den_power_product(b.den_, l);
  return NormalForm(na + nb, std::move(l));
}

NormalForm operator-(const NormalForm& a, const NormalForm& b) { return a + (-b); }

NormalForm operator*(const NormalForm& a, const NormalForm& b) {
  if (a.is_zero() || b.is_zero()) return NormalForm();
  if (a.den_.empty() && b.den_.empty()) return NormalForm(a.num_ * b.num_);
  return NormalForm(a.num_ * b.num_, merge_den(a.den_, b.den_, true));
}

NormalForm NormalForm::inverse() const {
  if (is_zero()) throw DivisionByZeroExpr("division by an expression that normalizes to zero");
  Factorization fz = factorize(num_);
  Den newDen = fz.factors;
  Den numFactors = den_;
  for (auto& [id, e] : newDen) {
    for (auto& [id2, e2] : numFactors) {
      if (id == id2) {
        int m = std::min(e, e2);
        e -= m;
        e2 -= m;
      }
    }
  }
  auto drop = [](Den& d) {
    d.erase(std::remove_if(d.begin(), d.end(), [](const auto& p) { return p.second == 0; }), d.end());
  };
  drop(newDen);
  drop(numFactors);
  Poly n = Poly::monomial(fz.monomial.inverse(), 1 / fz.constant);
  for (const auto& [id, e] : numFactors) n = n * FactorRegistry::instance().get(id).pow(static_cast<unsigned>(e));
  return NormalForm(std::move(n), std::move(newDen));
}

NormalForm operator/(const NormalForm& a, const NormalForm& b) { return a * b.inverse(); }

NormalForm NormalForm::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  NormalForm result(1), base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

namespace {

NormalForm make_atom(Transcendental fn, const NormalForm& arg) {
  return NormalForm::atom(registry().transcendental(fn, arg));
}

bool negative_leading(const NormalForm& f) { return display_leading(f.numerator()).second < 0; }

}  // namespace

NormalForm apply_function(Transcendental fn, const NormalForm& arg) {
  switch (fn) {
    case Transcendental::Exp: {
      if (arg.is_zero()) return NormalForm(1);
      if (!arg.is_polynomial()) return make_atom(fn, arg);
      Monomial::Factors powers;
      NormalForm extra(1);
      auto& reg = registry();
      for (const auto& [m, c] : arg.numerator().terms()) {
        if (m.factors().size() == 1 && m.factors()[0].second == 1 && c.get_den() == 1) {
          const AtomInfo& info = reg.info(m.factors()[0].first);
          if (info.kind == AtomKind::Transcendental && info.fn == Transcendental::Log) {
            extra *= info.arg->pow(static_cast<int>(c.get_num().get_si()));
            continue;
          }
        }
        Rational unit(1, c.get_den());
        AtomId a = reg.transcendental(Transcendental::Exp, NormalForm(Poly::monomial(m, unit)));
        powers.emplace_back(a, static_cast<std::int32_t>(c.get_num().get_si()));
      }
      return NormalForm(Poly::monomial(Monomial::from_factors(powers))) * extra;
    }
    case Transcendental::Log: {
      if (arg.is_zero()) throw DivisionByZeroExpr("logarithm of zero");
      Factorization fz = factorize(arg.numerator());
      NormalForm out;
      auto& reg = registry();
      auto& fr = FactorRegistry::instance();
      // A negative constant is folded into the first factor with an odd
      // exponent so that log(2 - cos(y)^2) does not split into log(-1) + ...
      bool flip = false;
      FactorId flipFactor = 0;
      AtomId flipAtom = 0;
      int flipKind = 0;
      if (fz.constant < 0) {
        for (const auto& [id, e] : fz.factors) {
          if (e % 2 != 0) {
            flipKind = 1;
            flipFactor = id;
            break;
          }
        }
        if (flipKind == 0) {
          for (const auto& [a, e] : fz.monomial.factors()) {
            const AtomInfo& info = reg.info(a);
            bool isExp = info.kind == AtomKind::Transcendental && info.fn == Transcendental::Exp;
            if (e % 2 != 0 && !isExp) {
              flipKind = 2;
              flipAtom = a;
              break;
            }
          }
        }
        flip = flipKind != 0;
      }
      Rational constant = flip ? Rational(-fz.constant) : fz.constant;
      if (constant != 1) out += make_atom(fn, NormalForm(constant));
      for (const auto& [a, e] : fz.monomial.factors()) {
        const AtomInfo& info = reg.info(a);
        if (info.kind == AtomKind::Transcendental && info.fn == Transcendental::Exp) {
          out += NormalForm(e) * *info.arg;
        } else if (flipKind == 2 && a == flipAtom) {
          out += NormalForm(e) * make_atom(fn, -NormalForm::atom(a));
        } else {
          out += NormalForm(e) * make_atom(fn, NormalForm::atom(a));
        }
      }
      for (const auto& [id, e] : fz.factors) {
        NormalForm f(fr.get(id));
        out += NormalForm(e) * make_atom(fn, flipKind == 1 && id == flipFactor ? -f : f);
      }
      for (const auto& [id, e] : arg.denominator()) out -= NormalForm(e) * make_atom(fn, NormalForm(fr.get(id)));
      return out;
    }
    case Transcendental::Sin:
      if (arg.is_zero()) return NormalForm();
      return negative_leading(arg) ? -make_atom(fn, -arg) : make_atom(fn, arg);
    case Transcendental::Cos:
      if (arg.is_zero()) return NormalForm(1);
      return make_atom(fn, negative_leading(arg) ? -arg : arg);
    case Transcendental::Arctan:
      if (arg.is_zero()) return NormalForm();
      return negative_leading(arg) ? -make_atom(fn, -arg) : make_atom(fn, arg);
  }
  return NormalForm();
}

const std::optional<NormalForm>& Derivation::of_atom(AtomId a) {
  auto it = memo_.find(a);
  if (it != memo_.end()) return it->second;
  const AtomInfo& info = registry().info(a);
  std::optional<NormalForm> result;
  NormalForm handled;
  if (rule_(a, info, handled)) {
    if (!handled.is_zero()) result = std::move(handled);
  } else if (info.kind == AtomKind::Transcendental) {
    const NormalForm& arg = *info.arg;
    NormalForm d = (*this)(arg);
    if (!d.is_zero()) {
      switch (info.fn) {
        case Transcendental::Log: result = d / arg; break;
        case Transcendental::Exp: result = NormalForm::atom(a) * d; break;
        case Transcendental::Sin: result = NormalForm::atom(info.partner) * d; break;
        case Transcendental::Cos: result = -(NormalForm::atom(info.partner) * d); break;
        case Transcendental::Arctan: result = d / (NormalForm(1) + arg * arg); break;
      }
    }
  }
  return memo_.emplace(a, std::move(result)).first->second;
}

NormalForm Derivation::of_poly(const Poly& p) {
  PolyAccumulator fast;
  std::map<AtomId, PolyAccumulator> slow;
  for (const auto& [m, c] : p.terms()) {
    for (const auto& [a, e] : m.factors()) {
      const auto& img = of_atom(a);
      if (!img) continue;
      Monomial rest = m * Monomial::atom(a, -1);
      const Poly& n = img->numerator();
      if (img->is_polynomial() && n.size() == 1) {
        fast.add(rest * n.leading().first, c * e * n.leading().second);
      } else {
        slow[a].add(rest, c * e);
      }
    }
  }
  NormalForm out(fast.finish());
  for (auto& [a, acc] : slow) out += NormalForm(acc.finish()) * *of_atom(a);
  return out;
}

NormalForm Derivation::operator()(const NormalForm& f) {
  if (f.is_polynomial()) return of_poly(f.numerator());
  NormalForm out = of_poly(f.numerator()) * NormalForm(Poly(1), f.denominator());
  NormalForm logDerivative;
  auto& fr = FactorRegistry::instance();
  for (const auto& [id, e] : f.denominator()) {
    NormalForm dq = of_poly(fr.get(id));
    if (dq.is_zero()) continue;
    logDerivative -= NormalForm(e) * dq / NormalForm(fr.get(id));
  }
  if (!logDerivative.is_zero()) out += f * logDerivative;
  return out;
}

int argument_position(const AtomInfo& jet, AtomId v) {
  const auto& args = registry().function_info(jet.function).args;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == v) return static_cast<int>(i);
  }
  return -1;
}

AtomId jet_shift(AtomId jetAtom, const std::vector<int>& extra) {
  const AtomInfo& info = registry().info(jetAtom);
  std::vector<int> idx = info.index;
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] += extra[i];
  return registry().jet(info.function, std::move(idx));
}

namespace {

NormalForm shifted_jet(AtomId a, const AtomInfo& info, int pos) {
  std::vector<int> extra(info.index.size(), 0);
  extra[static_cast<std::size_t>(pos)] = 1;
  return NormalForm::atom(jet_shift(a, extra));
}

}  // namespace

NormalForm diff(const NormalForm& f, AtomId v) {
  Derivation d([v](AtomId a, const AtomInfo& info, NormalForm& out) {
    if (a == v) {
      out = NormalForm(1);
      return true;
    }
    if (info.kind != AtomKind::Jet) return false;
    int pos = argument_position(info, v);
    if (pos < 0) return true;
    if (registry().function_info(info.function).role == FunctionRole::Coefficient) {
      throw Error("total derivative of an unspecified coefficient function");
    }
    out = shifted_jet(a, info, pos);
    return true;
  });
  return d(f);
}

NormalForm partial_atom(const NormalForm& f, AtomId target) {
  Derivation d([target](AtomId a, const AtomInfo& info, NormalForm& out) {
    if (a == target) {
      out = NormalForm(1);
      return true;
    }
    return info.kind != AtomKind::Transcendental;
  });
  return d(f);
}

NormalForm explicit_partial(const NormalForm& f, AtomId v) {
  Derivation d([v](AtomId a, const AtomInfo& info, NormalForm& out) {
    if (a == v) {
      out = NormalForm(1);
      return true;
    }
    if (info.kind != AtomKind::Jet) return false;
    if (registry().function_info(info.function).role != FunctionRole::Auxiliary) return true;
    int pos = argument_position(info, v);
    if (pos >= 0) out = shifted_jet(a, info, pos);
    return true;
  });
  return d(f);
}

NormalForm substitute(const NormalForm& f, const SubstitutionMap& rules) {
  if (rules.empty()) return f;
  auto& reg = registry();
  std::unordered_map<AtomId, std::optional<NormalForm>> images;
  auto image = [&](AtomId a) -> const std::optional<NormalForm>& {
    auto it = images.find(a);
    if (it != images.end()) return it->second;
    std::optional<NormalForm> img;
    auto r = rules.find(a);
    if (r != rules.end()) {
      img = r->second;
    } else {
      const AtomInfo& info = reg.info(a);
      if (info.kind == AtomKind::Transcendental) {
        NormalForm arg = substitute(*info.arg, rules);
        if (arg != *info.arg) img = apply_function(info.fn, arg);
      }
    }
    return images.emplace(a, std::move(img)).first->second;
  };

  std::unordered_map<Monomial, PolyAccumulator, MonomialHash> groups;
  PolyAccumulator untouched;
  for (const auto& [m, c] : f.numerator().terms()) {
    Monomial::Factors changed, kept;
    for (const auto& fac : m.factors()) {
      if (image(fac.first)) {
        changed.push_back(fac);
      } else {
        kept.push_back(fac);
      }
    }
    if (changed.empty()) {
      untouched.add(m, c);
    } else {
      groups[Monomial::from_factors(changed)].add(Monomial::from_factors(kept), c);
    }
  }
  NormalForm num(untouched.finish());
  for (auto& [cm, acc] : groups) {
    NormalForm part(acc.finish());
    for (const auto& [a, e] : cm.factors()) part *= image(a)->pow(e);
    num += part;
  }
  NormalForm::Den kept;
  NormalForm divisor(1);
  auto& fr = FactorRegistry::instance();
  for (const auto& [id, e] : f.denominator()) {
    const Poly& q = fr.get(id);
    bool touched = false;
    for (AtomId a : q.atoms()) touched = touched || image(a).has_value();
    if (touched) {
      divisor *= substitute(NormalForm(q), rules).pow(e);
    } else {
      kept.emplace_back(id, e);
    }
  }
  NormalForm out = num * NormalForm(Poly(1), std::move(kept));
  if (divisor != NormalForm(1)) out = out / divisor;
  return out;
}

std::vector<std::pair<Monomial, NormalForm>> collect(const NormalForm& f, const std::vector<AtomId>& indeterminates) {
  auto isInd = [&](AtomId a) {
    return std::find(indeterminates.begin(), indeterminates.end(), a) != indeterminates.end();
  };
  auto& fr = FactorRegistry::instance();
  for (const auto& [id, e] : f.denominator()) {
    for (AtomId a : fr.get(id).atoms()) {
      if (isInd(a)) throw NotPolynomial("indeterminate appears in a denominator");
    }
  }
  auto& reg = registry();
  for (AtomId a : f.numerator().atoms()) {
    const AtomInfo& info = reg.info(a);
    if (info.kind != AtomKind::Transcendental || isInd(a)) continue;
    for (AtomId b : indeterminates) {
      if (info.arg->depends_on(b)) throw NotPolynomial("indeterminate appears inside " + info.name);
    }
  }
  std::unordered_map<Monomial, PolyAccumulator, MonomialHash> groups;
  for (const auto& [m, c] : f.numerator().terms()) {
    Monomial::Factors ind, rest;
    for (const auto& fac : m.factors()) {
      if (isInd(fac.first)) {
        if (fac.second < 0) throw NotPolynomial("negative power of an indeterminate");
        ind.push_back(fac);
      } else {
        rest.push_back(fac);
      }
    }
    groups[Monomial::from_factors(ind)].add(Monomial::from_factors(rest), c);
  }
  std::vector<std::pair<Monomial, NormalForm>> out;
  for (auto& [m, acc] : groups) out.emplace_back(m, NormalForm(acc.finish(), f.denominator()));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return compare_display(a.first, b.first) > 0; });
  return out;
}

}  // namespace approxlie
