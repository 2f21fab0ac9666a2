#include "approxlie/poly.hpp"

#include <algorithm>
#include <map>

#include <boost/container_hash/hash.hpp>

#include "approxlie/errors.hpp"

namespace approxlie {

Monomial Monomial::atom(AtomId a, std::int32_t e) {
  Monomial m;
  if (e != 0) m.factors_.emplace_back(a, e);
  m.finish();
  return m;
}

Monomial Monomial::from_factors(Factors factors) {
  std::sort(factors.begin(), factors.end());
  Monomial m;
  for (const auto& [a, e] : factors) {
    if (!m.factors_.empty() && m.factors_.back().first == a) {
      m.factors_.back().second += e;
      if (m.factors_.back().second == 0) m.factors_.pop_back();
    } else if (e != 0) {
      m.factors_.emplace_back(a, e);
    }
  }
  m.finish();
  return m;
}

void Monomial::finish() {
  degree_ = 0;
  std::size_t h = 0;
  for (const auto& [a, e] : factors_) {
    degree_ += e;
    boost::hash_combine(h, a);
    boost::hash_combine(h, e);
  }
  hash_ = h;
}

std::int32_t Monomial::exponent(AtomId a) const {
  for (const auto& [b, e] : factors_) {
    if (b == a) return e;
    if (b > a) break;
  }
  return 0;
}

bool Monomial::has_negative() const {
  return std::any_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.second < 0; });
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial m;
  auto i = factors_.begin(), j = o.factors_.begin();
  while (i != factors_.end() || j != o.factors_.end()) {
    if (j == o.factors_.end() || (i != factors_.end() && i->first < j->first)) {
      m.factors_.push_back(*i++);
    } else if (i == factors_.end() || j->first < i->first) {
      m.factors_.push_back(*j++);
    } else {
      std::int32_t e = i->second + j->second;
      if (e != 0) m.factors_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  m.finish();
  return m;
}

Monomial Monomial::inverse() const { return pow(-1); }

Monomial Monomial::pow(std::int32_t n) const {
  Monomial m;
  if (n != 0) {
    m.factors_ = factors_;
    for (auto& f : m.factors_) f.second *= n;
  }
  m.finish();
  return m;
}

Monomial Monomial::without(AtomId a) const {
  Monomial m;
  for (const auto& f : factors_) {
    if (f.first != a) m.factors_.push_back(f);
  }
  m.finish();
  return m;
}

bool Monomial::divisible_by(const Monomial& o) const {
  auto i = factors_.begin();
  for (const auto& [a, e] : o.factors_) {
    while (i != factors_.end() && i->first < a) {
      ++i;
    }
    std::int32_t mine = (i != factors_.end() && i->first == a) ? i->second : 0;
    if (mine < e) return false;
  }
  // Atoms present here with negative exponent but absent in `o`.
  for (const auto& [a, e] : factors_) {
    if (e < 0 && o.exponent(a) == 0) return false;
  }
  return true;
}

Monomial Monomial::min_with(const Monomial& o) const {
  Monomial m;
  auto i = factors_.begin(), j = o.factors_.begin();
  while (i != factors_.end() || j != o.factors_.end()) {
    if (j == o.factors_.end() || (i != factors_.end() && i->first < j->first)) {
      if (i->second < 0) m.factors_.push_back(*i);
      ++i;
    } else if (i == factors_.end() || j->first < i->first) {
      if (j->second < 0) m.factors_.push_back(*j);
      ++j;
    } else {
      std::int32_t e = std::min(i->second, j->second);
      if (e != 0) m.factors_.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  m.finish();
  return m;
}

int compare_internal(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < fb.size()) {
    AtomId ida = i < fa.size() ? fa[i].first : ~AtomId{0};
    AtomId idb = j < fb.size() ? fb[j].first : ~AtomId{0};
    if (ida == idb) {
      if (fa[i].second != fb[j].second) return fa[i].second < fb[j].second ? -1 : 1;
      ++i;
      ++j;
    } else if (ida < idb) {
      return fa[i].second > 0 ? 1 : -1;
    } else {
      return fb[j].second > 0 ? -1 : 1;
    }
  }
  return 0;
}

int compare_display(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  auto& reg = registry();
  auto sorted = [&](const Monomial& m) {
    std::vector<std::pair<const std::string*, std::int32_t>> v;
    v.reserve(m.factors().size());
    for (const auto& [at, e] : m.factors()) v.emplace_back(&reg.info(at).sortKey, e);
    std::sort(v.begin(), v.end(), [](const auto& l, const auto& r) { return *l.first < *r.first; });
    return v;
  };
  auto va = sorted(a), vb = sorted(b);
  std::size_t i = 0, j = 0;
  while (i < va.size() || j < vb.size()) {
    if (i < va.size() && j < vb.size() && *va[i].first == *vb[j].first) {
      if (va[i].second != vb[j].second) return va[i].second < vb[j].second ? -1 : 1;
      ++i;
      ++j;
    } else if (j == vb.size() || (i < va.size() && *va[i].first < *vb[j].first)) {
      return va[i].second > 0 ? 1 : -1;
    } else {
      return vb[j].second > 0 ? -1 : 1;
    }
  }
  return 0;
}

namespace {

bool internal_greater(const Poly::Term& a, const Poly::Term& b) { return compare_internal(a.first, b.first) > 0; }

}  // namespace

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace_back(Monomial(), c);
}

Poly Poly::monomial(const Monomial& m, const Rational& c) {
  Poly p;
  if (c != 0) p.terms_.emplace_back(m, c);
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), internal_greater);
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().first == t.first) {
      p.terms_.back().second += t.second;
      if (p.terms_.back().second == 0) p.terms_.pop_back();
    } else if (t.second != 0) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }

std::optional<Rational> Poly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_[0].first.is_one()) return terms_[0].second;
  return std::nullopt;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin(), j = o.terms_.begin();
  while (i != terms_.end() || j != o.terms_.end()) {
    int c = i == terms_.end() ? -1 : j == o.terms_.end() ? 1 : compare_internal(i->first, j->first);
    if (c > 0) {
      r.terms_.push_back(*i++);
    } else if (c < 0) {
      r.terms_.push_back(*j++);
    } else {
      Rational s = i->second + j->second;
      if (s != 0) r.terms_.emplace_back(i->first, s);
      ++i;
      ++j;
    }
  }
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly();
  if (o.terms_.size() == 1) return shifted(o.terms_[0].first).scaled(o.terms_[0].second);
  if (terms_.size() == 1) return o.shifted(terms_[0].first).scaled(terms_[0].second);
  PolyAccumulator acc;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) acc.add(ma * mb, ca * cb);
  }
  return acc.finish();
}

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return Poly();
  Poly r = *this;
  for (auto& t : r.terms_) t.second *= c;
  return r;
}

Poly Poly::shifted(const Monomial& m) const {
  if (m.is_one()) return *this;
  Poly r;
  r.terms_.reserve(terms_.size());
  bool trig = false;
  for (const auto& [mono, c] : terms_) {
    r.terms_.emplace_back(mono * m, c);
  }
  for (const auto& [a, e] : m.factors()) {
    if (registry().info(a).kind == AtomKind::Transcendental && registry().info(a).fn == Transcendental::Sin) trig = true;
  }
  return trig ? reduce_trig(r) : r;
}

Poly Poly::pow(unsigned n) const {
  Poly result(1), base = *this;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

Monomial Poly::min_exponents() const {
  if (terms_.empty()) return Monomial();
  Monomial m = terms_[0].first;
  for (std::size_t k = 1; k < terms_.size(); ++k) m = m.min_with(terms_[k].first);
  return m;
}

std::vector<AtomId> Poly::atoms() const {
  std::vector<AtomId> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [a, e] : m.factors()) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Poly::contains(AtomId a) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.first.exponent(a) != 0; });
}

Poly Poly::partial(AtomId a) const {
  PolyAccumulator acc;
  Monomial inv = Monomial::atom(a, -1);
  for (const auto& [m, c] : terms_) {
    std::int32_t e = m.exponent(a);
    if (e != 0) acc.add(m * inv, c * e);
  }
  return acc.finish();
}

std::optional<Poly> Poly::divide_exact(const Poly& q) const {
  if (q.is_zero()) throw DivisionByZeroExpr("polynomial division by zero");
  if (is_zero()) return Poly();
  if (q.terms_.size() == 1) {
    Monomial inv = q.terms_[0].first.inverse();
    return shifted(inv).scaled(1 / q.terms_[0].second);
  }
  // Shift both to ordinary polynomials.
  Monomial sp = min_exponents().min_with(Monomial()).inverse();
  Monomial sq = q.min_exponents().min_with(Monomial()).inverse();
  Poly p1 = shifted(sp);
  Poly q1 = q.shifted(sq);
  const auto& [lq, lc] = q1.leading();
  const auto& [tq, tc] = q1.trailing();
  if (!p1.leading().first.divisible_by(lq) || !p1.trailing().first.divisible_by(tq)) return std::nullopt;
  if (p1.terms_.size() < 2) return std::nullopt;

  auto greater = [](const Monomial& a, const Monomial& b) { return compare_internal(a, b) > 0; };
  std::map<Monomial, Rational, decltype(greater)> rem(greater);
  for (const auto& t : p1.terms_) rem.emplace(t.first, t.second);
  std::vector<Term> quotient;
  while (!rem.empty()) {
    auto it = rem.begin();
    if (!it->first.divisible_by(lq)) return std::nullopt;
    Monomial tm = it->first * lq.inverse();
    Rational tcoef = it->second / lc;
    quotient.emplace_back(tm, tcoef);
    for (const auto& [qm, qc] : q1.terms_) {
      Monomial pm = qm * tm;
      auto [pos, inserted] = rem.try_emplace(pm, 0);
      pos->second -= qc * tcoef;
      if (pos->second == 0) rem.erase(pos);
    }
  }
  Poly result = Poly::from_terms(std::move(quotient));
  return result.shifted(sp.inverse() * sq);
}

std::size_t Poly::hash() const {
  std::size_t h = terms_.size();
  for (const auto& [m, c] : terms_) {
    boost::hash_combine(h, m.hash());
    boost::hash_combine(h, std::hash<std::string>()(c.get_str()));
  }
  return h;
}

void PolyAccumulator::add(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = map_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) map_.erase(it);
  }
}

void PolyAccumulator::add(const Poly& p, const Rational& scale) {
  for (const auto& [m, c] : p.terms()) add(m, c * scale);
}

void PolyAccumulator::add_product(const Poly& p, const Monomial& m, const Rational& c) {
  for (const auto& [pm, pc] : p.terms()) add(pm * m, pc * c);
}

Poly PolyAccumulator::finish() {
  std::vector<Poly::Term> terms;
  terms.reserve(map_.size());
  bool trig = false;
  auto& reg = registry();
  for (auto& [m, c] : map_) {
    for (const auto& [a, e] : m.factors()) {
      if (e >= 2) {
        const AtomInfo& info = reg.info(a);
        if (info.kind == AtomKind::Transcendental && info.fn == Transcendental::Sin) trig = true;
      }
    }
    terms.emplace_back(m, std::move(c));
  }
  map_.clear();
  Poly p = Poly::from_terms(std::move(terms));
  return trig ? reduce_trig(p) : p;
}

Poly reduce_trig(const Poly& p) {
  auto& reg = registry();
  std::vector<Poly::Term> work(p.terms().begin(), p.terms().end());
  std::vector<Poly::Term> out;
  bool changed = false;
  while (!work.empty()) {
    Poly::Term t = std::move(work.back());
    work.pop_back();
    AtomId sinAtom = 0;
    std::int32_t k = 0;
    for (const auto& [a, e] : t.first.factors()) {
      if (e >= 2) {
        const AtomInfo& info = reg.info(a);
        if (info.kind == AtomKind::Transcendental && info.fn == Transcendental::Sin) {
          sinAtom = a;
          k = e;
          break;
        }
      }
    }
    if (k == 0) {
      out.push_back(std::move(t));
      continue;
    }
    changed = true;
    AtomId cosAtom = reg.info(sinAtom).partner;
    Monomial rest = t.first.without(sinAtom) * Monomial::atom(sinAtom, k % 2);
    std::int32_t half = k / 2;
    mpz_class binom = 1;
    for (std::int32_t j = 0; j <= half; ++j) {
      Rational c = t.second * Rational(binom) * ((j % 2) ? -1 : 1);
      work.emplace_back(rest * Monomial::atom(cosAtom, 2 * j), c);
      binom = binom * (half - j) / (j + 1);
    }
  }
  if (!changed) return p;
  return Poly::from_terms(std::move(out));
}

}  // namespace approxlie
