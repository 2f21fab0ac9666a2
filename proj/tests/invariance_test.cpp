#include <doctest.h>

#include <random>
#include <tuple>

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"
#include "approxlie/model.hpp"

using namespace approxlie;

namespace {

AtomId sym(const char* name) { return parse(name).atom(); }

const PdeSystem& system() {
  static const PdeSystem s = creeping_system();
  return s;
}

const OnShellRules& rules1() {
  static const OnShellRules r = onshell_rules(system(), 1);
  return r;
}

const std::vector<Generator>& generators() {
  static const std::vector<Generator> g = catalog_generators(generic_f1(), generic_f2());
  return g;
}

}  // namespace

TEST_CASE("on-shell rules of the creeping flow system") {
  const OnShellRules& r = rules1();
  REQUIRE(r.find(sym("v0_y")));
  CHECK(*r.find(sym("v0_y")) == nf("-u0_x"));
  CHECK(*r.find(sym("v0_yy")) == nf("-u0_xy"));
  CHECK(*r.find(sym("p0_x")) == nf("(u0_xx + u0_yy)/Re"));
  CHECK(*r.find(sym("v1_y")) == nf("-u1_x"));
  CHECK(r.find(sym("v0_yyyy")) != nullptr);
  CHECK(r.find(sym("v0_yyyyy")) == nullptr);
  // Right-hand sides are fully reduced.
  for (AtomId l : r.lhs) {
    for (AtomId a : r.rules.at(l).atoms()) CHECK(r.find(a) == nullptr);
  }
  // Each expanded equation vanishes on-shell.
  for (const auto& e : system().equations) {
    EpsSeries s = expand_dependent(e, system().space, 1);
    CHECK(r.reduce(s).is_zero());
  }
}

TEST_CASE("leading derivative choices are checked") {
  PdeSystem s = system();
  s.leading[2] = sym("p_xy");
  CHECK_THROWS_AS(s.validate(), InconsistentChoice);
  PdeSystem t = system();
  t.equations[0] = nf("u_x + v_y^2");
  CHECK_THROWS_AS(onshell_rules(t, 1), NotAffine);
}

TEST_CASE("translations and pressure shift have zero residual") {
  for (int i : {0, 1, 2}) {
    auto res = invariance_residual(system(), generators()[static_cast<std::size_t>(i)], rules1());
    for (const auto& s : res) CHECK(s.is_zero());
  }
}

TEST_CASE("the nine generators verify at first order") {
  NormalForm constraint = constraint_residual(generic_f1(), generic_f2());
  for (std::size_t i = 0; i < 9; ++i) {
    CAPTURE(i + 1);
    VerificationReport r = i == 8 ? verify_generator(system(), generators()[i], {constraint})
                                  : verify_generator(system(), generators()[i], rules1());
    CHECK(r.pass);
    if (!r.pass) MESSAGE(to_text(r.determining, system()));
  }
}

TEST_CASE("Xi_9 fails without the constraint and its residual is proportional to it") {
  VerificationReport r = verify_generator(system(), generators()[8], rules1());
  CHECK_FALSE(r.pass);
  auto res = invariance_residual(system(), generators()[8], rules1());
  NormalForm c = constraint_residual(generic_f1(), generic_f2());
  for (const auto& s : res) {
    CHECK(s[0].is_zero());
    if (s[1].is_zero()) continue;
    NormalForm ratio = s[1] / c;
    CHECK(ratio.constant_value().has_value());
  }
}

TEST_CASE("scaled and zero-order generators") {
  for (std::size_t i : {5, 6, 7}) {
    Generator eg = generators()[i].eps_multiple();
    CHECK(verify_generator(system(), eg, rules1()).pass);
  }
  PdeSystem s0 = system().unperturbed();
  OnShellRules r0 = onshell_rules(s0, 0);
  for (std::size_t i : {0, 1, 2, 7}) {
    CAPTURE(i + 1);
    Generator g0 = generators()[i].zero_order().with_order(0);
    CHECK(verify_generator(s0, g0, r0).pass);
  }
}

TEST_CASE("corrupted scaling is detected") {
  Generator bad = generators()[7];
  bad.eta(0, 0) = nf("2*u0");
  DeterminingSet d = determining_equations(invariance_residual(system(), bad, rules1()), system());
  CHECK_FALSE(d.empty());
  CHECK(determining_equations({EpsSeries(1)}, system()).empty());
}

TEST_CASE("random single-coefficient mutations are detected") {
  std::mt19937_64 rng(61);
  const Rational factors[] = {Rational(2), Rational(3), Rational(-1), Rational(1, 2), Rational(0)};
  std::uniform_int_distribution<int> which(5, 7), factor(0, 4);
  int caught = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    Generator g = generators()[static_cast<std::size_t>(which(rng))];
    // Nonzero slots as (is_xi, component, order).
    std::vector<std::tuple<bool, std::size_t, int>> slots;
    for (std::size_t i = 0; i < 2; ++i) {
      for (int k = 0; k <= 1; ++k) {
        if (!g.xi(i, k).is_zero()) slots.emplace_back(true, i, k);
      }
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (int k = 0; k <= 1; ++k) {
        if (!g.eta(a, k).is_zero()) slots.emplace_back(false, a, k);
      }
    }
    auto [isXi, c, k] = slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)];
    NormalForm& slot = isXi ? g.xi(c, k) : g.eta(c, k);
    std::vector<Poly::Term> terms = slot.numerator().terms();
    auto& term = terms[std::uniform_int_distribution<std::size_t>(0, terms.size() - 1)(rng)];
    term.second *= factors[factor(rng)];
    slot = NormalForm(Poly::from_terms(terms), slot.denominator());
    CAPTURE(to_string(g));
    bool pass = verify_generator(system(), g, rules1()).pass;
    CHECK_FALSE(pass);
    if (!pass) ++caught;
  }
  CHECK(caught == trials);
}

TEST_CASE("surface conditions") {
  Generator dp = generators()[2];
  auto c = surface_conditions(dp);
  REQUIRE(c.size() == 6);
  CHECK(c[0].is_zero());
  CHECK(c[2].is_zero());
  CHECK(is_inconsistent(c[4]));
  CHECK_FALSE(is_inconsistent(c[5]));
  auto s = surface_conditions(generators()[7]);
  CHECK(s[0] == nf("x*u0_x + y*u0_y - u0"));
  CHECK(s[1] == nf("x*u1_x + y*u1_y - u1"));
}

TEST_CASE("pressure rules record the compatibility condition") {
  const auto& conds = rules1().integrability;
  NormalForm vorticity = nf("(2*u0_xxy + u0_yyy - v0_xxx)/Re");
  bool found = false;
  for (const auto& c : conds) found = found || c == vorticity || c == -vorticity;
  CHECK(found);
}
