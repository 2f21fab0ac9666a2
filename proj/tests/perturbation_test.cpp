#include <doctest.h>

#include <random>

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"
#include "approxlie/series.hpp"
#include "support/random_poly.hpp"

using namespace approxlie;

namespace {

AtomId sym(const char* name) { return parse(name).atom(); }

std::string random_poly(std::mt19937_64& rng) { return testing::random_poly(rng, {"x", "y", "u", "v"}); }

// Replaces every coefficient-function jet xi(k) with index tau by the tau-th
// derivative, with respect to the order-0 values, of the k-th eps-derivative
// at eps = 0 (k! times the eps^k component).
NormalForm realize(const NormalForm& f, const std::vector<NormalForm>& components, const JetSpace& space) {
  auto& reg = registry();
  SubstitutionMap rules;
  for (AtomId a : f.atoms()) {
    const AtomInfo& info = reg.info(a);
    if (info.kind != AtomKind::Jet) continue;
    const FunctionInfo& fi = reg.function_info(info.function);
    if (fi.role != FunctionRole::Coefficient) continue;
    NormalForm g = components.at(static_cast<std::size_t>(fi.order));
    for (int j = 2; j <= fi.order; ++j) g *= NormalForm(j);
    for (std::size_t i = 0; i < info.index.size(); ++i) {
      for (int r = 0; r < info.index[i]; ++r) g = partial_atom(g, space.expanded_value(i, 0));
    }
    rules.emplace(a, g);
  }
  return substitute(f, rules);
}

}  // namespace

TEST_CASE("expand_dependent examples") {
  JetSpace space = JetSpace::plane_flow();
  EpsSeries s = expand_dependent(nf("u"), space, 1);
  CHECK(s[0] == nf("u0"));
  CHECK(s[1] == nf("u1"));
  EpsSeries t = expand_dependent(nf("u*u_x"), space, 1);
  CHECK(t[0] == nf("u0*u0_x"));
  CHECK(t[1] == nf("u0*u1_x + u1*u0_x"));
  EpsSeries z = expand_dependent(nf("u_xy*p + eps*v^2"), space, 0);
  CHECK(z.order() == 0);
  CHECK(z[0] == nf("u0_xy*p0"));
  CHECK(to_string(s) == "u0 + eps*(u1)");
  CHECK_THROWS_AS(expand_dependent(nf("1/(1 + eps*u)"), space, 1), NotPolynomial);
}

TEST_CASE("expand_dependent rejects unknowns outside the system") {
  auto& reg = registry();
  FunctionId q = reg.function("zeta", {reg.x(), reg.y()}, FunctionRole::Dependent);
  NormalForm e = NormalForm::atom(reg.jet(q)) + nf("u");
  CHECK_THROWS_AS(expand_dependent(e, JetSpace::plane_flow(), 1), UnknownDependent);
  CHECK_THROWS_AS(JetSpace({reg.x()}, {*reg.find_function("u")}), UnknownDependent);
}

TEST_CASE("expand_dependent at order zero renames unknowns") {
  JetSpace space = JetSpace::plane_flow();
  NormalForm e = nf("u*v_xx - p_y/Re + sin(x)*u_y^2");
  EpsSeries s = expand_dependent(e, space, 0);
  CHECK(s[0] == nf("u0*v0_xx - p0_y/Re + sin(x)*u0_y^2"));
}

TEST_CASE("recursion operator examples") {
  JetSpace space = JetSpace::plane_flow();
  CHECK(recursion_R(nf("u0_y"), space, 1) == nf("u1_y"));
  CHECK(recursion_R(nf("u1"), space, 2) == nf("2*u2"));
  CHECK(recursion_R(nf("x*u0*v0"), space, 1) == nf("x*u1*v0 + x*u0*v1"));
  CHECK_THROWS_AS(recursion_R(nf("u1"), space, 1), OrderOverflow);

  // xi(1) + sum over beta of d xi(0)/d u0_beta * u1_beta
  AtomId xi0 = coefficient_function("xi", 0, {0, 0, 0}, space);
  NormalForm r = recursion_R(NormalForm::atom(xi0), space, 1);
  NormalForm expected = NormalForm::atom(coefficient_function("xi", 1, {0, 0, 0}, space)) +
                        NormalForm::atom(coefficient_function("xi", 0, {1, 0, 0}, space)) * nf("u1") +
                        NormalForm::atom(coefficient_function("xi", 0, {0, 1, 0}, space)) * nf("v1") +
                        NormalForm::atom(coefficient_function("xi", 0, {0, 0, 1}, space)) * nf("p1");
  CHECK(r == expected);
  CHECK_THROWS_AS(recursion_R(NormalForm::atom(coefficient_function("xi", 1, {0, 0, 0}, space)), space, 1),
                  OrderOverflow);
}

TEST_CASE("series arithmetic") {
  EpsSeries a = to_series(nf("1 + eps*x"), 1), b = to_series(nf("1 - eps*x"), 1);
  CHECK(a * b == EpsSeries::constant(1, 1));
  CHECK((a * EpsSeries(1)).is_zero());
  EpsSeries u = to_series(nf("u0 + eps*u1"), 1), v = to_series(nf("v0 + eps*v1"), 1);
  EpsSeries uv = u * v;
  CHECK(uv[0] == nf("u0*v0"));
  CHECK(uv[1] == nf("u0*v1 + u1*v0"));
  CHECK_THROWS_AS(a + EpsSeries(2), OrderMismatch);
  CHECK_THROWS_AS(a * EpsSeries(0), OrderMismatch);
  CHECK(to_series(nf("x + eps^3"), 2) == to_series(nf("x"), 2));
  CHECK(a.shifted(1) == to_series(nf("eps"), 1));
  CHECK_THROWS_AS(to_series(nf("exp(eps*x)"), 1), NotPolynomial);
  CHECK_THROWS_AS(to_series(nf("x/eps"), 1), NotPolynomial);
}

TEST_CASE("truncation homomorphism") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    int p = trial % 3;
    std::string ea = random_poly(rng) + " + eps*(" + random_poly(rng) + ") + eps^2*(" + random_poly(rng) + ")";
    std::string eb = random_poly(rng) + " + eps*(" + random_poly(rng) + ") + eps^3*x";
    EpsSeries a = to_series(nf(ea), p), b = to_series(nf(eb), p);
    EpsSeries ab = a * b;
    EpsSeries direct = to_series(nf("(" + ea + ")*(" + eb + ")"), p);
    CHECK(ab == direct);
    for (int k = 0; k <= p; ++k) {
      NormalForm sum;
      for (int i = 0; i <= k; ++i) sum += a[i] * b[k - i];
      CHECK((ab[k] - sum).is_zero());
    }
  }
}

TEST_CASE("recursion operator reproduces direct expansion of infinitesimals") {
  JetSpace space = JetSpace::plane_flow();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const int p = 2;
    std::vector<NormalForm> closed;
    for (int k = 0; k <= p; ++k) closed.push_back(nf(random_poly(rng)));
    NormalForm xi;
    for (int k = 0; k <= p; ++k) xi += closed[static_cast<std::size_t>(k)] * NormalForm::atom(registry().eps()).pow(k);
    EpsSeries direct = expand_dependent(xi, space, p);

    // Order-k components as functions of x and the order-0 values.
    std::vector<NormalForm> components;
    for (const NormalForm& c : closed) components.push_back(expand_dependent(c, space, 0)[0]);
    NormalForm tilde = NormalForm::atom(coefficient_function("xi", 0, {0, 0, 0}, space));
    for (int k = 0; k <= p; ++k) {
      CAPTURE(k);
      CHECK(realize(tilde, components, space) == direct[k]);
      if (k < p) tilde = recursion_R(tilde, space, p) * NormalForm(Rational(1, k + 1));
    }
  }
}

TEST_CASE("symbol lookup for expansion coefficients") {
  JetSpace space = JetSpace::plane_flow();
  CHECK(space.expanded_jet(0, 1, {1, 0}) == sym("u1_x"));
  CHECK(space.expanded_value(2, 3) == sym("p3"));
  auto cls = space.classify(*registry().find_function("v2"));
  REQUIRE(cls);
  CHECK(cls->first == 1);
  CHECK(cls->second == 2);
}
