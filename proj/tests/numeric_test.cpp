#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "approxlie/errors.hpp"
#include "approxlie/numeric.hpp"
#include "support/random_expr.hpp"

using namespace approxlie;

namespace {

const std::vector<double> kEps = {1e-1, 1e-2, 1e-3, 1e-4};

const SubstitutionMap& params() {
  static const SubstitutionMap m = parameter_substitution(default_parameters());
  return m;
}

const PdeSystem& numeric_system() {
  static const PdeSystem s = bind_system(creeping_system(), params());
  return s;
}

SolutionFamily numeric_family(FamilyId id) { return bind_parameters(*repair(solution_family(id)), params()); }

}  // namespace

TEST_CASE("evaluation examples") {
  AtomId x = registry().x(), y = registry().y();
  CHECK(eval(parse("x^2 + y"), {{x, 2}, {y, 1}}) == 5.0);
  CHECK(eval(parse("arctan(y/x)"), {{x, 1}, {y, 1}}) == doctest::Approx(0.7853981633974483).epsilon(1e-15));
  CHECK_THROWS_AS(eval(parse("1/x"), {{x, 0}}), NumericSingularity);
  CHECK_THROWS_AS(eval(parse("x + y"), {{x, 0}}), MissingBinding);
  CompiledExpr<double> c(nf("x^2 + y"));
  CHECK(c(Bindings{{x, 2.0}, {y, 1.0}}) == 5.0);
  CHECK_THROWS_AS(CompiledExpr<double>(nf("1/x"))(Bindings{{x, 0.0}}), NumericSingularity);
  CHECK_THROWS_AS(CompiledExpr<double>(nf("log(x)"))(Bindings{{x, -1.0}}), NumericSingularity);
  CompiledExpr<Quad> q(nf("arctan(y/x)"));
  Quad quarterPi = q({{x, Quad(1)}, {y, Quad(1)}});
  CHECK(static_cast<double>(abs(quarterPi * 4 - boost::multiprecision::acos(Quad(-1)))) < 1e-32);
}

TEST_CASE("compiled evaluation agrees with the tree evaluator") {
  testing::RandomExpr gen(17);
  AtomId x = registry().x(), y = registry().y();
  Bindings b{{x, 0.8}, {y, -0.3}, {registry().parameter("k1"), 0.7}, {registry().parameter("a2"), -0.4}};
  std::unordered_map<AtomId, Quad> bq;
  for (auto [a, v] : b) bq[a] = Quad(v);
  for (int i = 0; i < 200; ++i) {
    NormalForm n = normalize(gen(3));
    double tree = eval(to_expr(n), b);
    CAPTURE(to_string(n));
    CHECK(CompiledExpr<double>(n)(b) == doctest::Approx(tree).epsilon(1e-12));
    CHECK(static_cast<double>(CompiledExpr<Quad>(n)(bq)) == doctest::Approx(tree).epsilon(1e-12));
  }
}

TEST_CASE("finite difference oracle") {
  AtomId x = registry().x(), y = registry().y();
  CHECK(fd_check(nf("x^3"), x, {{x, 2.0}}) < 1e-9);
  CHECK(fd_check(nf("7/3"), x, {{x, 2.0}}) == 0.0);
  SolutionFamily s = numeric_family(FamilyId::SCALE_I);
  NormalForm u = s.u.to_normal_form(registry().eps());
  u = substitute(u, {{registry().eps(), nf("1/10")}});
  CHECK(fd_check(u, x, {{x, 1.3}, {y, 0.7}}) < 1e-6);
  CHECK(fd_check(u, y, {{x, 1.3}, {y, 0.7}}) < 1e-6);
  // Every expression class of the kernel.
  testing::RandomExpr gen(23);
  Bindings b{{x, 0.6}, {y, 0.9}, {registry().parameter("k1"), 0.7}, {registry().parameter("a2"), -0.4}};
  for (int i = 0; i < 300; ++i) {
    NormalForm n = normalize(gen(3));
    CAPTURE(to_string(n));
    CHECK(fd_check(n, i % 2 ? x : y, b) < 1e-6);
  }
}

TEST_CASE("family derivatives against finite differences") {
  for (FamilyId id : all_families()) {
    CAPTURE(to_string(id));
    SamplePlan plan = default_plan(id);
    plan.count = 20;
    CHECK(family_fd_error(numeric_family(id), plan) < 1e-6);
  }
}

TEST_CASE("symbolically zero residuals are numerically small") {
  for (FamilyId id : all_families()) {
    CAPTURE(to_string(id));
    CHECK(magnitude_ratio(numeric_family(id), numeric_system(), default_plan(id)) < 1e-9);
  }
  SolutionFamily unrepaired = bind_parameters(solution_family(FamilyId::TRASL_I), params());
  CHECK(magnitude_ratio(unrepaired, numeric_system(), default_plan(FamilyId::TRASL_I)) > 1e-3);
}

TEST_CASE("sample plans") {
  SamplePlan p = default_plan(FamilyId::SCALE_I);
  CHECK(p.xMin == 0.5);
  CHECK(p.yMax == 1.0);
  CHECK(default_plan(FamilyId::TRASL_II).xMin == -2.0);
  auto pts = sample_points(p);
  CHECK(pts.size() == 64);
  for (auto [x, y] : pts) {
    CHECK(x >= 0.5);
    CHECK(x <= 2.5);
    CHECK(std::abs(y) <= 1.0);
  }
  CHECK(sample_points(p) == pts);
  SamplePlan bad = p;
  bad.xMin = -1;
  CHECK_THROWS_AS(validate_plan(bad, solution_family(FamilyId::SCALE_I)), ConfigError);
  CHECK_NOTHROW(validate_plan(bad, solution_family(FamilyId::TRASL_I)));
}

TEST_CASE("eps sweep") {
  SolutionFamily t = numeric_family(FamilyId::TRASL_I);
  SweepResult r = eps_sweep(t, numeric_system(), kEps, default_plan(FamilyId::TRASL_I));
  CHECK(r.residualNorms.size() == 4);
  CHECK_FALSE(r.exact);
  CHECK(r.slope >= 1.95);
  CHECK(r.slope <= 2.05);
  SweepResult c = eps_sweep(zero_order_truncation(t), numeric_system(), kEps, default_plan(FamilyId::TRASL_I));
  CHECK(c.slope >= 0.95);
  CHECK(c.slope <= 1.05);
  SubstitutionMap onlyC2;
  for (const char* n : {"k1", "k2", "k3", "c1", "c3", "c4", "c5", "c6", "c7", "c8", "a1", "a2", "a3", "a4", "a5", "a7"}) {
    onlyC2.emplace(parse(n).atom(), NormalForm());
  }
  SolutionFamily s0 = bind_parameters(solution_family(FamilyId::SCALE_I), onlyC2);
  s0 = bind_parameters(s0, params());
  SweepResult e = eps_sweep(s0, numeric_system(), kEps, default_plan(FamilyId::SCALE_I));
  CHECK(e.exact);
  for (double v : e.residualNorms) CHECK(v < 1e-12);
  CHECK_THROWS_AS(eps_sweep(t, numeric_system(), {}, default_plan(FamilyId::TRASL_I)), ConfigError);
  CHECK_THROWS_AS(eps_sweep(t, numeric_system(), {1e-3, 1e-2}, default_plan(FamilyId::TRASL_I)), ConfigError);
  CHECK_THROWS_AS(eps_sweep(solution_family(FamilyId::TRASL_I), numeric_system(), kEps, default_plan(FamilyId::TRASL_I)),
                  MissingBinding);
}

TEST_CASE("sweeps are deterministic across thread counts") {
  SolutionFamily t = numeric_family(FamilyId::TRASL_II);
  setenv("APPROXLIE_THREADS", "1", 1);
  SweepResult one = eps_sweep(t, numeric_system(), kEps, default_plan(FamilyId::TRASL_II));
  setenv("APPROXLIE_THREADS", "4", 1);
  SweepResult four = eps_sweep(t, numeric_system(), kEps, default_plan(FamilyId::TRASL_II));
  unsetenv("APPROXLIE_THREADS");
  CHECK(one.residualNorms == four.residualNorms);
  CHECK(one.slope == four.slope);
  SweepResult quad = eps_sweep(t, numeric_system(), kEps, default_plan(FamilyId::TRASL_II), Precision::Quad);
  CHECK(quad.slope == doctest::Approx(one.slope).epsilon(1e-6));
}
