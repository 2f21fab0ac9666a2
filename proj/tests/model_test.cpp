#include <doctest.h>

#include <set>

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"
#include "approxlie/model.hpp"

using namespace approxlie;

namespace {

const PdeSystem& system() {
  static const PdeSystem s = creeping_system();
  return s;
}

}  // namespace

TEST_CASE("unperturbed system is the creeping Stokes form") {
  PdeSystem s0 = system().unperturbed();
  CHECK(s0.equations[0] == nf("u_x + v_y"));
  CHECK(s0.equations[1] == nf("p_x - (u_xx + u_yy)/Re"));
  CHECK(s0.equations[2] == nf("p_y - (v_xx - u_xy)/Re"));
}

TEST_CASE("eps part of the x-momentum equation has the displayed coefficients") {
  EpsSeries s = to_series(system().equations[1], 1);
  auto terms = s[1].numerator().terms();
  REQUIRE(terms.size() == 9);
  std::multiset<Rational> coeffs;
  for (const auto& [m, c] : terms) coeffs.insert(-c);
  CHECK(coeffs == std::multiset<Rational>{5, 1, 1, 1, 1, 2, 1, 1, 1});
}

TEST_CASE("linear stagnation flow is an exact solution") {
  SubstitutionMap sol;
  AtomId x = registry().x(), y = registry().y();
  auto& reg = registry();
  for (const char* name : {"u", "v", "p"}) {
    FunctionId f = *reg.find_function(name);
    NormalForm value = std::string(name) == "u" ? nf("c*x") : std::string(name) == "v" ? nf("-c*y") : nf("q");
    for (int i = 0; i <= 3; ++i) {
      for (int j = 0; i + j <= 3; ++j) {
        NormalForm d = value;
        for (int r = 0; r < i; ++r) d = diff(d, x);
        for (int r = 0; r < j; ++r) d = diff(d, y);
        sol.emplace(reg.jet(f, {i, j}), d);
      }
    }
  }
  for (const auto& e : system().equations) CHECK(substitute(e, sol).is_zero());
}

TEST_CASE("generator catalog entries") {
  auto g = catalog_generators(generic_f1(), generic_f2());
  REQUIRE(g.size() == 9);
  CHECK(g[6].xi(0, 1) == nf("x"));
  CHECK(g[6].xi(1, 1) == nf("y"));
  CHECK(g[6].eta(2, 1) == nf("-p0"));
  CHECK(g[8].eta(0, 1) == nf("f1_yy"));
  CHECK(g[8].eta(1, 1) == nf("-f1_xy"));
  CHECK(g[8].eta(2, 1) == nf("f2 - (f1_xyy + f1_xxx)/Re"));
  Generator xi2(JetSpace::plane_flow(), 1);
  xi2.xi(1, 0) = 1;
  CHECK(g[1] == xi2);
  CHECK(g[3] == g[0].eps_multiple());
}

TEST_CASE("constraint residual") {
  CHECK(constraint_residual(nf("x^4"), NormalForm()) == nf("-24/Re"));
  CHECK(constraint_residual(generic_f1(), generic_f2()) == nf("f2_x - (f1_xxxx + 2*f1_xxyy + f1_yyyy)/Re"));
  for (CaseId id : {CaseId::I, CaseId::II, CaseId::III}) {
    CAPTURE(to_string(id));
    AnsatzCase c = ansatz_case(id, symbolic_a(), symbolic_b());
    CHECK(constraint_residual(c.f1, c.f2).is_zero());
    AnsatzCase h = ansatz_case(id, symbolic_a(), symbolic_b(), nf("sin(x) + x^5"));
    CHECK(constraint_residual(h.f1, h.f2).is_zero());
  }
}

TEST_CASE("ansatz case instances") {
  std::array<NormalForm, 7> a{};
  a[0] = 1;
  a[2] = 1;
  AnsatzCase ii = ansatz_case(CaseId::II, a, 1);
  CHECK(ii.f1 == nf("cos(x)*exp(y)"));
  CHECK(constraint_residual(ii.f1, ii.f2).is_zero());
  std::array<NormalForm, 7> a2{};
  a2[1] = 1;
  a2[3] = 1;
  AnsatzCase iii = ansatz_case(CaseId::III, a2, 1);
  CHECK(iii.f1 == nf("exp(-x)*sin(y)"));
  CHECK(constraint_residual(iii.f1, iii.f2).is_zero());
  std::array<NormalForm, 7> a3{};
  a3[2] = 1;
  AnsatzCase i = ansatz_case(CaseId::I, a3, 0);
  CHECK(i.G.is_zero());
  CHECK(i.f1 == i.H);
  CHECK_THROWS_AS(ansatz_case(CaseId::II, a, 0), InvalidCaseParams);
  CHECK_THROWS_AS(ansatz_case(CaseId::III, a, 0), InvalidCaseParams);
  CHECK_THROWS_AS(case_from_string("IV"), InvalidCaseParams);
}

TEST_CASE("Xi_9 verifies for every ansatz case") {
  OnShellRules base = onshell_rules(system(), 1);
  for (CaseId id : {CaseId::I, CaseId::II, CaseId::III}) {
    CAPTURE(to_string(id));
    AnsatzCase c = ansatz_case(id, symbolic_a(), symbolic_b());
    auto g = catalog_generators(c.f1, c.f2);
    VerificationReport r = verify_generator(system(), g[8], base);
    CHECK(r.pass);
    if (!r.pass) MESSAGE(to_text(r.determining, system()));
  }
}

TEST_CASE("commutators of the catalog close and satisfy the Jacobi identity") {
  std::array<NormalForm, 7> a{1, 2, 3, -1, 1, 2, 5};
  AnsatzCase c = ansatz_case(CaseId::I, a, 0);
  auto g = catalog_generators(c.f1, c.f2);
  OnShellRules base = onshell_rules(system(), 1);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = i + 1; j < 9; ++j) {
      CAPTURE(i + 1);
      CAPTURE(j + 1);
      Generator ij = commutator(g[i], g[j]);
      CHECK((ij + commutator(g[j], g[i])).is_zero());
      CHECK(verify_generator(system(), ij, base).pass);
    }
  }
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t j = i + 1; j < 9; ++j) {
      for (std::size_t k = j + 1; k < 9; ++k) {
        Generator jac = commutator(g[i], commutator(g[j], g[k])) + commutator(g[j], commutator(g[k], g[i])) +
                        commutator(g[k], commutator(g[i], g[j]));
        CHECK(jac.is_zero());
      }
    }
  }
  CHECK(commutator(g[3], g[7]) == g[3]);
  CHECK(commutator(g[0], g[1]).is_zero());
}
