#include "approxlie/solutions.hpp"

#include <functional>

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"

namespace approxlie {

namespace {

// Expands the shorthands W = (y - k1*x) and K = (k1^2 + 1).
std::string expand(const std::string& text) {
  std::string out;
  for (char ch : text) {
    if (ch == 'W') {
      out += "(y - k1*x)";
    } else if (ch == 'K') {
      out += "(k1^2 + 1)";
    } else {
      out += ch;
    }
  }
  return out;
}

EpsSeries series_of(const std::string& text) { return to_series(nf(expand(text)), 1); }

const char* const kScaleU =
    "k1*Re/2*y*arctan(y/x) + c2*x + c1*y"
    " + eps*(((k2 - k3)/2*((k1*(log((y/x)^2 + 1)/2 + log(x)) + c4)*Re*y + (c1 + c3)*x - 2*c2*y)"
    " - a1*a4*x - (3*a2*a3 + Re/2*(k1*k3 + a7))*y)*arctan(y/x)"
    " + (k2 - k3)*(c2*x + c1*y)*(log((y/x)^2 + 1)/2 + log(x)) + c6*x + (c5 - c1*(k2 - k3))*y)";
const char* const kScaleV =
    "-k1*Re/2*x*arctan(y/x) + (k1*Re/2 - c2)*y + c3*x"
    " + eps*((-(k2 - k3)/2*((k1*(log((y/x)^2 + 1)/2 + log(x)) + c4)*Re*x + 2*c2*x + (c1 + c3)*y)"
    " + a1*a4*y + (3*a2*a3 + Re/2*(k1*k2 + a7))*x)*arctan(y/x)"
    " + ((k2 - k3)*(c3*x + (k1*Re/2 - c2)*y) - 2*a1*a4*x)*(log((y/x)^2 + 1)/2 + log(x))"
    " - 3*a1*a3*x^2 + c7*x - (c6 - Re/2*(c4*(k2 - k3) - k1*k2 - a7) + 3*a2*a3)*y + a1*a5)";
const char* const kScaleP =
    "k1*(log((y/x)^2 + 1)/2 + log(x)) + c4"
    " + eps*(-k1/2*(k2 - k3)*arctan(y/x)^2 + k1/8*(k2 - k3)*log((y/x)^2 + 1)^2"
    " + ((k2 - k3)*(c3 - c1) - 2*a1*a4)/Re*arctan(y/x)"
    " + ((k2 - k3)/2*(k1*log(x) + c4) - k1*k3/2 - 3*a2*a3/Re - a7/2)*log((y/x)^2 + 1)"
    " + k1/2*(k2 - k3)*log(x)^2 + (c4*(k2 - k3) - k1*k3 - 6*a2*a3/Re - a7)*log(x)"
    " + k1*Re*x/(x^2 + y^2)*((4*c2 - k1*Re)*x + 2*(c1 + c3)*y) - 6*a1*a3/Re*y + c8)";

const char* const kTraslU0 = "k2*Re/(2*K^2)*W^2 + c1*W + c2";
const char* const kTraslV0 = "k1*k2*Re/(2*K^2)*W^2 + k1*c1*W + c3";
const char* const kTraslP0 = "k1*k2/K*W + k2*x + c4";

const char* const kTrasl1U =
    "-a1*a3/K^2*W^3 + (k2*Re*(k1*(3*k1*k3 - 4*k4) - k3)/(2*K^3) - (a7*Re + 2*(3*a2*a3 - a1*a4*k1))/(2*K^2))*W^2"
    " + (k2*Re*(k1*k3 - k4)/K^2*x + c5)*W + c1*(k1*k3 - k4)*x + c6";
const char* const kTrasl1V =
    "-a1*a3*k1/K^2*W^3 + (k2*Re*(k4 + k1*(2*(k1^2 - 1)*k3 - 3*k1*k4))/(2*K^3)"
    " - k1*(a7*Re + 2*(3*a2*a3 - a1*a4*k1))/(2*K^2))*W^2"
    " + ((k1*k3 - k4)*(k1*k2*Re/K^2*x - c1) + k1*c5)*W - a1*(a3*x^3 + a4*x^2)"
    " + (k1*c1*(k1*k3 - k4) - a1*a5)*x + c7";
const char* const kTrasl1P =
    "k2^2*Re^2/K^2*W^2 + (k2*(2*c1*Re + k4*k1*(k1*k4 + 2*k3)/K^2) - (a7*k1*Re + 2*(3*a2*a3*k1 + a1*a4))/(Re*K))*W"
    " + 3*a1*a3/(Re*K)*(k1*(x^2 - y^2) - 2*x*y) - (a7 + 6*a2*a3/Re + k2*(k1*k4 + k3)/K)*x + c8";

// First-order parts shared by the cases II and III.
const char* const kTraslQuadU = "Re*(k2*(k1*(3*k1*k3 - 4*k4) - k3) - a7*K)/(2*K^3)*W^2 + (k2*Re*(k1*k3 - k4)/K^2*x + c5)*W";
const char* const kTraslQuadV =
    "Re*(k2*(k4 + k1*(2*(k1^2 - 1)*k3 - 3*k1*k4)) - a7*k1*K)/(2*K^3)*W^2"
    " + ((k1*k3 - k4)*(k1*k2*Re/K^2*x - c1) + k1*c5)*W";
const char* const kTraslQuadP =
    "k2^2*Re^2/K^2*W^2 + 2*k2*(c1*Re - (k1*k3 - k4)/K^2)*W - (k2*k3 + a7)/K*x - (k2*k4 + a7*k1)/K*y + c8";

// Case II trigonometric blocks.
const char* const kT2uS =
    "((a2*exp(-b*y)*(a5 - a6*k1) + a1*exp(b*y)*(a5 + a6*k1))/K*b*x"
    " + a2*exp(-b*y)*(b*(a3 - a4*k1)*K - a6*(k1^2 - 1) + 2*a5*k1)/K^2"
    " + a1*exp(b*y)*(b*(a3 + a4*k1)*K - a6*(k1^2 - 1) - 2*a5*k1)/K^2)*sin(b*x)";
const char* const kT2uC =
    "((a2*exp(-b*y)*(a6 + a5*k1) + a1*exp(b*y)*(a6 - a5*k1))/K*b*x"
    " + a2*exp(-b*y)*(b*(a4 + a3*k1)*K + a5*(k1^2 - 1) + 2*a6*k1)/K^2"
    " + a1*exp(b*y)*(b*(a4 - a3*k1)*K + a5*(k1^2 - 1) - 2*a6*k1)/K^2)*cos(b*x)";
const char* const kT2vS =
    "((a2*exp(-b*y)*(a6 + a5*k1) - a1*exp(b*y)*(a6 - a5*k1))/K*b*x"
    " + a2*exp(-b*y)*(b*(a4 + a3*k1)*K - a6*k1*(k1^2 - 1) + 2*a5*k1^2)/K^2"
    " - a1*exp(b*y)*(b*(a4 - a3*k1)*K + a6*k1*(k1^2 - 1) + 2*a5*k1^2)/K^2)*sin(b*x)";
const char* const kT2vC =
    "((a2*exp(-b*y)*(a5 - a6*k1) - a1*exp(b*y)*(a5 + a6*k1))/K*b*x"
    " + a2*exp(-b*y)*(b*(a3 - a4*k1)*K - a5*k1*(k1^2 - 1) - 2*a6*k1^2)/K^2"
    " - a1*exp(b*y)*(b*(a3 + a4*k1)*K + a5*k1*(k1^2 - 1) - 2*a6*k1^2)/K^2)*cos(b*x)";
const char* const kT2p =
    "2*b*(a2*exp(-b*y)*(a5 - a6*k1) + a1*exp(b*y)*(a5 + a6*k1))/(Re*K)*sin(b*x)"
    " - 2*b*(a2*exp(-b*y)*(a6 + a5*k1) + a1*exp(b*y)*(a6 - a5*k1))/(Re*K)*cos(b*x)";

// Case III trigonometric blocks.
const char* const kT3uS =
    "((a6*exp(-b*x)*(a2 - a1*k1) - a5*exp(b*x)*(a2 + a1*k1))/K*b*x"
    " + exp(-b*x)*(b*a4*(a2 - a1*k1)*K - a6*(a2*(k1^2 - 1) + 2*a1*k1))/K^2"
    " - exp(b*x)*(b*a3*(a2 + a1*k1)*K + a5*(a2*(k1^2 - 1) - 2*a1*k1))/K^2)*sin(b*y)";
const char* const kT3uC =
    "((a6*exp(-b*x)*(a1 + a2*k1) - a5*exp(b*x)*(a1 - a2*k1))/K*b*x"
    " + exp(-b*x)*(b*a4*(a1 + a2*k1)*K - a6*(a1*(k1^2 - 1) - 2*a2*k1))/K^2"
    " - exp(b*x)*(b*a3*(a1 - a2*k1)*K + a5*(a1*(k1^2 - 1) + 2*a2*k1))/K^2)*cos(b*y)";
const char* const kT3vS =
    "((a6*exp(-b*x)*(a1 + a2*k1) + a5*exp(b*x)*(a1 - a2*k1))/K*b*x"
    " + exp(-b*x)*(b*a4*(a1 + a2*k1)*K - a6*k1*(a2*(k1^2 - 1) + 2*a1*k1))/K^2"
    " + exp(b*x)*(b*a3*(a1 - a2*k1)*K - a5*k1*(a2*(k1^2 - 1) - 2*a1*k1))/K^2)*sin(b*y)";
const char* const kT3vC =
    "((a6*exp(-b*x)*(a2 - a1*k1) + a5*exp(b*x)*(a2 + a1*k1))/K*b*x"
    " + exp(-b*x)*(b*a4*(a2 - a1*k1)*K + a6*k1*(a1*(k1^2 - 1) - 2*a2*k1))/K^2"
    " + exp(b*x)*(b*a3*(a2 + a1*k1)*K + a5*k1*(a1*(k1^2 - 1) + 2*a2*k1))/K^2)*cos(b*y)";
const char* const kT3p =
    "2*b*(a6*exp(-b*x)*(a2 - a1*k1) - a5*exp(b*x)*(a2 + a1*k1))/(Re*K)*sin(b*y)"
    " + 2*b*(a6*exp(-b*x)*(a1 + a2*k1) - a5*exp(b*x)*(a1 - a2*k1))/(Re*K)*cos(b*y)";

const char* const kTraslLinU = "c1*(k1*k3 - k4)*x + c6";
const char* const kTraslLinV = "k1*c1*(k1*k3 - k4)*x + c7";

std::string plus(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " + ") + ("(" + p + ")");
  return out;
}

EpsSeries order_split(const std::string& zero, const std::string& one) {
  EpsSeries s(1);
  s[0] = nf(expand(zero));
  s[1] = nf(expand(one));
  return s;
}

std::vector<AtomId> constants(std::initializer_list<int> which) {
  std::vector<AtomId> out;
  for (int i : which) out.push_back(parse("c" + std::to_string(i)).atom());
  return out;
}

const char* const kEqName[] = {"continuity", "x-momentum", "y-momentum"};
const char* const kField[] = {"u", "v", "p"};

// All first-order-in-eps fields as functions of x and y.
std::array<const EpsSeries*, 3> fields(const SolutionFamily& f) { return {&f.u, &f.v, &f.p}; }

}  // namespace

std::string to_string(FamilyId f) {
  switch (f) {
    case FamilyId::SCALE_I: return "SCALE_I";
    case FamilyId::TRASL_I: return "TRASL_I";
    case FamilyId::TRASL_II: return "TRASL_II";
    case FamilyId::TRASL_III: return "TRASL_III";
    case FamilyId::BVP_MUD: return "BVP_MUD";
  }
  return "?";
}

FamilyId family_from_string(const std::string& s) {
  for (FamilyId f : all_families()) {
    if (to_string(f) == s) return f;
  }
  throw UnknownFamily("unknown solution family '" + s + "'");
}

std::vector<FamilyId> all_families() {
  return {FamilyId::SCALE_I, FamilyId::TRASL_I, FamilyId::TRASL_II, FamilyId::TRASL_III, FamilyId::BVP_MUD};
}

SolutionFamily solution_family(FamilyId id) {
  SolutionFamily f;
  f.id = id;
  switch (id) {
    case FamilyId::SCALE_I:
      f.caseId = CaseId::I;
      f.u = series_of(kScaleU);
      f.v = series_of(kScaleV);
      f.p = series_of(kScaleP);
      f.omega = nf("y/x");
      f.similarity = "scale";
      f.singularLocus = "x <= 0 (log x), origin";
      f.freeConstants = constants({1, 2, 3, 4, 5, 6, 7, 8});
      break;
    case FamilyId::TRASL_I:
      f.caseId = CaseId::I;
      f.u = order_split(kTraslU0, kTrasl1U);
      f.v = order_split(kTraslV0, kTrasl1V);
      f.p = order_split(kTraslP0, kTrasl1P);
      break;
    case FamilyId::TRASL_II:
      f.caseId = CaseId::II;
      f.u = order_split(kTraslU0, plus({kTraslQuadU, kT2uS, "-" + std::string(kT2uC), kTraslLinU}));
      f.v = order_split(kTraslV0, plus({kTraslQuadV, kT2vS, kT2vC, kTraslLinV}));
      f.p = order_split(kTraslP0, plus({kTraslQuadP, kT2p}));
      break;
    case FamilyId::TRASL_III:
      f.caseId = CaseId::III;
      f.u = order_split(kTraslU0, plus({kTraslQuadU, kT3uS, kT3uC, kTraslLinU}));
      f.v = order_split(kTraslV0, plus({kTraslQuadV, kT3vS, "-" + std::string(kT3vC), kTraslLinV}));
      f.p = order_split(kTraslP0, plus({kTraslQuadP, kT3p}));
      break;
    case FamilyId::BVP_MUD:
      f.caseId = CaseId::I;
      f.u = series_of("ushear*y + eps*(-a1*a4*x*arctan(y/x) + c5*y)");
      f.v = series_of(
          "-vsuction*x + eps*(-3*a1*a3*x^2 + c7*x + a1*a5 + a1*a4*(y*arctan(y/x) - x*log(x^2 + y^2)))");
      f.p = series_of("pfar + eps*(-2*a1*a4/Re*arctan(y/x) - 6*a1*a3/Re*y + c8)");
      f.omega = nf("y/x");
      f.similarity = "scale";
      f.singularLocus = "x <= 0";
      f.freeConstants = constants({5, 7, 8});
      break;
  }
  if (f.similarity.empty()) {
    f.omega = nf("y - k1*x");
    f.similarity = "translation";
    f.singularLocus = "none";
    f.freeConstants = constants({1, 2, 3, 4, 5, 6, 7, 8});
  }
  return f;
}

SolutionFamily bind_parameters(const SolutionFamily& fam, const SubstitutionMap& values) {
  SolutionFamily out = fam;
  auto sub = [&values](const NormalForm& c) { return substitute(c, values); };
  out.u = fam.u.map(sub);
  out.v = fam.v.map(sub);
  out.p = fam.p.map(sub);
  out.omega = sub(fam.omega);
  std::erase_if(out.freeConstants, [&values](AtomId a) { return values.count(a) > 0; });
  return out;
}

Generator xi_A(const NormalForm& k1, const NormalForm& k2, const NormalForm& k3, const NormalForm& f1,
               const NormalForm& f2) {
  JetSpace space = JetSpace::plane_flow();
  AtomId x = registry().x(), y = registry().y();
  Generator g(space, 1);
  g.xi(0, 0) = nf("x");
  g.xi(1, 0) = nf("y");
  g.xi(0, 1) = k3 * nf("x");
  g.xi(1, 1) = k3 * nf("y");
  g.eta(0, 0) = nf("u0");
  g.eta(0, 1) = nf("u1") + k2 * nf("u0") + diff(diff(f1, y), y);
  g.eta(1, 0) = nf("v0");
  g.eta(1, 1) = nf("v1") + k2 * nf("v0") - diff(diff(f1, x), y);
  g.eta(2, 0) = k1;
  NormalForm f1xy = diff(diff(f1, x), y);
  g.eta(2, 1) = (k2 - k3) * nf("p0") + f2 - (diff(f1xy, y) + diff(diff(diff(f1, x), x), x)) / nf("Re");
  return g;
}

Generator xi_B(const NormalForm& k1, const NormalForm& k2, const NormalForm& k3, const NormalForm& k4,
               const NormalForm& f1, const NormalForm& f2) {
  JetSpace space = JetSpace::plane_flow();
  AtomId x = registry().x(), y = registry().y();
  Generator g(space, 1);
  g.xi(0, 0) = 1;
  g.xi(1, 0) = k1;
  g.xi(0, 1) = k3;
  g.xi(1, 1) = k4;
  g.eta(0, 1) = diff(diff(f1, y), y);
  g.eta(1, 1) = -diff(diff(f1, x), y);
  g.eta(2, 0) = k2;
  NormalForm f1xy = diff(diff(f1, x), y);
  g.eta(2, 1) = f2 - (diff(f1xy, y) + diff(diff(diff(f1, x), x), x)) / nf("Re");
  return g;
}

AnsatzCase family_ansatz(CaseId id) {
  auto a = symbolic_a();
  a[6] = a[6] * nf("Re");
  AnsatzCase c = ansatz_case(id, a, id == CaseId::I ? NormalForm() : symbolic_b());
  c.a = symbolic_a();
  return c;
}

Generator family_generator(const SolutionFamily& fam) {
  AnsatzCase c = family_ansatz(fam.caseId);
  switch (fam.id) {
    case FamilyId::SCALE_I: return xi_A(nf("k1"), nf("k2"), nf("k3"), c.f1, c.f2);
    case FamilyId::BVP_MUD: {
      SubstitutionMap a7{{parse("a7").atom(), nf("-6*a2*a3/Re")}};
      return xi_A(NormalForm(), nf("k2"), nf("k2"), substitute(c.f1, a7), substitute(c.f2, a7));
    }
    default: return xi_B(nf("k1"), nf("k2"), nf("k3"), nf("k4"), c.f1, c.f2);
  }
}

SubstitutionMap solution_substitution(const SolutionFamily& fam, int depth) {
  JetSpace space = JetSpace::plane_flow();
  AtomId x = registry().x(), y = registry().y(), eps = registry().eps();
  SubstitutionMap out;
  auto F = fields(fam);
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    NormalForm full = (*F[alpha])[0] + NormalForm::atom(eps) * (*F[alpha])[1];
    NormalForm dx = full;
    for (int i = 0; i <= depth; ++i) {
      NormalForm d = dx;
      for (int j = 0; i + j <= depth; ++j) {
        out.emplace(space.dependent_jet(alpha, {i, j}), d);
        d = diff(d, y);
      }
      dx = diff(dx, x);
    }
  }
  return out;
}

std::vector<EpsSeries> solution_residual(const SolutionFamily& fam) {
  PdeSystem sys = creeping_system();
  SubstitutionMap sub = solution_substitution(fam);
  std::vector<EpsSeries> out;
  for (const auto& e : sys.equations) out.push_back(to_series(substitute(e, sub), 1));
  return out;
}

void CheckReport::add(const std::string& label, const NormalForm& r) {
  if (r.is_zero()) return;
  pass = false;
  failures.push_back({label, r});
}

std::string to_text(const CheckReport& r) {
  std::string out = r.pass ? "PASS\n" : "FAIL\n";
  for (const auto& f : r.failures) out += "  " + f.label + ": " + to_string(f.residual) + "\n";
  for (const auto& n : r.notes) out += "  note: " + n + "\n";
  return out;
}

CheckReport check_solution(const SolutionFamily& fam) {
  CheckReport r;
  auto res = solution_residual(fam);
  for (std::size_t e = 0; e < res.size(); ++e) {
    for (int k = 0; k <= 1; ++k) r.add(std::string(kEqName[e]) + " eps^" + std::to_string(k), res[e][k]);
  }
  for (const auto& s : fam.repairs) r.notes.push_back(s);
  return r;
}

CheckReport check_surface_conditions(const SolutionFamily& fam, const Generator& g) {
  JetSpace space = JetSpace::plane_flow();
  AtomId x = registry().x(), y = registry().y();
  SubstitutionMap sub;
  auto F = fields(fam);
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    for (int k = 0; k <= 1; ++k) {
      const NormalForm& c = (*F[alpha])[k];
      sub.emplace(space.expanded_jet(alpha, k, {0, 0}), c);
      sub.emplace(space.expanded_jet(alpha, k, {1, 0}), diff(c, x));
      sub.emplace(space.expanded_jet(alpha, k, {0, 1}), diff(c, y));
    }
  }
  CheckReport r;
  auto conds = surface_conditions(g);
  for (std::size_t i = 0; i < conds.size(); ++i) {
    std::size_t alpha = i / 2;
    int k = static_cast<int>(i % 2);
    r.add(std::string(kField[alpha]) + "_" + std::to_string(k), substitute(conds[i], sub));
  }
  return r;
}

namespace {

// Gaussian elimination over rational functions of the parameters. Returns
// nullopt when the system is inconsistent.
std::optional<std::vector<NormalForm>> solve_linear(std::vector<std::vector<NormalForm>> A, std::vector<NormalForm> b,
                                                    std::size_t n) {
  std::size_t rows = A.size();
  std::vector<int> pivotCol;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows; ++c) {
    std::size_t piv = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (!A[i][c].is_zero()) {
        piv = i;
        break;
      }
    }
    if (piv == rows) continue;
    std::swap(A[piv], A[r]);
    std::swap(b[piv], b[r]);
    NormalForm inv = A[r][c].inverse();
    for (std::size_t j = c; j < n; ++j) A[r][j] = A[r][j] * inv;
    b[r] = b[r] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c].is_zero()) continue;
      NormalForm f = A[i][c];
      for (std::size_t j = c; j < n; ++j) A[i][j] -= f * A[r][j];
      b[i] -= f * b[r];
    }
    pivotCol.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (!b[i].is_zero()) return std::nullopt;
  }
  std::vector<NormalForm> x(n);
  for (std::size_t i = 0; i < r; ++i) x[static_cast<std::size_t>(pivotCol[i])] = b[i];
  return x;
}

// Atoms that carry the dependence on x and y.
std::vector<AtomId> spatial_atoms(const NormalForm& f) {
  std::vector<AtomId> out;
  AtomId x = registry().x(), y = registry().y();
  for (AtomId a : f.atoms()) {
    if (a == x || a == y) {
      out.push_back(a);
      continue;
    }
    const AtomInfo& info = registry().info(a);
    if (info.kind == AtomKind::Transcendental && (info.arg->depends_on(x) || info.arg->depends_on(y))) out.push_back(a);
  }
  return out;
}

}  // namespace

std::optional<SolutionFamily> repair(const SolutionFamily& fam) {
  CheckReport before = check_solution(fam);
  if (before.pass) return fam;
  for (const auto& f : before.failures) {
    if (f.label.find("eps^0") != std::string::npos) return std::nullopt;
  }
  // Correction basis per component, scaled like the field.
  NormalForm scale = fam.similarity == "scale" ? nf("x") : NormalForm(1);
  std::array<std::vector<NormalForm>, 3> basis;
  basis[0] = {scale, scale * fam.omega};
  basis[1] = {scale, scale * fam.omega};
  basis[2] = {NormalForm(1), fam.omega};
  std::vector<AtomId> unknowns;
  SolutionFamily trial = fam;
  std::array<EpsSeries*, 3> F{&trial.u, &trial.v, &trial.p};
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    for (const auto& e : basis[alpha]) {
      AtomId d = registry().parameter("d" + std::to_string(unknowns.size() + 1));
      unknowns.push_back(d);
      (*F[alpha])[1] += NormalForm::atom(d) * e;
    }
  }
  std::vector<std::vector<NormalForm>> A;
  std::vector<NormalForm> b;
  SubstitutionMap zero;
  for (AtomId d : unknowns) zero.emplace(d, NormalForm());
  for (const auto& s : solution_residual(trial)) {
    NormalForm num(s[1].numerator());
    for (const auto& [m, coef] : collect(num, spatial_atoms(num))) {
      std::vector<NormalForm> row;
      for (AtomId d : unknowns) row.push_back(partial_atom(coef, d));
      A.push_back(std::move(row));
      b.push_back(-substitute(coef, zero));
    }
  }
  auto sol = solve_linear(A, b, unknowns.size());
  if (!sol) return std::nullopt;
  SolutionFamily out = fam;
  std::array<EpsSeries*, 3> G{&out.u, &out.v, &out.p};
  std::size_t next = 0;
  for (std::size_t alpha = 0; alpha < 3; ++alpha) {
    std::string added;
    for (const auto& e : basis[alpha]) {
      const NormalForm& value = (*sol)[next++];
      if (value.is_zero()) continue;
      (*G[alpha])[1] += value * e;
      added += " + (" + to_string(value) + ")*(" + to_string(e) + ")";
    }
    if (added.empty()) continue;
    out.repairs.push_back(std::string(kField[alpha]) + "_1 original: " + to_string((*fields(fam)[alpha])[1]));
    out.repairs.push_back(std::string(kField[alpha]) + "_1 repaired: original" + added);
  }
  if (!check_solution(out).pass) return std::nullopt;
  return out;
}

namespace {

const char* const kReducedScale[] = {
    "V0_w - w*U0_w + U0",
    "(w^2 + 1)*U0_ww + Re*(w*P0_w - k1)",
    "w*(U0_ww + w*V0_ww) - Re*P0_w",
    "V1_w - w*U1_w + U1 + (k2 - k3)*U0",
    "(w^2 + 1)*((w*U0 - V0)*U0_www - U1_ww/Re) + w^2*(2*(w*V0_w - V0) - U0_w)*V0_ww"
    " - w*(2*(w*U0 + V0) - (5*w^2 + 2)*U0_w)*U0_ww + (k2 - k3)*(P0 - (U0 - 2*w*U0_w)/Re) - k1*k3"
    " - 6*a2*a3/Re - a7 - w*P1_w",
    "w*(w*U0 - (w^2 + 1)*V0)*U0_www + w^3*U0*V0_www - w/Re*(w*V1_ww + U1_ww)"
    " - ((5*w^2 + 2)*U0_w + w*((w^2 - 1)*V0_w - 7*U0) + 2*(w^2 + 1)*V0)*U0_ww"
    " - w^2*(w*U0_w - 4*U0)*V0_ww + (k2 - k3)/Re*(U0_w + 2*w*V0_w - V0) + 2*a1*a4/Re + P1_w",
};

const char* const kReducedTrasl[] = {
    "V0_w - k1*U0_w",
    "(k1^2 + 1)*U0_ww + Re*(k1*P0_w - k2)",
    "k1*(U0_ww + k1*V0_ww) - Re*P0_w",
    "V1_w - k1*U1_w + (k1*k3 - k4)*U0_w",
    "(k1^2 + 1)*((k1*U0 - V0)*U0_www - U1_ww/Re) + k1^2*(2*k1*V0_w - U0_w)*V0_ww"
    " + k1*((5*k1^2 + 2)*U0_w + 2*(k1*k3 - k4)/Re)*U0_ww - k1*P1_w + (k1*k3 - k4)*P0_w - k2*k3 - a7",
    "k1*(k1*U0 - (k1^2 + 1)*V0)*U0_www + k1^3*U0*V0_www - k1/Re*(U1_ww + k1*V1_ww)"
    " - (k1*(k1^2 - 1)*V0_w + (5*k1^2 + 2)*U0_w - (k1*k3 - k4)/Re)*U0_ww"
    " - k1*(k1^2*U0_w - 2/Re*(k1*k3 - k4))*V0_ww + P1_w",
};

const char* const kProfileNames[] = {"U0", "V0", "P0", "U1", "V1", "P1"};

}  // namespace

ReducedSystem reduced_system(FamilyId id) {
  ReducedSystem r;
  r.familyId = id;
  if (id == FamilyId::BVP_MUD) throw ExtractionFailure("BVP_MUD has no reduced system of its own");
  if (id == FamilyId::SCALE_I) {
    for (const char* e : kReducedScale) r.equations.push_back(nf(e));
    return r;
  }
  if (id == FamilyId::TRASL_I) {
    r.alpha = nf("-6*a3/Re*(a1*w + a2)");
    r.beta = nf("2*a1*a4/Re");
  }
  for (const char* e : kReducedTrasl) r.equations.push_back(nf(e));
  r.equations[4] += r.alpha;
  r.equations[5] += r.beta;
  return r;
}

std::vector<NormalForm> extract_profiles(const SolutionFamily& fam) {
  if (fam.id == FamilyId::BVP_MUD) throw ExtractionFailure("BVP_MUD has no similarity representation");
  AtomId x = registry().x(), y = registry().y(), w = registry().w();
  const bool scale = fam.similarity == "scale";
  NormalForm X = nf("x"), W = NormalForm::atom(w);
  SubstitutionMap toW{{y, scale ? W * X : W + nf("k1") * X}};
  SubstitutionMap toXY{{w, fam.omega}};
  auto profile = [&](const NormalForm& xy, const char* name) {
    NormalForm f = substitute(xy, toW);
    if (f.depends_on(x)) {
      throw ExtractionFailure(std::string(name) + " is not a function of the similarity variable: " + to_string(f));
    }
    return f;
  };
  auto prime = [&](const NormalForm& f) { return substitute(diff(f, w), toXY); };
  NormalForm logx = nf("log(x)");
  std::vector<NormalForm> out(6);
  if (scale) {
    NormalForm dk = nf("k2 - k3");
    out[0] = profile(fam.u[0] / X, "U0");
    out[1] = profile(fam.v[0] / X, "V0");
    out[2] = profile(fam.p[0] - nf("k1") * logx, "P0");
    NormalForm U0 = substitute(out[0], toXY), V0 = substitute(out[1], toXY), P0 = substitute(out[2], toXY);
    out[3] = profile(fam.u[1] / X - dk * U0 * logx, "U1");
    out[4] = profile((fam.v[1] + nf("a1*(3*a3*x^2 + 2*a4*x*log(x) - a5)")) / X - dk * V0 * logx, "V1");
    out[5] = profile(fam.p[1] + nf("6*a1*a3/Re*y - k1/2*(k2 - k3)*log(x)^2") -
                         (dk * P0 - nf("k1*k3 + 6*a2*a3/Re + a7")) * logx,
                     "P1");
    return out;
  }
  NormalForm c = nf("k1*k3 - k4");
  out[0] = profile(fam.u[0], "U0");
  out[1] = profile(fam.v[0], "V0");
  out[2] = profile(fam.p[0] - nf("k2*x"), "P0");
  NormalForm dU0 = prime(out[0]), dV0 = prime(out[1]), dP0 = prime(out[2]);
  NormalForm uKnown = c * X * dU0, vKnown = c * X * dV0, pKnown = (c * dP0 - nf("k2*k3 + a7")) * X;
  switch (fam.id) {
    case FamilyId::TRASL_I:
      vKnown -= nf("a1*(a3*x^2 + a4*x + a5)*x");
      pKnown -= nf(expand("3*a3/Re*(2*(a1*W + a2) + k1*a1*x)*x"));
      break;
    case FamilyId::TRASL_II:
      uKnown += nf(expand(kT2uS)) - nf(expand(kT2uC));
      vKnown += nf(expand(kT2vS)) + nf(expand(kT2vC));
      pKnown += nf(expand(kT2p));
      break;
    case FamilyId::TRASL_III:
      uKnown += nf(expand(kT3uS)) + nf(expand(kT3uC));
      vKnown += nf(expand(kT3vS)) - nf(expand(kT3vC));
      pKnown += nf(expand(kT3p));
      break;
    default: break;
  }
  out[3] = profile(fam.u[1] - uKnown, "U1");
  out[4] = profile(fam.v[1] - vKnown, "V1");
  out[5] = profile(fam.p[1] - pKnown, "P1");
  return out;
}

CheckReport check_reduced_system(const SolutionFamily& fam) {
  ReducedSystem rs = reduced_system(fam.id);
  std::vector<NormalForm> prof = extract_profiles(fam);
  AtomId w = registry().w();
  SubstitutionMap sub;
  for (std::size_t i = 0; i < 6; ++i) {
    FunctionId fn = *registry().find_function(kProfileNames[i]);
    NormalForm d = prof[i];
    for (int k = 0; k <= 3; ++k) {
      sub.emplace(registry().jet(fn, {k}), d);
      d = diff(d, w);
    }
  }
  CheckReport r;
  for (std::size_t i = 0; i < rs.equations.size(); ++i) {
    r.add("reduced equation " + std::to_string(i + 1), substitute(rs.equations[i], sub));
  }
  return r;
}

SubstitutionMap bvp_parameter_map() {
  auto at = [](const char* n) { return parse(n).atom(); };
  return {{at("k1"), NormalForm()},         {at("k3"), nf("k2")},   {at("c1"), nf("ushear")},
          {at("c2"), NormalForm()},         {at("c3"), nf("-vsuction")}, {at("c4"), nf("pfar")},
          {at("c6"), NormalForm()},         {at("a7"), nf("-6*a2*a3/Re")}};
}

BoundaryData symbolic_boundary() { return {nf("ushear"), nf("vsuction"), nf("pfar")}; }

CheckReport check_bvp(const SolutionFamily& fam, const BoundaryData& data) {
  AtomId y = registry().y();
  SubstitutionMap bind{{parse("ushear").atom(), data.uShear},
                       {parse("vsuction").atom(), data.vSuction},
                       {parse("pfar").atom(), data.pFar}};
  SolutionFamily f = bind_parameters(fam, bind);
  SubstitutionMap wall{{y, NormalForm()}};
  CheckReport r;
  struct Condition {
    std::string label;
    EpsSeries value;
  };
  std::vector<Condition> conds = {
      {"u(x,0)", f.u.map([&](const NormalForm& c) { return substitute(c, wall); })},
      {"v(x,0) + v_suction*x",
       f.v.map([&](const NormalForm& c) { return substitute(c, wall); }) + EpsSeries::constant(data.vSuction * nf("x"), 1)},
      {"u - u_shear*y (far upstream)", f.u - EpsSeries::constant(data.uShear * nf("y"), 1)},
      {"v_y (far field)", f.v.map([&](const NormalForm& c) { return diff(c, y); })},
      {"p - p_far (far upstream)", f.p - EpsSeries::constant(data.pFar, 1)},
  };
  for (const auto& c : conds) {
    r.add(c.label + " eps^0", c.value[0]);
    r.notes.push_back(c.label + " eps^1 = " + to_string(c.value[1]));
  }
  return r;
}

}  // namespace approxlie
