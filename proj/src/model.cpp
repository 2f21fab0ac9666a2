#include "approxlie/model.hpp"

#include "approxlie/errors.hpp"
#include "approxlie/expr.hpp"

namespace approxlie {

PdeSystem creeping_system() {
  PdeSystem s{JetSpace::plane_flow(), {}, {}, {"continuity", "x-momentum", "y-momentum"}, 3};
  s.equations = {
      nf("u_x + v_y"),
      nf("p_x - (u_xx + u_yy)/Re - eps*(5*u_x*u_xx + u_x*u_yy + u*u_xxx + v*u_yyy + u*u_xyy + 2*v_x*v_xx"
         " + u_y*u_xy + u_y*v_xx + v*u_xxy)"),
      nf("p_y - (v_xx - u_xy)/Re - eps*(5*u_x*u_xy - u_x*v_xx - v*u_xyy + u*v_xxx - v*u_xxx + 2*u_y*u_yy"
         " - v_x*u_xx + v_x*u_yy - u*u_xxy)"),
  };
  s.leading = {parse("v_y").atom(), parse("p_x").atom(), parse("p_y").atom()};
  s.validate();
  return s;
}

NormalForm generic_f1() { return nf("f1"); }
NormalForm generic_f2() { return nf("f2"); }

std::vector<Generator> catalog_generators(const NormalForm& f1, const NormalForm& f2) {
  JetSpace space = JetSpace::plane_flow();
  AtomId x = registry().x(), y = registry().y();
  std::vector<Generator> g(9, Generator(space, 1));
  g[0].xi(0, 0) = 1;
  g[1].xi(1, 0) = 1;
  g[2].eta(2, 0) = 1;
  g[3].xi(0, 1) = 1;
  g[4].xi(1, 1) = 1;
  g[5].eta(0, 1) = nf("u0");
  g[5].eta(1, 1) = nf("v0");
  g[5].eta(2, 1) = nf("p0");
  g[6].xi(0, 1) = nf("x");
  g[6].xi(1, 1) = nf("y");
  g[6].eta(2, 1) = nf("-p0");
  g[7].xi(0, 0) = nf("x");
  g[7].xi(1, 0) = nf("y");
  g[7].eta(0, 0) = nf("u0");
  g[7].eta(0, 1) = nf("u1");
  g[7].eta(1, 0) = nf("v0");
  g[7].eta(1, 1) = nf("v1");
  NormalForm f1y = diff(f1, y), f1xy = diff(f1y, x), f1xx = diff(diff(f1, x), x);
  g[8].eta(0, 1) = diff(f1y, y);
  g[8].eta(1, 1) = -f1xy;
  g[8].eta(2, 1) = f2 - (diff(f1xy, y) + diff(f1xx, x)) / nf("Re");
  return g;
}

NormalForm constraint_residual(const NormalForm& f1, const NormalForm& f2) {
  AtomId x = registry().x(), y = registry().y();
  NormalForm fxx = diff(diff(f1, x), x), fyy = diff(diff(f1, y), y);
  NormalForm biharmonic = diff(diff(fxx, x), x) + NormalForm(2) * diff(diff(fxx, y), y) + diff(diff(fyy, y), y);
  return diff(f2, x) - biharmonic / nf("Re");
}

std::string to_string(CaseId c) {
  switch (c) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
  }
  return "?";
}

CaseId case_from_string(const std::string& s) {
  if (s == "I" || s == "i" || s == "1") return CaseId::I;
  if (s == "II" || s == "ii" || s == "2") return CaseId::II;
  if (s == "III" || s == "iii" || s == "3") return CaseId::III;
  throw InvalidCaseParams("unknown ansatz case '" + s + "'");
}

std::array<NormalForm, 7> symbolic_a() {
  std::array<NormalForm, 7> a;
  for (int i = 0; i < 7; ++i) a[static_cast<std::size_t>(i)] = nf("a" + std::to_string(i + 1));
  return a;
}

NormalForm symbolic_b() { return nf("b"); }

AnsatzCase ansatz_case(CaseId id, const std::array<NormalForm, 7>& a, const NormalForm& b,
                       const std::optional<NormalForm>& H) {
  AnsatzCase c;
  c.caseId = id;
  c.a = a;
  c.b = b;
  AtomId x = registry().x();
  NormalForm X = nf("x"), Y = nf("y");
  auto E = [](Transcendental fn, const NormalForm& arg) { return apply_function(fn, arg); };
  switch (id) {
    case CaseId::I:
      c.F = a[2] * X.pow(3) + a[3] * X.pow(2) + a[4] * X + a[5];
      c.G = a[0] * Y + a[1];
      break;
    case CaseId::II:
      if (b.is_zero()) throw InvalidCaseParams("case II requires b != 0");
      c.F = (a[2] + a[4] * X) * E(Transcendental::Cos, b * X) + (a[3] + a[5] * X) * E(Transcendental::Sin, b * X);
      c.G = a[0] * E(Transcendental::Exp, b * Y) + a[1] * E(Transcendental::Exp, -b * Y);
      break;
    case CaseId::III:
      if (b.is_zero()) throw InvalidCaseParams("case III requires b != 0");
      c.F = (a[2] + a[4] * X) * E(Transcendental::Exp, b * X) + (a[3] + a[5] * X) * E(Transcendental::Exp, -b * X);
      c.G = a[0] * E(Transcendental::Cos, b * Y) + a[1] * E(Transcendental::Sin, b * Y);
      break;
  }
  c.H = H ? *H : a[6] * X.pow(3) / NormalForm(6);
  for (AtomId v : c.H.atoms()) {
    const AtomInfo& info = registry().info(v);
    if (info.kind == AtomKind::Jet || v == registry().y()) throw InvalidCaseParams("H must be a closed form in x");
  }
  c.f1 = c.F * c.G + c.H;
  c.f2 = (diff(diff(diff(c.H, x), x), x) - a[6]) / nf("Re");
  return c;
}

}  // namespace approxlie
