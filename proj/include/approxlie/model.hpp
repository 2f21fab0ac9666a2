#pragma once

#include <array>
#include <string>
#include <vector>

#include "approxlie/invariance.hpp"

namespace approxlie {

// Steady plane creeping flow of a second grade fluid: continuity and the two
// momentum equations, with leading derivatives v_y, p_x, p_y.
PdeSystem creeping_system();

// The generic auxiliary functions f1(x, y) and f2(x).
NormalForm generic_f1();
NormalForm generic_f2();

// The nine first-order generators, indexed 0..8 for Xi_1..Xi_9.
std::vector<Generator> catalog_generators(const NormalForm& f1, const NormalForm& f2);

// df2/dx - (f1_xxxx + 2 f1_xxyy + f1_yyyy)/Re.
NormalForm constraint_residual(const NormalForm& f1, const NormalForm& f2);

enum class CaseId { I, II, III };
std::string to_string(CaseId c);
CaseId case_from_string(const std::string& s);

struct AnsatzCase {
  CaseId caseId = CaseId::I;
  std::array<NormalForm, 7> a;
  NormalForm b;
  NormalForm F, G, H, f1, f2;
};

// Symbolic parameters a1..a7 and b.
std::array<NormalForm, 7> symbolic_a();
NormalForm symbolic_b();

// Builds f1 = F G + H with f2 = (H''' - a7)/Re. An empty H selects a7 x^3/6.
AnsatzCase ansatz_case(CaseId id, const std::array<NormalForm, 7>& a, const NormalForm& b,
                       const std::optional<NormalForm>& H = std::nullopt);

}  // namespace approxlie
