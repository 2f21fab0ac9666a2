#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "approxlie/model.hpp"

namespace approxlie {

enum class FamilyId { SCALE_I, TRASL_I, TRASL_II, TRASL_III, BVP_MUD };
std::string to_string(FamilyId f);
FamilyId family_from_string(const std::string& s);
std::vector<FamilyId> all_families();

struct SolutionFamily {
  FamilyId id = FamilyId::SCALE_I;
  CaseId caseId = CaseId::I;
  EpsSeries u{1}, v{1}, p{1};
  NormalForm omega;
  std::string similarity;
  std::string singularLocus;
  // Free constants of the family (c_i and, for the scale family, none of the
  // generator parameters).
  std::vector<AtomId> freeConstants;
  // Human-readable record of any automatic repair.
  std::vector<std::string> repairs;
};

// Closed forms with every parameter symbolic.
SolutionFamily solution_family(FamilyId id);
// Replaces parameters (by atom) in all three components.
SolutionFamily bind_parameters(const SolutionFamily& fam, const SubstitutionMap& values);

// Scale subalgebra k1 Xi_3 + k2 Xi_6 + k3 Xi_7 + Xi_8 + Xi_9.
Generator xi_A(const NormalForm& k1, const NormalForm& k2, const NormalForm& k3, const NormalForm& f1,
               const NormalForm& f2);
// Translation subalgebra Xi_1 + k1 Xi_2 + k2 Xi_3 + k3 Xi_4 + k4 Xi_5 + Xi_9.
Generator xi_B(const NormalForm& k1, const NormalForm& k2, const NormalForm& k3, const NormalForm& k4,
               const NormalForm& f1, const NormalForm& f2);
// The generator a family is invariant under, with the family's ansatz case
// and its a7 convention.
Generator family_generator(const SolutionFamily& fam);
// Ansatz instance used by the solution families: the additive constant of
// the family's f2 - H'''/Re equals -a7.
AnsatzCase family_ansatz(CaseId id);

// Unexpanded jets of u, v, p up to order `depth` mapped to derivatives of the
// closed form u_(0) + eps u_(1).
SubstitutionMap solution_substitution(const SolutionFamily& fam, int depth = 3);

// Eps^0 and eps^1 coefficients of the three equations evaluated on the family.
std::vector<EpsSeries> solution_residual(const SolutionFamily& fam);

struct CheckItem {
  std::string label;
  NormalForm residual;
};

struct CheckReport {
  bool pass = true;
  std::vector<CheckItem> failures;
  std::vector<std::string> notes;
  void add(const std::string& label, const NormalForm& r);
};

std::string to_text(const CheckReport& r);

CheckReport check_solution(const SolutionFamily& fam);
CheckReport check_surface_conditions(const SolutionFamily& fam, const Generator& g);

// Attempts to cancel a nonzero residual by adding constant and
// linear-in-omega terms (scaled per family) with unknown coefficients to the
// eps^1 parts. Returns the repaired family, or nullopt when the linear system
// has no solution.
std::optional<SolutionFamily> repair(const SolutionFamily& fam);

// Reduced ODE systems in the similarity variable (the independent atom w).
struct ReducedSystem {
  FamilyId familyId;
  std::vector<NormalForm> equations;
  NormalForm alpha, beta;
};

ReducedSystem reduced_system(FamilyId id);
// Profiles U0..P1 as functions of w recovered from the closed forms.
std::vector<NormalForm> extract_profiles(const SolutionFamily& fam);
CheckReport check_reduced_system(const SolutionFamily& fam);

struct BoundaryData {
  NormalForm uShear, vSuction, pFar;
};

BoundaryData symbolic_boundary();
// Specialization of the scale family that reproduces the boundary value
// problem solution: k1 = 0, k3 = k2, c1 = u_shear, c2 = 0, c3 = -v_suction,
// c4 = p_far, c6 = 0, a7 = -6 a2 a3/Re.
SubstitutionMap bvp_parameter_map();
// Conditions of the approximate boundary value problem: eps^0 parts must
// vanish, eps^1 parts are reported in notes.
CheckReport check_bvp(const SolutionFamily& fam, const BoundaryData& data);

}  // namespace approxlie
