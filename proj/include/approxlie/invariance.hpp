#pragma once

#include <optional>
#include <string>
#include <vector>

#include "approxlie/generator.hpp"

namespace approxlie {

inline constexpr int kFixpointLimit = 12;

// A system of equations Delta = 0 in the unexpanded unknowns, each solved for
// a declared leading jet.
struct PdeSystem {
  JetSpace space;
  std::vector<NormalForm> equations;
  std::vector<AtomId> leading;
  std::vector<std::string> names;
  int maxOrder = 3;

  // Throws InconsistentChoice on repeated or nested leading derivatives.
  void validate() const;
  // The same system with eps set to zero.
  PdeSystem unperturbed() const;
};

// Substitution rules for leading jets of the expanded system and their
// differential consequences, closed under mutual reduction.
struct OnShellRules {
  int order = 0;
  int jetDepth = kDefaultJetDepth;
  std::vector<AtomId> lhs;  // in creation order
  SubstitutionMap rules;
  // Differences between two derivations of the same jet that did not reduce
  // to zero (compatibility conditions of the system).
  std::vector<NormalForm> integrability;

  NormalForm reduce(const NormalForm& f) const;
  EpsSeries reduce(const EpsSeries& s) const;
  const NormalForm* find(AtomId a) const;
};

OnShellRules onshell_rules(const PdeSystem& sys, int p, int jetDepth = kDefaultJetDepth);
// Adds a constraint expr = 0 solved for `leading` (or an automatically chosen
// jet of an auxiliary function), together with its consequences.
void add_constraint(OnShellRules& rules, const PdeSystem& sys, const NormalForm& expr,
                    std::optional<AtomId> leading = std::nullopt);

// Xi^(r) Delta for every equation, on-shell and truncated at p.
std::vector<EpsSeries> invariance_residual(const PdeSystem& sys, const Generator& g, const OnShellRules& rules);
std::vector<EpsSeries> invariance_residual(const PdeSystem& sys, const Generator& g, int p);

struct DeterminingEntry {
  std::size_t equation = 0;
  int order = 0;
  Monomial monomial;
  NormalForm coefficient;
};

struct DeterminingSet {
  int order = 0;
  std::vector<std::vector<DeterminingEntry>> perOrder;
  bool empty() const;
  std::size_t size() const;
};

DeterminingSet determining_equations(const std::vector<EpsSeries>& res, const PdeSystem& sys);

struct VerificationReport {
  bool pass = false;
  DeterminingSet determining;
  std::vector<NormalForm> integrability;
};

VerificationReport verify_generator(const PdeSystem& sys, const Generator& g,
                                    const std::vector<NormalForm>& modulo = {});
VerificationReport verify_generator(const PdeSystem& sys, const Generator& g, const OnShellRules& rules);

std::string to_text(const DeterminingSet& d, const PdeSystem& sys);

// Invariant-surface conditions sum_i xi_i u_alpha,i - eta_alpha split by eps
// order; entry alpha * (p + 1) + k holds unknown alpha at order k.
std::vector<NormalForm> surface_conditions(const Generator& g);
// True for a condition that reduced to a nonzero constant (no invariant
// solution exists for that component).
bool is_inconsistent(const NormalForm& condition);

}  // namespace approxlie
