#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "approxlie/model.hpp"
#include "approxlie/numeric.hpp"
#include "approxlie/solutions.hpp"

namespace approxlie {

struct FamilySpec {
  FamilyId id = FamilyId::SCALE_I;
  // Parameter values bound before any check (names from default_parameters()).
  std::vector<std::pair<std::string, Rational>> overrides;
  // Sampling box; the family default when absent.
  std::optional<SamplePlan> box;
};

struct ConfigDeck {
  Rational re{1};
  // Ansatz case for the f1, f2 of Xi_9, xiA and xiB; generic f1, f2 with the
  // constraint as a side condition when absent.
  std::optional<AnsatzCase> ansatz;
  std::vector<std::string> generators;
  std::map<std::string, Generator> literals;
  std::string determiningGenerator;
  std::vector<FamilyId> families;
  std::map<FamilyId, FamilySpec> familySpecs;
  bool repair = true;
  std::vector<FamilyId> sweepFamilies;
  std::vector<double> epsList;
  int points = 64;
  std::uint64_t seed = 42;
  double bandLo = 1.95, bandHi = 2.05;
  bool truncate = false;
  Precision precision = Precision::Double;
  std::string format = "text";
  std::string outPath;

  FamilySpec spec(FamilyId id) const;
  SamplePlan plan(FamilyId id) const;
};

// Defaults applied when a deck is empty.
ConfigDeck default_deck();
// Strict INI reader: unknown sections or keys and malformed values throw
// ConfigError.
ConfigDeck parse_deck(std::istream& in);
ConfigDeck load_deck(const std::string& path);

// Each command writes a report in deck.format and returns the exit code
// (0 success, 1 verification failure). Configuration problems throw
// ConfigError.
int cmd_verify_symmetries(const ConfigDeck& deck, std::ostream& out);
int cmd_verify_solutions(const ConfigDeck& deck, std::ostream& out);
int cmd_determining(const ConfigDeck& deck, std::ostream& out);
int cmd_sweep(const ConfigDeck& deck, std::ostream& out, std::ostream& summary);

// Full command line (without the program name); returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace approxlie
