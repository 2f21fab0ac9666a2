#include <doctest.h>

#include <fstream>
#include <sstream>

#include "approxlie/cli.hpp"
#include "approxlie/errors.hpp"

using namespace approxlie;

namespace {

const std::string kDecks = APPROXLIE_DECK_DIR;
const std::string kGolden = APPROXLIE_GOLDEN_DIR;

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string deck(const std::string& name) { return kDecks + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ConfigDeck parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_deck(in);
}

}  // namespace

TEST_CASE("deck parsing") {
  ConfigDeck d = parse_text("[model]\nRe = 3/2\n[sweep]\neps = 0.2, 0.02\nband = 1.9, 2.1\nseed = 5\n");
  CHECK(d.re == Rational(3, 2));
  CHECK(d.epsList == std::vector<double>{0.2, 0.02});
  CHECK(d.bandLo == 1.9);
  CHECK(d.seed == 5);
  CHECK(d.generators.size() == 9);
  CHECK(d.families.size() == 5);
  CHECK(d.sweepFamilies.size() == 4);
  CHECK(d.plan(FamilyId::SCALE_I).xMin == 0.5);

  ConfigDeck f = parse_text("[family.trasl_ii]\nk1 = 1/2\nxmin = -1\nxmax = 1\n");
  FamilySpec s = f.spec(FamilyId::TRASL_II);
  REQUIRE(s.overrides.size() == 1);
  CHECK(s.overrides[0].second == Rational(1, 2));
  CHECK(f.plan(FamilyId::TRASL_II).xMax == 1.0);
  CHECK(f.plan(FamilyId::TRASL_II).yMax == 2.0);

  ConfigDeck c = parse_text("[case]\nid = III\n");
  REQUIRE(c.ansatz);
  CHECK(c.ansatz->caseId == CaseId::III);

  ConfigDeck g = parse_text("[generator.g]\nxi_x_0 = x\neta_p_1 = p0\n[generators]\nnames = g, xi2\n");
  CHECK(g.literals.at("g").xi(0, 0) == nf("x"));
  CHECK(g.literals.at("g").eta(2, 1) == nf("p0"));
}

TEST_CASE("strict deck errors") {
  for (const char* text : {
           "[model]\nReynolds = 1\n",
           "[unknown]\na = 1\n",
           "[model]\nRe = 1\nRe = 2\n",
           "[model]\nRe = -1\n",
           "[model]\nRe = x\n",
           "[generators]\nnames = xi10\n",
           "[generator.xi3]\nxi_x_0 = 1\n",
           "[generator.g]\nxi_z_0 = 1\n",
           "[generator.g]\nxi_x_0 = u1\n",
           "[generator.g]\nxi_x_0 = (x\n",
           "[families]\nnames = scale_ii\n",
           "[family.scale_i]\nRe = 2\n",
           "[sweep]\nband = 2.1, 1.9\n",
           "[sweep]\npoints = 0\n",
           "[sweep]\nprecision = single\n",
           "[output]\nformat = xml\n",
           "[case]\nid = IV\n",
           "[case]\na = 1, 2\nid = I\n",
       }) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_text(text), ConfigError);
  }
}

TEST_CASE("verify-symmetries exit codes") {
  Run ok = run({"verify-symmetries"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  for (int i = 1; i <= 9; ++i) CHECK(ok.out.find("xi" + std::to_string(i) + "  invariance  PASS") != std::string::npos);

  Run bad = run({"verify-symmetries", "--deck", deck("corrupted_xi8.ini")});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("continuity eps^1 [u1_x]: 1") != std::string::npos);

  Run unknown = run({"verify-symmetries", "--deck", deck("unknown_generator.ini")});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("xi10") != std::string::npos);

  Run cases = run({"verify-symmetries", "--deck", deck("case_ii.ini")});
  CHECK(cases.code == 0);
  CHECK(cases.out.find("case II  constraint  PASS") != std::string::npos);

  CHECK(run({"verify-symmetries", "--deck", deck("missing.ini")}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"verify-symmetries", "--format", "xml"}).code == 2);
}

TEST_CASE("golden reports") {
  CHECK(run({"verify-symmetries", "--format", "json"}).out == slurp(kGolden + "/verify_symmetries_default.json"));
  CHECK(run({"determining", "--deck", deck("determining_literal.ini"), "--format", "json"}).out ==
        slurp(kGolden + "/determining_rotation.json"));
}

TEST_CASE("determining command") {
  Run six = run({"determining", "--deck", deck("determining_xi6.ini")});
  CHECK(six.code == 0);
  CHECK(six.out == "xi6: 0 determining equations\n");
  Run rot = run({"determining", "--deck", deck("determining_literal.ini")});
  CHECK(rot.code == 0);
  CHECK(rot.out.find("rotation: 4 determining equations") == 0);
  CHECK(run({"determining", "--generator", "xi2"}).out == "xi2: 0 determining equations\n");
  CHECK(run({"determining"}).code == 2);
  CHECK(run({"determining", "--generator", "nope"}).code == 2);
}

TEST_CASE("verify-solutions command") {
  Run one = run({"verify-solutions", "--deck", deck("bvp.ini")});
  CHECK(one.code == 0);
  CHECK(one.out.find("BVP_MUD  eps=0 recovery  PASS") != std::string::npos);
  CHECK(one.out.find("BVP_MUD  boundary  PASS") != std::string::npos);

  Run all = run({"verify-solutions"});
  CHECK(all.code == 0);
  for (const char* row : {"SCALE_I  residual  PASS", "SCALE_I  surface  PASS", "SCALE_I  reduced  PASS",
                          "TRASL_I  residual  REPAIRED", "TRASL_I  reduced  PASS"}) {
    CHECK(all.out.find(row) != std::string::npos);
  }
  CHECK(all.out.find("p_1 original:") != std::string::npos);

  Run singular = run({"verify-solutions", "--deck", deck("singular_region.ini")});
  CHECK(singular.code == 2);
  CHECK(singular.err.find("singular locus") != std::string::npos);

  // Without repair the translation family of case I fails.
  std::ostringstream out;
  ConfigDeck d = parse_text("[families]\nnames = trasl_i\nrepair = false\n");
  CHECK(cmd_verify_solutions(d, out) == 1);
}

TEST_CASE("sweep command") {
  Run ok = run({"sweep", "--format", "csv"});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("family,eps,residual_eq1,residual_eq2,residual_eq3,max\n", 0) == 0);
  CHECK(ok.err.find("TRASL_III  slope") != std::string::npos);
  CHECK(run({"sweep", "--format", "csv"}).out == ok.out);
  CHECK(run({"sweep", "--format", "json"}).out == run({"sweep", "--format", "json"}).out);
  CHECK(run({"sweep", "--format", "csv", "--seed", "7"}).out != ok.out);

  Run control = run({"sweep", "--deck", deck("sweep_control.ini")});
  CHECK(control.code == 1);
  CHECK(control.out.find("slope 1.0") != std::string::npos);
  CHECK(run({"sweep", "--deck", deck("sweep_control.ini"), "--strict-band", "0.95,1.05"}).code == 0);
  CHECK(run({"sweep", "--strict-band", "2.1,2.3"}).code == 1);
  CHECK(run({"sweep", "--strict-band", "2.1"}).code == 2);
  CHECK(run({"sweep", "--deck", deck("sweep_empty_eps.ini")}).code == 2);
}
