#include "approxlie/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "approxlie/errors.hpp"

namespace approxlie {

namespace {

using Json = nlohmann::ordered_json;
namespace pt = boost::property_tree;

const std::vector<std::string> kCatalogGenerators = {"xi1", "xi2", "xi3", "xi4", "xi5", "xi6",
                                                     "xi7", "xi8", "xi9", "xiA", "xiB"};
const std::vector<std::string> kSlotKeys = {"xi_x_0",  "xi_x_1",  "xi_y_0",  "xi_y_1",  "eta_u_0",
                                            "eta_u_1", "eta_v_0", "eta_v_1", "eta_p_0", "eta_p_1"};

std::string catalog_family_name(FamilyId id) { return boost::algorithm::to_lower_copy(to_string(id)); }

FamilyId family_from_deck(const std::string& name) {
  for (FamilyId id : all_families()) {
    if (catalog_family_name(id) == name) return id;
  }
  throw ConfigError("unknown family '" + name + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  boost::algorithm::split(out, text, boost::algorithm::is_any_of(","));
  for (auto& s : out) boost::algorithm::trim(s);
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

NormalForm expression(const std::string& key, const std::string& text) {
  try {
    return nf(text);
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

Rational rational(const std::string& key, const std::string& text) {
  auto c = expression(key, text).constant_value();
  if (!c) throw ConfigError(key + ": expected a rational constant, got '" + text + "'");
  return *c;
}

double real(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + text + "'");
}

long integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + text + "'");
}

bool boolean(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::pair<double, double> band(const std::string& key, const std::string& text) {
  auto parts = split_list(text);
  if (parts.size() != 2) throw ConfigError(key + ": expected lo,hi");
  double lo = real(key, parts[0]), hi = real(key, parts[1]);
  if (!(lo < hi)) throw ConfigError(key + ": empty band");
  return {lo, hi};
}

void check_keys(const std::string& section, const pt::ptree& tree, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : tree) {
    if (!value.empty()) throw ConfigError("nested key '" + key + "' in [" + section + "]");
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
}

std::set<std::string> parameter_names() {
  std::set<std::string> out;
  for (const auto& [name, v] : default_parameters()) {
    if (name != "Re") out.insert(name);
  }
  return out;
}

Generator literal_generator(const std::string& name, const pt::ptree& tree) {
  check_keys("generator." + name, tree, {kSlotKeys.begin(), kSlotKeys.end()});
  JetSpace space = JetSpace::plane_flow();
  Generator g(space, 1);
  for (const auto& [key, value] : tree) {
    auto slot = std::find(kSlotKeys.begin(), kSlotKeys.end(), key) - kSlotKeys.begin();
    NormalForm e = expression("generator." + name + "." + key, value.data());
    std::size_t index = static_cast<std::size_t>(slot) / 2;
    int k = static_cast<int>(slot % 2);
    if (index < 2) {
      g.xi(index, k) = e;
    } else {
      g.eta(index - 2, k) = e;
    }
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw ConfigError("generator." + name + ": " + e.what());
  }
  return g;
}

void read_case(ConfigDeck& deck, const pt::ptree& tree) {
  check_keys("case", tree, {"id", "a", "b", "H"});
  std::string id = tree.get<std::string>("id", "generic");
  if (id == "generic") {
    if (tree.size() > 1) throw ConfigError("[case] id = generic takes no further keys");
    return;
  }
  CaseId cid;
  try {
    cid = case_from_string(id);
  } catch (const Error&) {
    throw ConfigError("unknown case '" + id + "'");
  }
  auto a = symbolic_a();
  if (auto text = tree.get_optional<std::string>("a")) {
    auto parts = split_list(*text);
    if (parts.size() != 7) throw ConfigError("case.a: expected 7 entries");
    for (std::size_t i = 0; i < 7; ++i) a[i] = expression("case.a", parts[i]);
  }
  NormalForm b = symbolic_b();
  if (auto text = tree.get_optional<std::string>("b")) b = expression("case.b", *text);
  std::optional<NormalForm> H;
  if (auto text = tree.get_optional<std::string>("H")) H = expression("case.H", *text);
  try {
    deck.ansatz = ansatz_case(cid, a, b, H);
  } catch (const Error& e) {
    throw ConfigError(std::string("case: ") + e.what());
  }
}

void read_family(ConfigDeck& deck, const std::string& name, const pt::ptree& tree) {
  FamilySpec spec;
  spec.id = family_from_deck(name);
  std::set<std::string> allowed = parameter_names();
  for (const char* k : {"xmin", "xmax", "ymin", "ymax"}) allowed.insert(k);
  check_keys("family." + name, tree, allowed);
  SamplePlan box = default_plan(spec.id);
  bool hasBox = false;
  for (const auto& [key, value] : tree) {
    std::string where = "family." + name + "." + key;
    if (key == "xmin" || key == "xmax" || key == "ymin" || key == "ymax") {
      double v = real(where, value.data());
      (key == "xmin" ? box.xMin : key == "xmax" ? box.xMax : key == "ymin" ? box.yMin : box.yMax) = v;
      hasBox = true;
    } else {
      spec.overrides.emplace_back(key, rational(where, value.data()));
    }
  }
  if (hasBox) spec.box = box;
  deck.familySpecs[spec.id] = spec;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// One line of a verification report.
struct Row {
  std::string subject, check, status, detail;
  std::vector<std::string> lines;
};

void write_rows(const std::string& command, const std::vector<Row>& rows, bool pass, const std::string& format,
                std::ostream& out) {
  if (format == "json") {
    Json j;
    j["command"] = command;
    j["pass"] = pass;
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json e;
      e["subject"] = r.subject;
      e["check"] = r.check;
      e["status"] = r.status;
      e["detail"] = r.detail;
      e["lines"] = r.lines;
      arr.push_back(e);
    }
    j["results"] = arr;
    out << j.dump(2) << "\n";
  } else if (format == "csv") {
    out << "subject,check,status,detail\n";
    for (const auto& r : rows) {
      std::string detail = r.detail;
      for (const auto& l : r.lines) detail += (detail.empty() ? "" : "; ") + l;
      out << csv_field(r.subject) << "," << csv_field(r.check) << "," << r.status << "," << csv_field(detail)
          << "\n";
    }
  } else {
    for (const auto& r : rows) {
      out << r.subject << "  " << r.check << "  " << r.status;
      if (!r.detail.empty()) out << "  " << r.detail;
      out << "\n";
      for (const auto& l : r.lines) out << "    " << l << "\n";
    }
    out << (pass ? "PASS" : "FAIL") << "\n";
  }
}

struct AuxFunctions {
  NormalForm f1, f2;
  std::vector<NormalForm> modulo;
};

AuxFunctions aux_functions(const ConfigDeck& deck) {
  if (deck.ansatz) return {deck.ansatz->f1, deck.ansatz->f2, {}};
  NormalForm f1 = generic_f1(), f2 = generic_f2();
  return {f1, f2, {constraint_residual(f1, f2)}};
}

bool uses_auxiliary(const Generator& g) {
  auto check = [](const NormalForm& e) {
    for (AtomId a : e.atoms()) {
      const AtomInfo& info = registry().info(a);
      if (info.kind == AtomKind::Jet && registry().function_info(info.function).role == FunctionRole::Auxiliary) {
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < g.space().n(); ++i) {
    for (int k = 0; k <= g.order(); ++k) {
      if (check(g.xi(i, k))) return true;
    }
  }
  for (std::size_t a = 0; a < g.space().m(); ++a) {
    for (int k = 0; k <= g.order(); ++k) {
      if (check(g.eta(a, k))) return true;
    }
  }
  return false;
}

Generator resolve_generator(const ConfigDeck& deck, const std::string& name, const AuxFunctions& aux) {
  if (auto it = deck.literals.find(name); it != deck.literals.end()) return it->second;
  if (name == "xiA") return xi_A(nf("k1"), nf("k2"), nf("k3"), aux.f1, aux.f2);
  if (name == "xiB") return xi_B(nf("k1"), nf("k2"), nf("k3"), nf("k4"), aux.f1, aux.f2);
  auto pos = std::find(kCatalogGenerators.begin(), kCatalogGenerators.begin() + 9, name);
  if (pos == kCatalogGenerators.begin() + 9) throw ConfigError("unknown generator '" + name + "'");
  return catalog_generators(aux.f1, aux.f2)[static_cast<std::size_t>(pos - kCatalogGenerators.begin())];
}

VerificationReport verify_named(const PdeSystem& sys, const Generator& g, const AuxFunctions& aux) {
  return verify_generator(sys, g, uses_auxiliary(g) ? aux.modulo : std::vector<NormalForm>{});
}

std::vector<std::string> determining_lines(const DeterminingSet& d, const PdeSystem& sys) {
  std::vector<std::string> lines;
  std::istringstream in(to_text(d, sys));
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

Generator bind_generator(Generator g, const SubstitutionMap& m) {
  for (std::size_t i = 0; i < g.space().n(); ++i) {
    for (int k = 0; k <= g.order(); ++k) g.xi(i, k) = substitute(g.xi(i, k), m);
  }
  for (std::size_t a = 0; a < g.space().m(); ++a) {
    for (int k = 0; k <= g.order(); ++k) g.eta(a, k) = substitute(g.eta(a, k), m);
  }
  return g;
}

SubstitutionMap numeric_values(const ConfigDeck& deck, const FamilySpec& spec) {
  auto values = default_parameters();
  for (auto& [name, v] : values) {
    if (name == "Re") v = deck.re;
    for (const auto& [oname, ov] : spec.overrides) {
      if (oname == name) v = ov;
    }
  }
  return parameter_substitution(values);
}

void add_report_rows(std::vector<Row>& rows, const std::string& subject, const std::string& check,
                     const CheckReport& r) {
  Row row{subject, check, r.pass ? "PASS" : "FAIL", "", {}};
  for (const auto& f : r.failures) row.lines.push_back(f.label + ": " + to_string(f.residual));
  rows.push_back(row);
}

}  // namespace

FamilySpec ConfigDeck::spec(FamilyId id) const {
  if (auto it = familySpecs.find(id); it != familySpecs.end()) return it->second;
  FamilySpec s;
  s.id = id;
  return s;
}

SamplePlan ConfigDeck::plan(FamilyId id) const {
  FamilySpec s = spec(id);
  SamplePlan p = s.box ? *s.box : default_plan(id);
  p.count = points;
  p.seed = seed;
  return p;
}

ConfigDeck default_deck() {
  ConfigDeck d;
  d.generators = {"xi1", "xi2", "xi3", "xi4", "xi5", "xi6", "xi7", "xi8", "xi9"};
  d.families = all_families();
  d.sweepFamilies = {FamilyId::SCALE_I, FamilyId::TRASL_I, FamilyId::TRASL_II, FamilyId::TRASL_III};
  d.epsList = {1e-1, 1e-2, 1e-3, 1e-4};
  return d;
}

ConfigDeck parse_deck(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ptree_error& e) {
    throw ConfigError(e.what());
  }
  ConfigDeck deck = default_deck();
  // Literal generators first so that [generators] and [determining] can name them.
  for (const auto& [section, body] : tree) {
    if (body.data().size() && body.empty()) throw ConfigError("key '" + section + "' outside any section");
    if (section.rfind("generator.", 0) == 0) {
      std::string name = section.substr(10);
      if (name.empty() || std::find(kCatalogGenerators.begin(), kCatalogGenerators.end(), name) !=
                              kCatalogGenerators.end()) {
        throw ConfigError("invalid literal generator name '" + name + "'");
      }
      deck.literals.emplace(name, literal_generator(name, body));
    }
  }
  auto known_generator = [&](const std::string& n) {
    return deck.literals.count(n) ||
           std::find(kCatalogGenerators.begin(), kCatalogGenerators.end(), n) != kCatalogGenerators.end();
  };
  for (const auto& [section, body] : tree) {
    if (section.rfind("generator.", 0) == 0) continue;
    if (section == "model") {
      check_keys(section, body, {"Re"});
      if (auto v = body.get_optional<std::string>("Re")) {
        deck.re = rational("model.Re", *v);
        if (deck.re <= 0) throw ConfigError("model.Re must be positive");
      }
    } else if (section == "case") {
      read_case(deck, body);
    } else if (section == "generators") {
      check_keys(section, body, {"names"});
      deck.generators = split_list(body.get<std::string>("names", ""));
      if (deck.generators.empty()) throw ConfigError("generators.names is empty");
      for (const auto& n : deck.generators) {
        if (!known_generator(n)) throw ConfigError("unknown generator '" + n + "'");
      }
    } else if (section == "determining") {
      check_keys(section, body, {"generator"});
      deck.determiningGenerator = body.get<std::string>("generator", "");
      if (!known_generator(deck.determiningGenerator)) {
        throw ConfigError("unknown generator '" + deck.determiningGenerator + "'");
      }
    } else if (section == "families") {
      check_keys(section, body, {"names", "repair"});
      if (auto v = body.get_optional<std::string>("names")) {
        deck.families.clear();
        for (const auto& n : split_list(*v)) deck.families.push_back(family_from_deck(n));
        if (deck.families.empty()) throw ConfigError("families.names is empty");
      }
      if (auto v = body.get_optional<std::string>("repair")) deck.repair = boolean("families.repair", *v);
    } else if (section.rfind("family.", 0) == 0) {
      read_family(deck, section.substr(7), body);
    } else if (section == "sweep") {
      check_keys(section, body, {"families", "eps", "points", "seed", "band", "truncate", "precision"});
      for (const auto& [key, value] : body) {
        const std::string& v = value.data();
        std::string where = "sweep." + key;
        if (key == "families") {
          deck.sweepFamilies.clear();
          for (const auto& n : split_list(v)) deck.sweepFamilies.push_back(family_from_deck(n));
          if (deck.sweepFamilies.empty()) throw ConfigError("sweep.families is empty");
        } else if (key == "eps") {
          deck.epsList.clear();
          for (const auto& e : split_list(v)) deck.epsList.push_back(real(where, e));
        } else if (key == "points") {
          long n = integer(where, v);
          if (n <= 0) throw ConfigError("sweep.points must be positive");
          deck.points = static_cast<int>(n);
        } else if (key == "seed") {
          long n = integer(where, v);
          if (n < 0) throw ConfigError("sweep.seed must be non-negative");
          deck.seed = static_cast<std::uint64_t>(n);
        } else if (key == "band") {
          std::tie(deck.bandLo, deck.bandHi) = band(where, v);
        } else if (key == "truncate") {
          deck.truncate = boolean(where, v);
        } else if (v == "double" || v == "quad") {
          deck.precision = v == "quad" ? Precision::Quad : Precision::Double;
        } else {
          throw ConfigError("sweep.precision: expected double or quad");
        }
      }
    } else if (section == "output") {
      check_keys(section, body, {"format", "path"});
      if (auto v = body.get_optional<std::string>("format")) deck.format = *v;
      if (auto v = body.get_optional<std::string>("path")) deck.outPath = *v;
      if (deck.format != "json" && deck.format != "csv" && deck.format != "text") {
        throw ConfigError("output.format must be json, csv or text");
      }
    } else {
      throw ConfigError("unknown section [" + section + "]");
    }
  }
  return deck;
}

ConfigDeck load_deck(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open deck '" + path + "'");
  return parse_deck(in);
}

int cmd_verify_symmetries(const ConfigDeck& deck, std::ostream& out) {
  PdeSystem sys = creeping_system();
  AuxFunctions aux = aux_functions(deck);
  std::vector<Generator> gens;
  for (const auto& name : deck.generators) gens.push_back(resolve_generator(deck, name, aux));
  std::vector<Row> rows;
  std::vector<NormalForm> integrability;
  bool pass = true;
  if (deck.ansatz) {
    NormalForm c = constraint_residual(aux.f1, aux.f2);
    Row row{"case " + to_string(deck.ansatz->caseId), "constraint", c.is_zero() ? "PASS" : "FAIL", "", {}};
    if (!c.is_zero()) row.lines.push_back("residual: " + to_string(c));
    pass = pass && c.is_zero();
    rows.push_back(row);
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    VerificationReport r = verify_named(sys, gens[i], aux);
    Row row{deck.generators[i], "invariance", r.pass ? "PASS" : "FAIL",
            "determining=" + std::to_string(r.determining.size()), determining_lines(r.determining, sys)};
    for (const auto& e : r.integrability) {
      if (std::find(integrability.begin(), integrability.end(), e) == integrability.end()) integrability.push_back(e);
    }
    pass = pass && r.pass;
    rows.push_back(row);
  }
  // Compatibility conditions of the system itself, shared by all generators.
  Row compat{"system", "integrability", "INFO", std::to_string(integrability.size()) + " conditions", {}};
  for (const auto& e : integrability) compat.lines.push_back(to_string(e));
  rows.push_back(compat);
  write_rows("verify-symmetries", rows, pass, deck.format, out);
  return pass ? 0 : 1;
}

int cmd_verify_solutions(const ConfigDeck& deck, std::ostream& out) {
  std::vector<SolutionFamily> families;
  for (FamilyId id : deck.families) {
    SolutionFamily fam = solution_family(id);
    validate_plan(deck.plan(id), fam);
    families.push_back(fam);
  }
  PdeSystem sys = creeping_system();
  std::vector<Row> rows;
  bool pass = true;
  for (SolutionFamily fam : families) {
    const std::string name = to_string(fam.id);
    FamilySpec spec = deck.spec(fam.id);
    SubstitutionMap overrides;
    for (const auto& [pname, v] : spec.overrides) overrides[parse(pname).atom()] = NormalForm(v);
    fam = bind_parameters(fam, overrides);

    CheckReport residual = check_solution(fam);
    if (residual.pass) {
      add_report_rows(rows, name, "residual", residual);
    } else {
      std::optional<SolutionFamily> fixed = deck.repair ? repair(fam) : std::nullopt;
      Row row{name, "residual", fixed ? "REPAIRED" : "FAIL", "", {}};
      for (const auto& f : residual.failures) row.lines.push_back(f.label + ": " + to_string(f.residual));
      if (fixed) {
        for (const auto& note : fixed->repairs) row.lines.push_back(note);
        fam = *fixed;
      } else {
        pass = false;
      }
      rows.push_back(row);
    }

    CheckReport surface = check_surface_conditions(fam, bind_generator(family_generator(fam), overrides));
    add_report_rows(rows, name, "surface", surface);
    pass = pass && surface.pass;

    if (fam.id == FamilyId::BVP_MUD) {
      BoundaryData data = symbolic_boundary();
      data = {substitute(data.uShear, overrides), substitute(data.vSuction, overrides),
              substitute(data.pFar, overrides)};
      CheckReport bvp = check_bvp(fam, data);
      add_report_rows(rows, name, "boundary", bvp);
      rows.back().lines.insert(rows.back().lines.end(), bvp.notes.begin(), bvp.notes.end());
      pass = pass && bvp.pass;
      // At eps = 0 the family is the exact shear and suction flow.
      std::vector<NormalForm> exact = {substitute(nf("ushear*y"), overrides), substitute(nf("-vsuction*x"), overrides),
                                       substitute(nf("pfar"), overrides)};
      std::vector<NormalForm> zero = {fam.u[0], fam.v[0], fam.p[0]};
      Row rec{name, "eps=0 recovery", "PASS", "", {}};
      for (std::size_t i = 0; i < 3; ++i) {
        if (zero[i] != exact[i]) {
          rec.status = "FAIL";
          rec.lines.push_back("component " + std::to_string(i + 1) + ": " + to_string(zero[i]));
        }
      }
      for (const auto& s : solution_residual(fam)) {
        if (!s[0].is_zero()) {
          rec.status = "FAIL";
          rec.lines.push_back("unperturbed residual: " + to_string(s[0]));
        }
      }
      pass = pass && rec.status == "PASS";
      rows.push_back(rec);
    } else {
      CheckReport reduced = check_reduced_system(fam);
      add_report_rows(rows, name, "reduced", reduced);
      pass = pass && reduced.pass;
    }

    SubstitutionMap values = numeric_values(deck, spec);
    double ratio = magnitude_ratio(bind_parameters(fam, values), bind_system(sys, values), deck.plan(fam.id));
    bool ok = ratio < 1e-9;
    rows.push_back({name, "numeric", ok ? "PASS" : "FAIL", "max relative residual " + format_double(ratio), {}});
    pass = pass && ok;
  }
  write_rows("verify-solutions", rows, pass, deck.format, out);
  return pass ? 0 : 1;
}

int cmd_determining(const ConfigDeck& deck, std::ostream& out) {
  if (deck.determiningGenerator.empty()) throw ConfigError("no generator requested for determining");
  PdeSystem sys = creeping_system();
  AuxFunctions aux = aux_functions(deck);
  Generator g = resolve_generator(deck, deck.determiningGenerator, aux);
  VerificationReport r = verify_named(sys, g, aux);
  if (deck.format == "json") {
    Json j;
    j["command"] = "determining";
    j["generator"] = deck.determiningGenerator;
    j["count"] = r.determining.size();
    Json arr = Json::array();
    for (const auto& level : r.determining.perOrder) {
      for (const auto& e : level) {
        Json item;
        item["equation"] = sys.names[e.equation];
        item["order"] = e.order;
        item["monomial"] = to_string(e.monomial);
        item["coefficient"] = to_string(e.coefficient);
        arr.push_back(item);
      }
    }
    j["equations"] = arr;
    Json integ = Json::array();
    for (const auto& e : r.integrability) integ.push_back(to_string(e));
    j["integrability"] = integ;
    out << j.dump(2) << "\n";
  } else if (deck.format == "csv") {
    out << "equation,order,monomial,coefficient\n";
    for (const auto& level : r.determining.perOrder) {
      for (const auto& e : level) {
        out << csv_field(sys.names[e.equation]) << "," << e.order << "," << csv_field(to_string(e.monomial)) << ","
            << csv_field(to_string(e.coefficient)) << "\n";
      }
    }
  } else {
    out << deck.determiningGenerator << ": " << r.determining.size() << " determining equations\n";
    out << to_text(r.determining, sys);
  }
  return 0;
}

int cmd_sweep(const ConfigDeck& deck, std::ostream& out, std::ostream& summary) {
  struct Job {
    SolutionFamily fam;
    SubstitutionMap values;
    SamplePlan plan;
  };
  std::vector<Job> jobs;
  for (FamilyId id : deck.sweepFamilies) {
    SolutionFamily fam = solution_family(id);
    SamplePlan plan = deck.plan(id);
    validate_plan(plan, fam);
    jobs.push_back({fam, numeric_values(deck, deck.spec(id)), plan});
  }
  if (deck.epsList.empty()) throw ConfigError("empty eps list");
  PdeSystem sys = creeping_system();
  std::vector<SweepResult> results;
  for (auto& job : jobs) {
    if (deck.repair) {
      if (auto fixed = repair(job.fam)) job.fam = *fixed;
    }
    if (deck.truncate) job.fam = zero_order_truncation(job.fam);
    results.push_back(eps_sweep(bind_parameters(job.fam, job.values), bind_system(sys, job.values), deck.epsList,
                                job.plan, deck.precision));
  }
  bool pass = true;
  std::vector<std::string> status;
  for (const auto& r : results) {
    bool ok = r.exact || (r.slope >= deck.bandLo && r.slope <= deck.bandHi);
    status.push_back(r.exact ? "EXACT" : ok ? "PASS" : "FAIL");
    pass = pass && ok;
  }
  std::ostringstream sum;
  sum << "band [" << format_double(deck.bandLo) << ", " << format_double(deck.bandHi) << "]\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    sum << to_string(jobs[i].fam.id) << "  slope " << format_double(results[i].slope) << "  " << status[i] << "\n";
  }
  sum << (pass ? "PASS" : "FAIL") << "\n";

  if (deck.format == "json") {
    Json j;
    j["command"] = "sweep";
    j["pass"] = pass;
    j["band"] = {deck.bandLo, deck.bandHi};
    j["truncated"] = deck.truncate;
    Json arr = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      Json f;
      f["family"] = to_string(jobs[i].fam.id);
      f["status"] = status[i];
      f["slope"] = r.exact ? Json(nullptr) : Json(r.slope);
      f["eps"] = r.epsValues;
      f["max"] = r.residualNorms;
      Json per = Json::array();
      for (const auto& row : r.perEquation) per.push_back(row);
      f["perEquation"] = per;
      arr.push_back(f);
    }
    j["families"] = arr;
    out << j.dump(2) << "\n";
  } else {
    if (deck.format == "text") out << sum.str();
    out << "family,eps,residual_eq1,residual_eq2,residual_eq3,max\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      for (std::size_t k = 0; k < r.epsValues.size(); ++k) {
        out << to_string(jobs[i].fam.id) << "," << format_double(r.epsValues[k]);
        for (double v : r.perEquation[k]) out << "," << format_double(v);
        out << "," << format_double(r.residualNorms[k]) << "\n";
      }
    }
  }
  if (deck.format != "text") summary << sum.str();
  return pass ? 0 : 1;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate Lie symmetry verification"};
  app.require_subcommand(1);
  std::string deckPath, outPath, format, bandText;
  std::optional<std::uint64_t> seed;
  std::string generator;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--deck", deckPath, "Config deck (INI)");
    sub->add_option("--out", outPath, "Output file (default: standard output)");
    sub->add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--seed", seed, "Sampling seed");
    sub->add_option("--strict-band", bandText, "Accepted slope band lo,hi");
  };
  CLI::App* sym = app.add_subcommand("verify-symmetries", "Verify generators");
  CLI::App* sol = app.add_subcommand("verify-solutions", "Verify solution families");
  CLI::App* det = app.add_subcommand("determining", "Print the determining equations of one generator");
  CLI::App* swp = app.add_subcommand("sweep", "Truncation-order sweep in eps");
  for (CLI::App* s : {sym, sol, det, swp}) common(s);
  det->add_option("--generator", generator, "Generator name");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    ConfigDeck deck = deckPath.empty() ? default_deck() : load_deck(deckPath);
    if (!format.empty()) deck.format = format;
    if (!outPath.empty()) deck.outPath = outPath;
    if (seed) deck.seed = *seed;
    if (!bandText.empty()) std::tie(deck.bandLo, deck.bandHi) = band("--strict-band", bandText);
    if (!generator.empty()) deck.determiningGenerator = generator;

    std::ostringstream report;
    int code = 0;
    if (sym->parsed()) {
      code = cmd_verify_symmetries(deck, report);
    } else if (sol->parsed()) {
      code = cmd_verify_solutions(deck, report);
    } else if (det->parsed()) {
      code = cmd_determining(deck, report);
    } else {
      code = cmd_sweep(deck, report, err);
    }
    if (deck.outPath.empty()) {
      out << report.str();
    } else {
      std::ofstream file(deck.outPath, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + deck.outPath + "'");
      file << report.str();
    }
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace approxlie
