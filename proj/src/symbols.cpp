#include "approxlie/symbols.hpp"

#include <cctype>
#include <numeric>

#include "approxlie/errors.hpp"
#include "approxlie/normal_form.hpp"

namespace approxlie {

namespace {

constexpr std::string_view kFunctionNames[] = {"log", "exp", "sin", "cos", "arctan"};

char kind_rank(AtomKind kind) {
  switch (kind) {
    case AtomKind::Parameter: return '0';
    case AtomKind::Independent: return '1';
    case AtomKind::Jet: return '2';
    case AtomKind::Transcendental: return '3';
  }
  return '9';
}

}  // namespace

std::string_view transcendental_name(Transcendental fn) { return kFunctionNames[static_cast<int>(fn)]; }

std::optional<Transcendental> transcendental_from_name(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kFunctionNames[i] == name) return static_cast<Transcendental>(i);
  }
  return std::nullopt;
}

std::string natural_key(std::string_view name) {
  std::string out;
  std::size_t i = 0;
  while (i < name.size()) {
    if (std::isdigit(static_cast<unsigned char>(name[i]))) {
      std::size_t j = i;
      while (j < name.size() && std::isdigit(static_cast<unsigned char>(name[j]))) ++j;
      std::string digits(name.substr(i, j - i));
      if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
      out += digits;
      i = j;
    } else {
      out += name[i++];
    }
  }
  return out;
}

int AtomInfo::jet_order() const { return std::accumulate(index.begin(), index.end(), 0); }

Registry& Registry::instance() {
  static Registry r;
  return r;
}

Registry::Registry() {
  x_ = independent("x");
  y_ = independent("y");
  w_ = independent("w");
  eps_ = parameter("eps");
  re_ = parameter("Re");
  for (const char* name : {"u", "v", "p"}) {
    FunctionId base = function(name, {x_, y_}, FunctionRole::Dependent);
    for (int k = 0; k <= 3; ++k) function(name + std::to_string(k), {x_, y_}, FunctionRole::Expanded, base, k);
  }
  function("f1", {x_, y_}, FunctionRole::Auxiliary);
  function("f2", {x_}, FunctionRole::Auxiliary);
  for (const char* name : {"U0", "V0", "P0", "U1", "V1", "P1"}) function(name, {w_}, FunctionRole::Auxiliary);
}

AtomId Registry::add_atom(AtomInfo info, const std::string& key) {
  auto id = static_cast<AtomId>(atoms_.push(std::move(info)));
  atomKeys_.emplace(key, id);
  return id;
}

AtomId Registry::named(std::string_view name, AtomKind kind) {
  std::string key(name);
  {
    std::shared_lock lock(mutex_);
    auto it = atomKeys_.find(key);
    if (it != atomKeys_.end()) {
      if (atoms_[it->second].kind != kind) {
        throw ConfigError("symbol '" + key + "' already declared with a different kind");
      }
      return it->second;
    }
  }
  std::unique_lock lock(mutex_);
  auto it = atomKeys_.find(key);
  if (it != atomKeys_.end()) return it->second;
  if (functionNames_.count(key)) throw ConfigError("symbol '" + key + "' is a function name");
  AtomInfo info;
  info.kind = kind;
  info.name = key;
  info.sortKey = std::string(1, kind_rank(kind)) + natural_key(key);
  return add_atom(std::move(info), key);
}

AtomId Registry::independent(std::string_view name) { return named(name, AtomKind::Independent); }
AtomId Registry::parameter(std::string_view name) { return named(name, AtomKind::Parameter); }

FunctionId Registry::function(std::string_view name, std::vector<AtomId> args, FunctionRole role,
                              std::optional<FunctionId> base, int order) {
  std::string key(name);
  std::unique_lock lock(mutex_);
  auto it = functionNames_.find(key);
  if (it != functionNames_.end()) {
    const FunctionInfo& existing = functions_[it->second];
    if (existing.args != args || existing.role != role) {
      throw ConfigError("function '" + key + "' already declared with a different signature");
    }
    return it->second;
  }
  if (atomKeys_.count(key)) throw ConfigError("function name '" + key + "' is already a symbol");
  FunctionInfo info;
  info.name = key;
  info.args = std::move(args);
  info.role = role;
  info.order = order;
  auto id = static_cast<FunctionId>(functions_.size());
  info.base = base.value_or(id);
  functions_.push(std::move(info));
  functionNames_.emplace(key, id);
  return id;
}

AtomId Registry::jet(FunctionId f, std::vector<int> index) {
  const FunctionInfo& fi = functions_[f];
  if (index.size() != fi.args.size()) throw Error("jet index has wrong length for " + fi.name);
  std::string name = fi.name;
  bool any = false;
  for (int k : index) {
    if (k < 0) throw Error("negative jet index for " + fi.name);
    any = any || k > 0;
  }
  if (any) {
    if (fi.role == FunctionRole::Coefficient) {
      name += "[";
      for (std::size_t i = 0; i < index.size(); ++i) {
        for (int k = 0; k < index[i]; ++k) name += (name.back() == '[' ? "" : ",") + atoms_[fi.args[i]].name;
      }
      name += "]";
    } else {
      name += "_";
      for (std::size_t i = 0; i < index.size(); ++i) name.append(static_cast<std::size_t>(index[i]), atoms_[fi.args[i]].name[0]);
    }
  }
  std::string key = "jet:" + name;
  {
    std::shared_lock lock(mutex_);
    auto it = atomKeys_.find(key);
    if (it != atomKeys_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  auto it = atomKeys_.find(key);
  if (it != atomKeys_.end()) return it->second;
  AtomInfo info;
  info.kind = AtomKind::Jet;
  info.name = name;
  info.sortKey = "2" + natural_key(name);
  info.function = f;
  info.index = std::move(index);
  return add_atom(std::move(info), key);
}

AtomId Registry::transcendental(Transcendental fn, const NormalForm& arg) {
  std::string argText = to_string(arg);
  std::string name = std::string(transcendental_name(fn)) + "(" + argText + ")";
  std::string key = "fn:" + name;
  {
    std::shared_lock lock(mutex_);
    auto it = atomKeys_.find(key);
    if (it != atomKeys_.end()) return it->second;
  }
  bool paired = fn == Transcendental::Sin || fn == Transcendental::Cos;
  std::unique_lock lock(mutex_);
  auto it = atomKeys_.find(key);
  if (it != atomKeys_.end()) return it->second;
  auto shared = std::make_shared<const NormalForm>(arg);
  auto make = [&](Transcendental f) {
    AtomInfo info;
    info.kind = AtomKind::Transcendental;
    info.name = std::string(transcendental_name(f)) + "(" + argText + ")";
    info.sortKey = "3" + natural_key(argText) + "|" + std::string(transcendental_name(f));
    info.fn = f;
    info.arg = shared;
    return info;
  };
  AtomId id = add_atom(make(fn), key);
  if (paired) {
    Transcendental other = fn == Transcendental::Sin ? Transcendental::Cos : Transcendental::Sin;
    AtomInfo info = make(other);
    info.partner = id;
    std::string otherKey = "fn:" + info.name;
    AtomId otherId = add_atom(std::move(info), otherKey);
    const_cast<AtomInfo&>(atoms_[id]).partner = otherId;
  }
  return id;
}

std::optional<AtomId> Registry::find_named(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = atomKeys_.find(std::string(name));
  if (it == atomKeys_.end()) return std::nullopt;
  return it->second;
}

std::optional<FunctionId> Registry::find_function(std::string_view name) const {
  std::shared_lock lock(mutex_);
  auto it = functionNames_.find(std::string(name));
  if (it == functionNames_.end()) return std::nullopt;
  return it->second;
}

std::size_t Registry::atom_count() const {
  std::shared_lock lock(mutex_);
  return atoms_.size();
}

}  // namespace approxlie
