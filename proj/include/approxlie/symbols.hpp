#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace approxlie {

class NormalForm;

using AtomId = std::uint32_t;
using FunctionId = std::uint32_t;

enum class AtomKind : std::uint8_t { Independent, Parameter, Jet, Transcendental };
enum class Transcendental : std::uint8_t { Log, Exp, Sin, Cos, Arctan };

std::string_view transcendental_name(Transcendental fn);
std::optional<Transcendental> transcendental_from_name(std::string_view name);

// Dependent: unexpanded unknown (u, v, p). Expanded: order-k coefficient u_k of
// a dependent. Auxiliary: a known-but-arbitrary function such as f1(x, y).
// Coefficient: an unspecified coefficient function of the order-0 dependents,
// used by the order recursion.
enum class FunctionRole : std::uint8_t { Dependent, Expanded, Auxiliary, Coefficient };

struct FunctionInfo {
  std::string name;
  std::vector<AtomId> args;
  FunctionRole role = FunctionRole::Auxiliary;
  FunctionId base = 0;
  int order = -1;
};

struct AtomInfo {
  AtomKind kind = AtomKind::Parameter;
  std::string name;
  std::string sortKey;
  FunctionId function = 0;
  std::vector<int> index;
  Transcendental fn = Transcendental::Log;
  std::shared_ptr<const NormalForm> arg;
  AtomId partner = 0;

  int jet_order() const;
};

// Append-only storage whose elements never move, so readers holding an id can
// access the element without taking the registry lock.
template <class T>
class StableArray {
 public:
  static constexpr std::size_t kChunkBits = 10;
  static constexpr std::size_t kChunkSize = std::size_t{1} << kChunkBits;

  StableArray() { chunks_.reserve(std::size_t{1} << 14); }

  std::size_t push(T value) {
    std::size_t id = size_;
    if ((id & (kChunkSize - 1)) == 0) {
      chunks_.push_back(std::make_unique<T[]>(kChunkSize));
    }
    chunks_[id >> kChunkBits][id & (kChunkSize - 1)] = std::move(value);
    ++size_;
    return id;
  }

  const T& operator[](std::size_t i) const { return chunks_[i >> kChunkBits][i & (kChunkSize - 1)]; }
  std::size_t size() const { return size_; }

 private:
  std::vector<std::unique_ptr<T[]>> chunks_;
  std::size_t size_ = 0;
};

// Process-wide, thread-safe symbol table. Names are unique across atom kinds.
class Registry {
 public:
  static Registry& instance();

  AtomId independent(std::string_view name);
  AtomId parameter(std::string_view name);
  FunctionId function(std::string_view name, std::vector<AtomId> args, FunctionRole role,
                      std::optional<FunctionId> base = std::nullopt, int order = -1);
  AtomId jet(FunctionId f, std::vector<int> index);
  AtomId jet(FunctionId f) { return jet(f, std::vector<int>(function_info(f).args.size(), 0)); }
  // Interns a transcendental atom for an already canonical argument.
  AtomId transcendental(Transcendental fn, const NormalForm& arg);

  std::optional<AtomId> find_named(std::string_view name) const;
  std::optional<FunctionId> find_function(std::string_view name) const;

  const AtomInfo& info(AtomId id) const { return atoms_[id]; }
  const FunctionInfo& function_info(FunctionId id) const { return functions_[id]; }
  std::size_t atom_count() const;

  // Frequently used symbols.
  AtomId x() const { return x_; }
  AtomId y() const { return y_; }
  AtomId w() const { return w_; }
  AtomId eps() const { return eps_; }
  AtomId re() const { return re_; }

 private:
  Registry();
  AtomId add_atom(AtomInfo info, const std::string& key);
  AtomId named(std::string_view name, AtomKind kind);

  mutable std::shared_mutex mutex_;
  StableArray<AtomInfo> atoms_;
  StableArray<FunctionInfo> functions_;
  std::unordered_map<std::string, AtomId> atomKeys_;
  std::unordered_map<std::string, FunctionId> functionNames_;
  AtomId x_ = 0, y_ = 0, w_ = 0, eps_ = 0, re_ = 0;
};

inline Registry& registry() { return Registry::instance(); }

// Sort key that orders embedded digit runs numerically (k2 before k10).
std::string natural_key(std::string_view name);

}  // namespace approxlie
