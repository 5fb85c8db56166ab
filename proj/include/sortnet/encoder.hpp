#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet {

struct EncodeOptions {
  bool improved_windows = false;
  bool prune_inert_updates = false;
  bool one_up_down_clauses = false;
  bool last_layer_necessary = false;     // phi1, phi2
  bool last_layer_implications = false;  // phi3, phi4
  bool cosat_breaks = false;             // psi1, psi2, psi3
  bool generalized_phi1_per_layer = false;

  static EncodeOptions none() { return {}; }
  /// Everything except the per-layer phi1 generalization.
  static EncodeOptions all();

  /// Flags that constrain layer d-1 need two encoded layers.
  bool uses_last_two_layers() const;
  /// Copy with the last-layer flags cleared when fewer than two layers remain.
  EncodeOptions applicable_for(int layers) const;

  /// Comma separated flag names, or "none".
  std::string to_string() const;
  static EncodeOptions parse(const std::string& text);

  friend bool operator==(const EncodeOptions&, const EncodeOptions&) = default;
};

/// All 2^7 flag combinations, in binary counting order.
std::vector<EncodeOptions> all_option_combinations();

enum class VarKind : std::uint8_t { kG, kUsed, kV, kOneDown, kOneUp };

/// Dense 1..V numbering of named variables. Layers are numbered 1..D here,
/// matching the encoded layers rather than the full network.
class VarRegistry {
 public:
  struct Entry {
    VarKind kind;
    int input = -1;  // index into the encoded input list, v only
    int k = 0;
    int i = 0;
    int j = 0;
  };

  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(int var) const { return entries_.at(static_cast<std::size_t>(var - 1)); }

  /// Returns 0 when the variable does not exist.
  int find(VarKind kind, int input, int k, int i, int j = 0) const;
  int g(int k, int i, int j) const { return find(VarKind::kG, -1, k, i, j); }
  int used(int k, int i) const { return find(VarKind::kUsed, -1, k, i); }

  int add(VarKind kind, int input, int k, int i, int j = 0);

  /// Sidecar form {"g":[[k,i,j,var],...],"used":...,"meta":{...}}.
  std::string to_json(const std::string& meta_json = "{}") const;
  static VarRegistry from_json(const std::string& text);

 private:
  static std::uint64_t key(VarKind kind, int input, int k, int i, int j);
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, int> index_;
};

struct CnfMetadata {
  int n = 0;
  int layers = 0;
  std::size_t inputs = 0;
  std::string prefix_hash;
  std::string options;
  std::string warning;
};

/// Clause database stored flat, each clause terminated by 0.
class CnfInstance {
 public:
  int num_vars = 0;
  CnfMetadata meta;

  void add_clause(std::span<const int> lits);
  void add_clause(std::initializer_list<int> lits) { add_clause(std::span<const int>(lits.begin(), lits.size())); }
  std::size_t num_clauses() const { return clause_count_; }
  const std::vector<int>& flat() const { return lits_; }
  std::vector<std::vector<int>> clauses() const;

 private:
  friend class Encoder;
  std::vector<int> lits_;
  std::size_t clause_count_ = 0;
};

struct Encoding {
  CnfInstance cnf;
  VarRegistry registry;
};

/// CNF satisfiable iff some standard network of `layers` layers sorts every
/// word of `inputs`. Sorted inputs contribute nothing. Throws
/// std::invalid_argument when last-layer flags are set and layers < 2.
Encoding encode(int n, int layers, const OutputSet& inputs, const EncodeOptions& opts,
                const std::string& prefix_hash = "");

/// The phi/psi clauses selected by `opts` over the g and used variables of
/// the last two layers. `registry` must already hold those variables.
std::vector<std::vector<int>> encode_last_layer_constraints(int n, int layers, const EncodeOptions& opts,
                                                            const VarRegistry& registry);

/// Registry holding only the g and used blocks, in encoder order.
VarRegistry network_registry(int n, int layers);

std::string emit_dimacs(const CnfInstance& cnf, const std::string& registry_hash = "");
void write_dimacs(std::ostream& out, const CnfInstance& cnf, const std::string& registry_hash = "");

/// model[var] is 1 (true), -1 (false) or 0 (unassigned); index 0 is unused.
using Assignment = std::vector<signed char>;

/// Network of `layers` layers read off the g variables. Empty layers are
/// kept. Throws std::runtime_error on unassigned g variables or overlapping
/// comparators.
ComparatorNetwork decode_model(const Assignment& model, const VarRegistry& registry, int n, int layers);

}  // namespace sortnet
