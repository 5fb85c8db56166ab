#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet {

/// {(2i-1, 2i)} for 1 <= i <= n/2.
Layer first_layer_P(int n);
/// {(i, n+1-i)} for 1 <= i <= n/2.
Layer first_layer_BZ(int n);

/// Layer t joins i and i + 2^(t-1) whenever bit t-1 of i-1 is clear.
ComparatorNetwork green_filter(int n, int depth);

/// Number of matchings of the complete graph on n vertices, the empty one
/// included. Throws std::overflow_error when it does not fit 64 bits.
std::uint64_t matching_count(int n);
/// Non-empty layers only, i.e. matching_count(n) - 1.
std::uint64_t count_layers(int n);

inline constexpr int kMaxStreamedLayerChannels = 20;
/// Streams every non-empty layer in canonical order. Return false from
/// `visit` to stop early.
void for_each_layer(int n, const std::function<bool(const Layer&)>& visit);
std::vector<Layer> enumerate_layers(int n);

/// Second layers L2 such that no L2' strictly containing L2 gives a strictly
/// smaller output set after `first`. `first` must be maximal on n channels.
std::vector<Layer> saturated_second_layers(int n, const Layer& first);

struct FilterSet {
  int n = 0;
  std::vector<ComparatorNetwork> prefixes;
  std::map<std::string, std::string> provenance;
};

inline constexpr int kDefaultFilterLimit = 11;

/// Saturated two-layer prefixes over first_layer_P(n), pruned to an antichain
/// by subsumption up to reflection. Smallest output sets are kept first.
FilterSet complete_filter_set(int n, int limit = kDefaultFilterLimit);

/// One JSON network per line, preceded by a header line with provenance.
std::string to_json_lines(const FilterSet& set);
FilterSet filter_set_from_json_lines(const std::string& text);

struct BoundRange {
  int lower = 0;
  int upper = 0;
};

struct KnownBound {
  int n = 0;
  BoundRange size;
  BoundRange depth;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  ComparatorNetwork network;
  int prefix_depth = 0;  // 0 when the entry carries no distinguished prefix

  ComparatorNetwork prefix() const { return network.prefix(prefix_depth); }
};

class Catalog {
 public:
  Catalog(std::vector<CatalogEntry> entries, std::vector<KnownBound> bounds, int version);

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const std::vector<KnownBound>& known_bounds() const { return bounds_; }
  int version() const { return version_; }

  /// Throws std::out_of_range for an unknown name.
  const CatalogEntry& at(const std::string& name) const;
  std::optional<KnownBound> bounds_for(int n) const;

 private:
  std::vector<CatalogEntry> entries_;
  std::vector<KnownBound> bounds_;
  int version_ = 0;
};

const Catalog& catalog();
Catalog parse_catalog(const std::string& json_text);

}  // namespace sortnet
