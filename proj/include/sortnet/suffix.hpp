#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet {

/// Connected components of the channel graph formed by the comparators of
/// layers k..depth-1 (0-based). Blocks are listed by smallest channel.
struct BlockPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

BlockPartition k_blocks(const ComparatorNetwork& net, int k);

/// For every k < depth, at most one k-block sees both a 0 and a 1 after layer
/// k. Throws std::invalid_argument if `net` does not sort.
bool mixed_block_check(const ComparatorNetwork& net, Word input);

struct SuffixViolation {
  enum class Kind {
    kNonAdjacentLastLayer,   // (i,j) with j > i+1 in the last layer
    kPenultimateTooWide,     // (i,j) with j > i+3 in layer d-1
    kGapTwoUnsupported,      // (i,i+2) in d-1 without (i,i+1) or (i+1,i+2) in d
    kGapThreeUnsupported,    // (i,i+3) in d-1 without both (i,i+1) and (i+2,i+3) in d
  };
  Kind kind;
  int layer = 0;  // 0-based
  Comparator comparator;
  std::string message;
};

std::vector<SuffixViolation> validate_suffix_conditions(const ComparatorNetwork& net);

/// Removes redundant comparators (keeping depth) and fills every adjacent pair
/// of unused last-layer channels with a comparator, scanning from channel 1.
ComparatorNetwork to_llnf(const ComparatorNetwork& net);
bool is_llnf(const ComparatorNetwork& net);

/// Rewrites a sorting network into a co-saturated one of the same depth.
ComparatorNetwork cosaturate(const ComparatorNetwork& net);
bool is_cosaturated(const ComparatorNetwork& net);

enum class SuffixKind { kNonredundantLastLayer, kLlnfLastLayer, kCosaturatedTwoLayer };

std::string to_string(SuffixKind kind);

struct EnumerationReport {
  int n = 0;
  SuffixKind kind = SuffixKind::kLlnfLastLayer;
  std::uint64_t count = 0;
  /// Each item is a suffix of depth 1 or 2 (the last layer always last).
  std::vector<ComparatorNetwork> items;
};

std::string to_json(const EnumerationReport& report);

/// Last layers with adjacent-only comparators (F_{n+1} - 1 of them), or those
/// additionally without two adjacent unused channels (P_{n+5}).
EnumerationReport enumerate_last_layers(int n, SuffixKind mode, bool materialize = false);

/// Two-layer suffixes whose last layer is in llnf, whose layer d-1 only joins
/// channels of adjacent blocks, and which satisfy the co-saturation
/// conditions. `visit`, when set, sees each suffix in canonical order.
EnumerationReport enumerate_cosat_suffixes(int n, bool materialize = false,
                                           const std::function<void(const ComparatorNetwork&)>& visit = {});

}  // namespace sortnet
