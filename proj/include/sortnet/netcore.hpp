#pragma once

#include <optional>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet {

/// Largest n for which output sets are materialized (2^n candidate words).
inline constexpr int kMaxEnumerableChannels = 30;

/// Runs a word through the network. Works for generalized networks too: every
/// comparator routes the minimum to its `top` endpoint.
Word apply(const ComparatorNetwork& net, Word input);
Word apply(const Layer& layer, Word input);

/// Checked variants; throw std::invalid_argument on a length mismatch.
BitWord evaluate(const ComparatorNetwork& net, BitWord input);
std::vector<BitWord> trace(const ComparatorNetwork& net, BitWord input);

OutputSet all_words(int n);
/// Image of `inputs` under the network, layer by layer.
OutputSet image(const ComparatorNetwork& net, const OutputSet& inputs);
OutputSet outputs(const ComparatorNetwork& net);

/// Exhaustive zero-one check, 64 inputs per machine word.
bool is_sorting_network(const ComparatorNetwork& net);
/// True iff every word of `inputs` is sorted by the network.
bool sorts_all(const ComparatorNetwork& net, const OutputSet& inputs);
OutputSet sorts_set(const ComparatorNetwork& net);

struct WindowStats {
  int leading_zeros = 0;
  int trailing_ones = 0;
  int window = 0;

  friend bool operator==(const WindowStats&, const WindowStats&) = default;
};

WindowStats window_stats(Word w, int n);
inline WindowStats window_stats(BitWord w) { return window_stats(w.bits, w.n); }
long long window_sum(const OutputSet& set);

ComparatorNetwork permute(const ComparatorNetwork& net, const ChannelPermutation& perm);

/// Knuth's untangling: front to back, a reversed (i,j) becomes (j,i) and
/// channels i and j are interchanged in all later layers.
ComparatorNetwork standardize_forward(const ComparatorNetwork& gnet);

/// Back to front: take the last layer k holding a reversed (i,j) and
/// interchange i and j in layers 1..k; repeat until standard.
ComparatorNetwork standardize_dual(const ComparatorNetwork& gnet);

/// Reverses channel order, which maps sorting networks to sorting networks
/// and outputs(C) to the complemented reversal of outputs(C).
ComparatorNetwork reflect(const ComparatorNetwork& net);

/// `comp` must be a comparator of layer `layer_index` (0-based). Redundant iff
/// its min endpoint never carries a 1 while its max endpoint carries a 0 on
/// the outputs of everything before it.
bool is_redundant(const ComparatorNetwork& net, int layer_index, Comparator comp);

/// Drops redundant comparators until none remain, then drops empty layers.
ComparatorNetwork remove_redundant(const ComparatorNetwork& net);
/// Same, but empty layers are kept so depth is preserved.
ComparatorNetwork remove_redundant_keep_depth(const ComparatorNetwork& net);

/// Exhaustive search for pi with pi(from) ⊆ into. Backtracks channel by
/// channel, pruned by per-popcount 0/1 counts per channel and by projection
/// onto the channels assigned so far.
std::optional<ChannelPermutation> find_inclusion(const OutputSet& from, const OutputSet& into);

/// Witness pi with pi(outputs(c)) ⊆ outputs(c2).
std::optional<ChannelPermutation> subsumes(const ComparatorNetwork& c, const ComparatorNetwork& c2);
/// Witness pi with pi(sorts(c)) ⊆ sorts(c2).
std::optional<ChannelPermutation> cosubsumes(const ComparatorNetwork& c, const ComparatorNetwork& c2);

/// Complement of every word (bit-wise negation on n channels).
OutputSet complement(const OutputSet& set);

/// Subsumption that also accepts the complemented output set, i.e. the
/// reflection of `c` composed with a permutation.
struct ReflectedWitness {
  ChannelPermutation perm;
  bool complemented = false;
};
std::optional<ReflectedWitness> subsumes_up_to_reflection(const OutputSet& c, const OutputSet& c2);

/// Exhaustively checks x <= y  =>  C(x) <= C(y).
bool monotone_check(const ComparatorNetwork& net);

}  // namespace sortnet
