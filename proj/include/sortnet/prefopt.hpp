#pragma once

#include <cstdint>
#include <random>

#include "sortnet/network.hpp"

namespace sortnet {

struct OptimizerConfig {
  int population_size = 32;
  int iterations = 20;
  int swaps_per_mutation = 1;
  std::uint64_t rng_seed = 0;
};

struct OptimizedPrefix {
  ComparatorNetwork original;
  ChannelPermutation permutation;
  ComparatorNetwork result;  // standardize_forward(permute(original, permutation))
  long long fitness = 0;     // window_sum(outputs(result))
};

/// Total window size over the outputs of `prefix`.
long long fitness(const ComparatorNetwork& prefix);

/// A random transposition of two distinct channels.
ChannelPermutation random_transposition(int n, std::mt19937_64& rng);

/// `swaps` random channel transpositions, then untangling.
ComparatorNetwork mutate(const ComparatorNetwork& prefix, std::mt19937_64& rng, int swaps = 1);

/// Evolutionary search over channel permutations. Deterministic for a seed.
OptimizedPrefix optimize_prefix(const ComparatorNetwork& prefix, const OptimizerConfig& config = {});

/// Best fitness over all n! permutations; n <= 8.
OptimizedPrefix exhaustive_optimum(const ComparatorNetwork& prefix);

}  // namespace sortnet
