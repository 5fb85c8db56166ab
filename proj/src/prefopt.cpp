#include "sortnet/prefopt.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sortnet/netcore.hpp"

namespace sortnet {

namespace {

struct Individual {
  ChannelPermutation perm;
  ComparatorNetwork net;
  long long fit = 0;
  std::string text;
};

Individual make(const ComparatorNetwork& original, ChannelPermutation perm) {
  Individual ind;
  ind.net = standardize_forward(permute(original, perm));
  ind.perm = std::move(perm);
  ind.text = format_network(ind.net);
  return ind;
}

void evaluate_all(std::vector<Individual>& pop, std::size_t from) {
  const std::size_t count = pop.size() - from;
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = from; i < pop.size(); ++i) pop[i].fit = fitness(pop[i].net);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = from + w; i < pop.size(); i += workers) pop[i].fit = fitness(pop[i].net);
    });
  for (auto& t : pool) t.join();
}

ChannelPermutation draw(const ChannelPermutation& base, std::mt19937_64& rng, int swaps) {
  ChannelPermutation p = base;
  for (int s = 0; s < swaps; ++s) p = random_transposition(base.size(), rng).after(p);
  return p;
}

}  // namespace

long long fitness(const ComparatorNetwork& prefix) { return window_sum(outputs(prefix)); }

ChannelPermutation random_transposition(int n, std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("a transposition needs two channels");
  std::uniform_int_distribution<int> pick(1, n);
  int a = pick(rng), b = pick(rng);
  while (b == a) b = pick(rng);
  return ChannelPermutation::transposition(n, a, b);
}

ComparatorNetwork mutate(const ComparatorNetwork& prefix, std::mt19937_64& rng, int swaps) {
  if (prefix.channels() < 2) return prefix;
  return standardize_forward(permute(prefix, draw(ChannelPermutation::identity(prefix.channels()), rng, swaps)));
}

OptimizedPrefix optimize_prefix(const ComparatorNetwork& prefix, const OptimizerConfig& config) {
  if (config.population_size < 1) throw std::invalid_argument("population size must be positive");
  if (config.iterations < 0) throw std::invalid_argument("iterations must be non-negative");
  if (config.swaps_per_mutation < 1) throw std::invalid_argument("swaps per mutation must be positive");
  const int n = prefix.channels();
  const auto better = [](const Individual& a, const Individual& b) {
    return a.fit != b.fit ? a.fit < b.fit : a.text < b.text;
  };

  std::vector<Individual> pop;
  pop.push_back(make(prefix, ChannelPermutation::identity(n)));
  pop.front().fit = fitness(pop.front().net);
  if (config.iterations == 0 || n < 2)
    return {prefix, pop.front().perm, pop.front().net, pop.front().fit};

  std::mt19937_64 rng(config.rng_seed);
  for (int i = 1; i < config.population_size; ++i)
    pop.push_back(make(prefix, draw(pop.front().perm, rng, config.swaps_per_mutation)));
  evaluate_all(pop, 1);

  auto select = [&] {
    std::stable_sort(pop.begin(), pop.end(), better);
    std::set<std::string> seen;
    std::vector<Individual> next;
    for (auto& ind : pop) {
      if (static_cast<int>(next.size()) == config.population_size) break;
      if (seen.insert(ind.text).second) next.push_back(std::move(ind));
    }
    pop = std::move(next);
  };
  select();

  for (int it = 0; it < config.iterations; ++it) {
    const std::size_t parents = pop.size();
    for (std::size_t p = 0; p < parents; ++p)
      pop.push_back(make(prefix, draw(pop[p].perm, rng, config.swaps_per_mutation)));
    evaluate_all(pop, parents);
    select();
  }
  const auto& best = pop.front();
  return {prefix, best.perm, best.net, best.fit};
}

OptimizedPrefix exhaustive_optimum(const ComparatorNetwork& prefix) {
  const int n = prefix.channels();
  if (n > 8) throw std::invalid_argument("exhaustive permutation search is limited to n <= 8");
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 1);
  std::optional<Individual> best;
  do {
    auto ind = make(prefix, ChannelPermutation(images));
    ind.fit = fitness(ind.net);
    if (!best || ind.fit < best->fit || (ind.fit == best->fit && ind.text < best->text)) best = std::move(ind);
  } while (std::next_permutation(images.begin(), images.end()));
  return {prefix, best->perm, best->net, best->fit};
}

}  // namespace sortnet
