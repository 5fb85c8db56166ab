#include "sortnet/suffix.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "sortnet/netcore.hpp"

namespace sortnet {

namespace {

Word bit(int channel) { return Word{1} << (channel - 1); }

bool used_in(Word used, int channel) { return (used >> (channel - 1)) & 1; }

void require_sorting(const ComparatorNetwork& net) {
  if (!is_sorting_network(net)) throw std::invalid_argument("network is not a sorting network");
}

struct UnionFind {
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
  std::vector<int> parent;
};

bool has_comparator(const Layer& layer, int a, int b) {
  return std::any_of(layer.begin(), layer.end(), [&](const Comparator& c) { return c.low() == a && c.high() == b; });
}

// Blocks of an adjacent-only last layer, each given by its channel bit set.
std::vector<Word> last_layer_blocks(const ComparatorNetwork& net) {
  std::vector<Word> out;
  for (const auto& block : k_blocks(net, net.depth() - 1).blocks) {
    Word b = 0;
    for (int c : block) b |= bit(c);
    out.push_back(b);
  }
  return out;
}

}  // namespace

BlockPartition k_blocks(const ComparatorNetwork& net, int k) {
  if (k < 0 || k >= net.depth()) throw std::out_of_range("k must satisfy 0 <= k < depth");
  const int n = net.channels();
  UnionFind uf(n);
  for (int layer = k; layer < net.depth(); ++layer)
    for (const auto& c : net.layer(layer)) uf.unite(c.top - 1, c.bottom - 1);
  BlockPartition p{k, {}};
  std::vector<int> index_of_root(static_cast<std::size_t>(n), -1);
  for (int c = 0; c < n; ++c) {
    const int r = uf.find(c);
    auto& idx = index_of_root[static_cast<std::size_t>(r)];
    if (idx < 0) {
      idx = static_cast<int>(p.blocks.size());
      p.blocks.emplace_back();
    }
    p.blocks[static_cast<std::size_t>(idx)].push_back(c + 1);
  }
  return p;
}

bool mixed_block_check(const ComparatorNetwork& net, Word input) {
  require_sorting(net);
  const auto steps = trace(net, {net.channels(), input});
  for (int k = 0; k < net.depth(); ++k) {
    const Word values = steps[static_cast<std::size_t>(k)].bits;
    int mixed = 0;
    for (const auto& block : k_blocks(net, k).blocks) {
      bool zero = false, one = false;
      for (int c : block) ((values >> (c - 1)) & 1 ? one : zero) = true;
      if (zero && one) ++mixed;
    }
    if (mixed > 1) return false;
  }
  return true;
}

std::vector<SuffixViolation> validate_suffix_conditions(const ComparatorNetwork& net) {
  std::vector<SuffixViolation> out;
  const int d = net.depth();
  if (d == 0) return out;
  const auto& last = net.layer(d - 1);
  auto describe = [](Comparator c) { return "(" + std::to_string(c.top) + "," + std::to_string(c.bottom) + ")"; };
  for (const auto& c : last)
    if (c.high() - c.low() > 1)
      out.push_back({SuffixViolation::Kind::kNonAdjacentLastLayer, d - 1, c,
                     "last-layer comparator " + describe(c) + " is not between adjacent channels"});
  if (d < 2) return out;
  for (const auto& c : net.layer(d - 2)) {
    const int i = c.low(), gap = c.high() - c.low();
    if (gap > 3) {
      out.push_back({SuffixViolation::Kind::kPenultimateTooWide, d - 2, c,
                     "penultimate comparator " + describe(c) + " spans more than 3 channels"});
    } else if (gap == 2 && !has_comparator(last, i, i + 1) && !has_comparator(last, i + 1, i + 2)) {
      out.push_back({SuffixViolation::Kind::kGapTwoUnsupported, d - 2, c,
                     "penultimate comparator " + describe(c) + " needs (i,i+1) or (i+1,i+2) in the last layer"});
    } else if (gap == 3 && !(has_comparator(last, i, i + 1) && has_comparator(last, i + 2, i + 3))) {
      out.push_back({SuffixViolation::Kind::kGapThreeUnsupported, d - 2, c,
                     "penultimate comparator " + describe(c) + " needs (i,i+1) and (i+2,i+3) in the last layer"});
    }
  }
  return out;
}

ComparatorNetwork to_llnf(const ComparatorNetwork& net) {
  require_sorting(net);
  auto cleaned = remove_redundant_keep_depth(net);
  const int d = cleaned.depth();
  if (d == 0) return cleaned;
  auto layers = cleaned.layers();
  Word used = cleaned.used_channels(d - 1);
  for (int j = 1; j < net.channels(); ++j) {
    if (!used_in(used, j) && !used_in(used, j + 1)) {
      layers.back().push_back({j, j + 1});
      used |= bit(j) | bit(j + 1);
    }
  }
  return ComparatorNetwork(net.channels(), std::move(layers));
}

bool is_llnf(const ComparatorNetwork& net) {
  const int n = net.channels();
  if (net.depth() == 0) return n <= 1;
  const auto& last = net.layer(net.depth() - 1);
  for (const auto& c : last)
    if (c.reversed() || c.bottom != c.top + 1) return false;
  const Word used = net.used_channels(net.depth() - 1);
  for (int j = 1; j < n; ++j)
    if (!used_in(used, j) && !used_in(used, j + 1)) return false;
  return true;
}

bool is_cosaturated(const ComparatorNetwork& net) {
  if (!is_llnf(net)) return false;
  const int n = net.channels();
  const int d = net.depth();
  if (d == 0) return true;
  const Word used_last = net.used_channels(d - 1);
  const Word used_prev = d >= 2 ? net.used_channels(d - 2) : 0;
  const auto blocks = last_layer_blocks(net);
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b)
    if ((blocks[b] & ~used_prev) && (blocks[b + 1] & ~used_prev)) return false;
  for (const auto& c : net.layer(d - 1)) {
    const int i = c.top;
    if (used_in(used_prev, i) || used_in(used_prev, i + 1)) continue;
    if (i > 1 && !used_in(used_last, i - 1)) return false;
    if (i + 2 <= n && !used_in(used_last, i + 2)) return false;
  }
  return true;
}

ComparatorNetwork cosaturate(const ComparatorNetwork& net) {
  auto current = to_llnf(net);
  const int n = current.channels();
  const int d = current.depth();
  if (d < 2) return current;
  auto layers = current.layers();
  auto& prev = layers[static_cast<std::size_t>(d - 2)];
  auto& last = layers[static_cast<std::size_t>(d - 1)];
  auto used = [](const Layer& l) {
    Word u = 0;
    for (const auto& c : l) u |= bit(c.top) | bit(c.bottom);
    return u;
  };

  while (true) {
    bool changed = false;

    // Join free channels of consecutive blocks at layer d-1.
    const auto blocks = last_layer_blocks(ComparatorNetwork(n, layers));
    for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
      while (true) {
        const Word free_prev = ~used(prev);
        const Word upper = blocks[b] & free_prev;
        const Word lower = blocks[b + 1] & free_prev;
        if (!upper || !lower) break;
        prev.push_back({std::countr_zero(upper) + 1, std::countr_zero(lower) + 1});
        changed = true;
      }
    }

    // Move a last-layer comparator with both channels free at d-1 up one layer
    // when a neighbour channel is unused in the last layer.
    const Word used_prev = used(prev);
    const Word used_last = used(last);
    for (auto it = last.begin(); it != last.end(); ++it) {
      const int i = it->top;
      if (used_in(used_prev, i) || used_in(used_prev, i + 1)) continue;
      const bool below_free = i + 2 <= n && !used_in(used_last, i + 2);
      const bool above_free = i > 1 && !used_in(used_last, i - 1);
      if (!below_free && !above_free) continue;
      const Comparator moved = *it;
      last.erase(it);
      prev.push_back(moved);
      if (below_free) {
        last.push_back({i + 1, i + 2});
        if (above_free) last.push_back({i - 1, i});
      } else {
        last.push_back({i - 1, i});
      }
      changed = true;
      break;
    }
    if (!changed) break;
  }
  return ComparatorNetwork(n, std::move(layers));
}

std::string to_string(SuffixKind kind) {
  switch (kind) {
    case SuffixKind::kNonredundantLastLayer: return "nonredundant";
    case SuffixKind::kLlnfLastLayer: return "llnf";
    case SuffixKind::kCosaturatedTwoLayer: return "cosat";
  }
  return "unknown";
}

std::string to_json(const EnumerationReport& report) {
  nlohmann::json j;
  j["n"] = report.n;
  j["kind"] = to_string(report.kind);
  j["count"] = report.count;
  return j.dump();
}

namespace {

// Adjacent-only layers in canonical order: channel c either stays free or is
// joined to c+1. With `llnf`, two consecutive free channels are rejected.
void generate_adjacent_layers(int n, bool llnf, int c, bool prev_free, Layer& current,
                              const std::function<void(const Layer&)>& visit) {
  if (c > n) {
    visit(current);
    return;
  }
  if (!(llnf && prev_free)) generate_adjacent_layers(n, llnf, c + 1, true, current, visit);
  if (c + 1 <= n) {
    current.push_back({c, c + 1});
    generate_adjacent_layers(n, llnf, c + 2, false, current, visit);
    current.pop_back();
  }
}

std::uint64_t count_adjacent_layers(int n, bool llnf) {
  // ways[c][f]: completions from channel c given whether c-1 was left free.
  std::vector<std::array<std::uint64_t, 2>> ways(static_cast<std::size_t>(n) + 3, {0, 0});
  ways[static_cast<std::size_t>(n) + 1] = {1, 1};
  ways[static_cast<std::size_t>(n) + 2] = {1, 1};
  for (int c = n; c >= 1; --c) {
    for (int f = 0; f < 2; ++f) {
      std::uint64_t w = 0;
      if (!(llnf && f)) w += ways[static_cast<std::size_t>(c) + 1][1];
      if (c + 1 <= n) w += ways[static_cast<std::size_t>(c) + 2][0];
      ways[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] = w;
    }
  }
  return n == 0 ? 1 : ways[1][0];
}

}  // namespace

EnumerationReport enumerate_last_layers(int n, SuffixKind mode, bool materialize) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (mode == SuffixKind::kCosaturatedTwoLayer) return enumerate_cosat_suffixes(n, materialize);
  const bool llnf = mode == SuffixKind::kLlnfLastLayer;
  EnumerationReport report{n, mode, 0, {}};
  if (!materialize) {
    report.count = count_adjacent_layers(n, llnf) - (llnf ? 0 : 1);
    return report;
  }
  Layer current;
  generate_adjacent_layers(n, llnf, 1, false, current, [&](const Layer& l) {
    if (!llnf && l.empty()) return;
    report.items.emplace_back(n, std::vector<Layer>{l});
  });
  report.count = report.items.size();
  return report;
}

EnumerationReport enumerate_cosat_suffixes(int n, bool materialize,
                                           const std::function<void(const ComparatorNetwork&)>& visit) {
  if (n < 3) throw std::invalid_argument("co-saturated suffixes need n >= 3");
  if (n > kMaxChannels) throw std::invalid_argument("n too large");
  EnumerationReport report{n, SuffixKind::kCosaturatedTwoLayer, 0, {}};

  Layer last_layer;
  generate_adjacent_layers(n, true, 1, false, last_layer, [&](const Layer& last) {
    Word used_last = 0;
    std::vector<int> block_of(static_cast<std::size_t>(n) + 2, 0);
    std::vector<Word> blocks;
    for (int c = 1; c <= n;) {
      if (has_comparator(last, c, c + 1)) {
        blocks.push_back(bit(c) | bit(c + 1));
        block_of[static_cast<std::size_t>(c)] = block_of[static_cast<std::size_t>(c) + 1] =
            static_cast<int>(blocks.size()) - 1;
        used_last |= bit(c) | bit(c + 1);
        c += 2;
      } else {
        blocks.push_back(bit(c));
        block_of[static_cast<std::size_t>(c)] = static_cast<int>(blocks.size()) - 1;
        c += 1;
      }
    }

    auto accept = [&](Word used_prev) {
      for (std::size_t b = 0; b + 1 < blocks.size(); ++b)
        if ((blocks[b] & ~used_prev) && (blocks[b + 1] & ~used_prev)) return false;
      for (const auto& c : last) {
        const int i = c.top;
        if (used_in(used_prev, i) || used_in(used_prev, i + 1)) continue;
        if (i > 1 && !used_in(used_last, i - 1)) return false;
        if (i + 2 <= n && !used_in(used_last, i + 2)) return false;
      }
      return true;
    };

    Layer prev;
    // Channel c is left free or joined to an unmatched channel of the next block.
    std::function<void(int, Word)> rec = [&](int c, Word used_prev) {
      while (c <= n && used_in(used_prev, c)) ++c;
      if (c > n) {
        if (!accept(used_prev)) return;
        ++report.count;
        if (materialize || visit) {
          ComparatorNetwork suffix(n, {prev, last});
          if (visit) visit(suffix);
          if (materialize) report.items.push_back(std::move(suffix));
        }
        return;
      }
      rec(c + 1, used_prev);
      const int next_block = block_of[static_cast<std::size_t>(c)] + 1;
      if (next_block >= static_cast<int>(blocks.size())) return;
      Word candidates = blocks[static_cast<std::size_t>(next_block)] & ~used_prev;
      while (candidates) {
        const int j = std::countr_zero(candidates) + 1;
        candidates &= candidates - 1;
        prev.push_back({c, j});
        rec(c + 1, used_prev | bit(c) | bit(j));
        prev.pop_back();
      }
    };
    rec(1, 0);
  });
  return report;
}

}  // namespace sortnet
