#pragma once

// Test helpers. The oracles here deliberately avoid the library's bit tricks:
// they push vectors of ints through comparators one at a time.

#include <algorithm>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet::testing {

// Reference values transcribed from the published tables.
inline constexpr int kOptimalDepth[] = {0, 0, 1, 3, 3, 5, 5, 6, 6, 7, 7};  // index n
inline constexpr std::uint64_t kCosatCounts[] = {4,   4,    12,   26,    44,    86,    180,   376,   700,
                                                 1440, 2892, 5676, 11488, 22848, 45664, 90976, 182112, 363896};  // n=3..20
inline constexpr std::size_t kFilterSetSizes[] = {1, 2, 4, 5, 8, 12, 22, 21};  // n=3..10
inline constexpr long long kWindowSumP[] = {5,    12,   44,    84,    233,   408,   1016,  1704,
                                            4013, 6564, 14948, 24060, 53585, 85296, 186992};  // n=3..17
inline constexpr long long kWindowSumBZ[] = {4,    10,   36,    72,    196,   358,   876,   1524,
                                             3532, 5962, 13380, 22128, 48628, 79246, 171612};  // n=3..17

inline std::vector<int> run(const ComparatorNetwork& net, std::vector<int> x) {
  for (const auto& layer : net.layers())
    for (const auto& c : layer) {
      int& a = x[static_cast<std::size_t>(c.top - 1)];
      int& b = x[static_cast<std::size_t>(c.bottom - 1)];
      if (a > b) std::swap(a, b);
    }
  return x;
}

inline std::vector<int> unpack(Word w, int n) {
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<int>((w >> i) & 1);
  return x;
}

inline Word pack(const std::vector<int>& x) {
  Word w = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) w |= Word{1} << i;
  return w;
}

inline std::set<Word> naive_outputs(const ComparatorNetwork& net) {
  std::set<Word> out;
  const int n = net.channels();
  for (Word w = 0; w < (Word{1} << n); ++w) out.insert(pack(run(net, unpack(w, n))));
  return out;
}

inline bool naive_sorts(const ComparatorNetwork& net) {
  const int n = net.channels();
  for (Word w = 0; w < (Word{1} << n); ++w) {
    const auto y = run(net, unpack(w, n));
    if (!std::is_sorted(y.begin(), y.end())) return false;
  }
  return true;
}

// Random matching; reversed comparators only when asked for.
inline Layer random_layer(int n, std::mt19937_64& rng, bool reversed = false, double density = 0.8) {
  std::vector<int> ch(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ch[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(ch.begin(), ch.end(), rng);
  std::bernoulli_distribution keep(density), flip(0.3);
  Layer layer;
  for (std::size_t i = 0; i + 1 < ch.size(); i += 2) {
    if (!keep(rng)) continue;
    int a = std::min(ch[i], ch[i + 1]), b = std::max(ch[i], ch[i + 1]);
    if (reversed && flip(rng)) std::swap(a, b);
    layer.push_back({a, b});
  }
  return layer;
}

inline ComparatorNetwork random_network(int n, int depth, std::mt19937_64& rng, bool reversed = false) {
  std::vector<Layer> layers;
  for (int k = 0; k < depth; ++k) layers.push_back(random_layer(n, rng, reversed));
  return ComparatorNetwork(n, std::move(layers));
}

// Every matching on channels 1..n, the empty one included.
inline void all_matchings(int n, const std::function<void(const Layer&)>& visit) {
  Layer cur;
  std::vector<bool> taken(static_cast<std::size_t>(n + 1), false);
  std::function<void(int)> rec = [&](int c) {
    while (c <= n && taken[static_cast<std::size_t>(c)]) ++c;
    if (c > n) {
      visit(cur);
      return;
    }
    taken[static_cast<std::size_t>(c)] = true;
    rec(c + 1);
    for (int d = c + 1; d <= n; ++d) {
      if (taken[static_cast<std::size_t>(d)]) continue;
      taken[static_cast<std::size_t>(d)] = true;
      cur.push_back({c, d});
      rec(c + 1);
      cur.pop_back();
      taken[static_cast<std::size_t>(d)] = false;
    }
    taken[static_cast<std::size_t>(c)] = false;
  };
  rec(1);
}

// Does any sequence of d layers on n channels sort? Plain search over all
// layer sequences, each step applied to the explicit set of reachable words.
inline bool brute_force_depth(int n, int d) {
  std::vector<Layer> layers;
  all_matchings(n, [&](const Layer& l) { layers.push_back(l); });
  std::function<bool(const std::set<Word>&, int)> rec = [&](const std::set<Word>& cur, int left) {
    bool sorted = true;
    for (Word w : cur) {
      const auto x = unpack(w, n);
      if (!std::is_sorted(x.begin(), x.end())) sorted = false;
    }
    if (sorted) return true;
    if (left == 0) return false;
    for (const auto& l : layers) {
      std::set<Word> next;
      const ComparatorNetwork step(n, {l});
      for (Word w : cur) next.insert(pack(run(step, unpack(w, n))));
      if (rec(next, left - 1)) return true;
    }
    return false;
  };
  std::set<Word> all;
  for (Word w = 0; w < (Word{1} << n); ++w) all.insert(w);
  return rec(all, d);
}

// Small DPLL with unit propagation, enough for instances of a few thousand
// clauses. Returns an assignment indexed by variable (1 true, -1 false).
inline std::optional<std::vector<signed char>> tiny_sat(int num_vars, const std::vector<std::vector<int>>& clauses) {
  std::vector<signed char> val(static_cast<std::size_t>(num_vars + 1), 0);
  auto value = [&](int lit) {
    const signed char v = val[static_cast<std::size_t>(std::abs(lit))];
    return lit > 0 ? v : static_cast<signed char>(-v);
  };
  std::function<bool()> rec = [&]() -> bool {
    std::vector<int> trail;
    auto undo = [&] {
      for (int v : trail) val[static_cast<std::size_t>(v)] = 0;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : clauses) {
        int open = 0, last = 0;
        bool sat = false;
        for (int lit : c) {
          const auto v = value(lit);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++open;
            last = lit;
          }
        }
        if (sat) continue;
        if (open == 0) {
          undo();
          return false;
        }
        if (open == 1) {
          val[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    int pick = 0;
    for (int v = 1; v <= num_vars && !pick; ++v)
      if (!val[static_cast<std::size_t>(v)]) pick = v;
    if (!pick) return true;
    for (signed char s : {1, -1}) {
      val[static_cast<std::size_t>(pick)] = s;
      if (rec()) return true;
    }
    val[static_cast<std::size_t>(pick)] = 0;
    undo();
    return false;
  };
  if (!rec()) return std::nullopt;
  for (auto& v : val)
    if (v == 0) v = -1;
  return val;
}

inline std::uint64_t fibonacci(int k) {
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < k; ++i) {
    const auto t = a + b;
    a = b;
    b = t;
  }
  return a;
}

// Padovan numbers with P(0)=1, P(1)=P(2)=0.
inline std::uint64_t padovan(int k) {
  std::vector<std::uint64_t> p{1, 0, 0};
  while (static_cast<int>(p.size()) <= k) p.push_back(p[p.size() - 2] + p[p.size() - 3]);
  return p[static_cast<std::size_t>(k)];
}

}  // namespace sortnet::testing
