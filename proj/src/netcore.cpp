#include "sortnet/netcore.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sortnet {

namespace {

void require_enumerable(int n) {
  if (n > kMaxEnumerableChannels)
    throw std::invalid_argument("n=" + std::to_string(n) + " is too large to enumerate all inputs");
}

// Dedupes and sorts words in place. Uses a bitmap when 2^n is small enough.
void normalize(std::vector<Word>& words, int n) {
  if (n <= 24 && words.size() > 64) {
    std::vector<Word> bitmap((std::size_t{1} << n) / 64 + 1, 0);
    for (Word w : words) bitmap[w >> 6] |= Word{1} << (w & 63);
    words.clear();
    for (std::size_t b = 0; b < bitmap.size(); ++b) {
      Word bits = bitmap[b];
      while (bits) {
        words.push_back((Word{b} << 6) | static_cast<Word>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
    return;
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
}

inline Word apply_comparator(Comparator c, Word w) {
  const Word t = ((w >> (c.top - 1)) & ~(w >> (c.bottom - 1))) & 1;
  return w ^ ((t << (c.top - 1)) | (t << (c.bottom - 1)));
}

// Lane patterns: bit l of kLanePattern[c] is bit c of l, for the six channels
// that vary inside one 64-input block.
constexpr Word kLanePattern[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

}  // namespace

Word apply(const Layer& layer, Word input) {
  for (const auto& c : layer) input = apply_comparator(c, input);
  return input;
}

Word apply(const ComparatorNetwork& net, Word input) {
  for (const auto& l : net.layers()) input = apply(l, input);
  return input;
}

BitWord evaluate(const ComparatorNetwork& net, BitWord input) {
  if (input.n != net.channels())
    throw std::invalid_argument("input length " + std::to_string(input.n) + " does not match n=" +
                                std::to_string(net.channels()));
  return {input.n, apply(net, input.bits)};
}

std::vector<BitWord> trace(const ComparatorNetwork& net, BitWord input) {
  if (input.n != net.channels())
    throw std::invalid_argument("input length " + std::to_string(input.n) + " does not match n=" +
                                std::to_string(net.channels()));
  std::vector<BitWord> steps{input};
  for (const auto& l : net.layers()) steps.push_back({input.n, apply(l, steps.back().bits)});
  return steps;
}

OutputSet all_words(int n) {
  require_enumerable(n);
  OutputSet s{n, std::vector<Word>(std::size_t{1} << n)};
  std::iota(s.words.begin(), s.words.end(), Word{0});
  return s;
}

OutputSet image(const ComparatorNetwork& net, const OutputSet& inputs) {
  if (inputs.n != net.channels()) throw std::invalid_argument("input set width does not match n");
  OutputSet out{inputs.n, {}};
  out.words.reserve(inputs.words.size());
  for (Word w : inputs.words) out.words.push_back(apply(net, w));
  normalize(out.words, out.n);
  return out;
}

OutputSet outputs(const ComparatorNetwork& net) {
  const int n = net.channels();
  require_enumerable(n);
  OutputSet out{n, {}};
  const Word total = Word{1} << n;
  out.words.reserve(static_cast<std::size_t>(total));
  for (Word x = 0; x < total; ++x) out.words.push_back(apply(net, x));
  normalize(out.words, n);
  return out;
}

bool is_sorting_network(const ComparatorNetwork& net) {
  const int n = net.channels();
  require_enumerable(n);
  if (n <= 1) return true;
  const Word total = Word{1} << n;
  const Word valid = total < 64 ? channel_mask(static_cast<int>(total)) : ~Word{0};
  std::vector<Word> lanes(static_cast<std::size_t>(n));
  for (Word base = 0; base < total; base += 64) {
    for (int c = 0; c < n; ++c)
      lanes[static_cast<std::size_t>(c)] = c < 6 ? kLanePattern[c] : (((base >> c) & 1) ? ~Word{0} : 0);
    for (const auto& l : net.layers()) {
      for (const auto& cmp : l) {
        Word& a = lanes[static_cast<std::size_t>(cmp.top - 1)];
        Word& b = lanes[static_cast<std::size_t>(cmp.bottom - 1)];
        const Word lo = a & b;
        b = a | b;
        a = lo;
      }
    }
    for (int c = 0; c + 1 < n; ++c)
      if (lanes[static_cast<std::size_t>(c)] & ~lanes[static_cast<std::size_t>(c + 1)] & valid)
        return false;
  }
  return true;
}

bool sorts_all(const ComparatorNetwork& net, const OutputSet& inputs) {
  return std::all_of(inputs.words.begin(), inputs.words.end(),
                     [&](Word w) { return is_sorted_word(apply(net, w), net.channels()); });
}

OutputSet sorts_set(const ComparatorNetwork& net) {
  const int n = net.channels();
  require_enumerable(n);
  OutputSet out{n, {}};
  const Word total = Word{1} << n;
  for (Word x = 0; x < total; ++x)
    if (is_sorted_word(apply(net, x), n)) out.words.push_back(x);
  return out;
}

WindowStats window_stats(Word w, int n) {
  w &= channel_mask(n);
  WindowStats s;
  s.leading_zeros = std::min(std::countr_zero(w), n);
  s.trailing_ones = n == 0 ? 0 : std::countl_one(w << (64 - n));
  if (s.leading_zeros == n) s.trailing_ones = 0;
  s.window = n - s.leading_zeros - s.trailing_ones;
  return s;
}

long long window_sum(const OutputSet& set) {
  long long total = 0;
  for (Word w : set.words) total += window_stats(w, set.n).window;
  return total;
}

ComparatorNetwork permute(const ComparatorNetwork& net, const ChannelPermutation& perm) {
  if (perm.size() != net.channels()) throw std::invalid_argument("permutation size does not match n");
  std::vector<Layer> layers;
  for (const auto& l : net.layers()) {
    Layer pl;
    for (const auto& c : l) pl.push_back({perm(c.top), perm(c.bottom)});
    layers.push_back(std::move(pl));
  }
  return ComparatorNetwork(net.channels(), std::move(layers));
}

namespace {

void swap_labels(Layer& layer, int i, int j) {
  for (auto& c : layer) {
    if (c.top == i) c.top = j; else if (c.top == j) c.top = i;
    if (c.bottom == i) c.bottom = j; else if (c.bottom == j) c.bottom = i;
  }
}

}  // namespace

ComparatorNetwork standardize_forward(const ComparatorNetwork& gnet) {
  auto layers = gnet.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (auto& c : layers[k]) {
      if (!c.reversed()) continue;
      const int i = c.top, j = c.bottom;
      c = {j, i};
      for (std::size_t later = k + 1; later < layers.size(); ++later) swap_labels(layers[later], i, j);
    }
  }
  return ComparatorNetwork(gnet.channels(), std::move(layers));
}

ComparatorNetwork standardize_dual(const ComparatorNetwork& gnet) {
  auto layers = gnet.layers();
  for (std::size_t k = layers.size(); k-- > 0;) {
    // Layers after k are already standard and never touched again.
    while (true) {
      auto it = std::find_if(layers[k].begin(), layers[k].end(), [](const Comparator& c) { return c.reversed(); });
      if (it == layers[k].end()) break;
      const int i = it->top, j = it->bottom;
      for (std::size_t e = 0; e <= k; ++e) swap_labels(layers[e], i, j);
    }
  }
  return ComparatorNetwork(gnet.channels(), std::move(layers));
}

ComparatorNetwork reflect(const ComparatorNetwork& net) {
  const int n = net.channels();
  std::vector<Layer> layers;
  for (const auto& l : net.layers()) {
    Layer rl;
    for (const auto& c : l) rl.push_back({n + 1 - c.bottom, n + 1 - c.top});
    layers.push_back(std::move(rl));
  }
  return ComparatorNetwork(n, std::move(layers));
}

namespace {

// Comparators of `layer` that act as the identity on every word of `before`.
std::vector<bool> redundant_flags(const Layer& layer, const std::vector<Word>& before) {
  std::vector<bool> redundant(layer.size(), true);
  std::size_t live = layer.size();
  for (Word w : before) {
    for (std::size_t c = 0; c < layer.size(); ++c) {
      if (!redundant[c]) continue;
      if (((w >> (layer[c].top - 1)) & 1) && !((w >> (layer[c].bottom - 1)) & 1)) {
        redundant[c] = false;
        if (--live == 0) return redundant;
      }
    }
  }
  return redundant;
}

}  // namespace

bool is_redundant(const ComparatorNetwork& net, int layer_index, Comparator comp) {
  if (layer_index < 0 || layer_index >= net.depth()) throw std::out_of_range("layer index out of range");
  const auto& layer = net.layer(layer_index);
  auto it = std::find(layer.begin(), layer.end(), comp);
  if (it == layer.end()) throw std::out_of_range("comparator is not in the given layer");
  // Earlier comparators of the same layer are placed before `comp`.
  Layer before_in_layer(layer.begin(), it);
  const auto before = image(net.prefix(layer_index).with_layer(before_in_layer), all_words(net.channels()));
  return redundant_flags(Layer{comp}, before.words)[0];
}

ComparatorNetwork remove_redundant_keep_depth(const ComparatorNetwork& net) {
  const int n = net.channels();
  require_enumerable(n);
  auto current = net;
  while (true) {
    std::vector<Layer> kept;
    bool removed = false;
    OutputSet set = all_words(n);
    for (const auto& l : current.layers()) {
      const auto flags = redundant_flags(l, set.words);
      Layer nl;
      for (std::size_t c = 0; c < l.size(); ++c) {
        if (flags[c])
          removed = true;
        else
          nl.push_back(l[c]);
      }
      set = image(ComparatorNetwork(n, {nl}), set);
      kept.push_back(std::move(nl));
    }
    current = ComparatorNetwork(n, std::move(kept));
    if (!removed) return current;
  }
}

ComparatorNetwork remove_redundant(const ComparatorNetwork& net) {
  auto kept = remove_redundant_keep_depth(net);
  std::vector<Layer> layers;
  for (const auto& l : kept.layers())
    if (!l.empty()) layers.push_back(l);
  return ComparatorNetwork(net.channels(), std::move(layers));
}

namespace {

class InclusionSearch {
 public:
  InclusionSearch(const OutputSet& from, const OutputSet& into) : from_(from), into_(into), n_(from.n) {}

  std::optional<ChannelPermutation> run() {
    if (from_.size() > into_.size()) return std::nullopt;
    std::vector<std::size_t> count_from(static_cast<std::size_t>(n_) + 1, 0);
    std::vector<std::size_t> count_into(static_cast<std::size_t>(n_) + 1, 0);
    // ones[k * n + c]: words of popcount k with a 1 on channel c.
    std::vector<std::size_t> ones_from(static_cast<std::size_t>((n_ + 1) * n_), 0);
    std::vector<std::size_t> ones_into(ones_from.size(), 0);
    tally(from_, count_from, ones_from);
    tally(into_, count_into, ones_into);
    for (int k = 0; k <= n_; ++k)
      if (count_from[static_cast<std::size_t>(k)] > count_into[static_cast<std::size_t>(k)]) return std::nullopt;

    allowed_.assign(static_cast<std::size_t>(n_), 0);
    for (int c = 0; c < n_; ++c) {
      for (int p = 0; p < n_; ++p) {
        bool ok = true;
        for (int k = 0; k <= n_ && ok; ++k) {
          const auto idx_c = static_cast<std::size_t>(k * n_ + c);
          const auto idx_p = static_cast<std::size_t>(k * n_ + p);
          const auto kk = static_cast<std::size_t>(k);
          ok = ones_from[idx_c] <= ones_into[idx_p] &&
               count_from[kk] - ones_from[idx_c] <= count_into[kk] - ones_into[idx_p];
        }
        if (ok) allowed_[static_cast<std::size_t>(c)] |= Word{1} << p;
      }
      if (!allowed_[static_cast<std::size_t>(c)]) return std::nullopt;
    }

    order_.resize(static_cast<std::size_t>(n_));
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return std::popcount(allowed_[static_cast<std::size_t>(a)]) < std::popcount(allowed_[static_cast<std::size_t>(b)]);
    });

    // Keys start as the popcount so words only match within their class.
    key_from_.resize(from_.size());
    key_into_.resize(into_.size());
    for (std::size_t i = 0; i < from_.size(); ++i) key_from_[i] = static_cast<Word>(std::popcount(from_.words[i]));
    for (std::size_t i = 0; i < into_.size(); ++i) key_into_[i] = static_cast<Word>(std::popcount(into_.words[i]));
    image_.assign(static_cast<std::size_t>(n_), 0);
    if (!search(0, 0)) return std::nullopt;
    std::vector<int> images(static_cast<std::size_t>(n_));
    for (int c = 0; c < n_; ++c) images[static_cast<std::size_t>(c)] = image_[static_cast<std::size_t>(c)] + 1;
    return ChannelPermutation(std::move(images));
  }

 private:
  void tally(const OutputSet& s, std::vector<std::size_t>& count, std::vector<std::size_t>& ones) const {
    for (Word w : s.words) {
      const int k = std::popcount(w);
      ++count[static_cast<std::size_t>(k)];
      for (int c = 0; c < n_; ++c)
        if ((w >> c) & 1) ++ones[static_cast<std::size_t>(k * n_ + c)];
    }
  }

  bool search(int depth, Word taken) {
    if (depth == n_) return true;
    const int c = order_[static_cast<std::size_t>(depth)];
    Word candidates = allowed_[static_cast<std::size_t>(c)] & ~taken;
    const auto saved_from = key_from_;
    const auto saved_into = key_into_;
    while (candidates) {
      const int p = std::countr_zero(candidates);
      candidates &= candidates - 1;
      // Key bit for this depth sits above the 6-bit popcount field.
      const int shift = 6 + depth;
      for (std::size_t i = 0; i < from_.size(); ++i)
        key_from_[i] = saved_from[i] | (((from_.words[i] >> c) & 1) << shift);
      for (std::size_t i = 0; i < into_.size(); ++i)
        key_into_[i] = saved_into[i] | (((into_.words[i] >> p) & 1) << shift);
      if (projection_included()) {
        image_[static_cast<std::size_t>(c)] = p;
        if (search(depth + 1, taken | (Word{1} << p))) return true;
      }
    }
    key_from_ = saved_from;
    key_into_ = saved_into;
    return false;
  }

  bool projection_included() {
    sorted_into_ = key_into_;
    std::sort(sorted_into_.begin(), sorted_into_.end());
    sorted_into_.erase(std::unique(sorted_into_.begin(), sorted_into_.end()), sorted_into_.end());
    return std::all_of(key_from_.begin(), key_from_.end(), [&](Word k) {
      return std::binary_search(sorted_into_.begin(), sorted_into_.end(), k);
    });
  }

  const OutputSet& from_;
  const OutputSet& into_;
  int n_;
  std::vector<Word> allowed_;
  std::vector<int> order_;
  std::vector<Word> key_from_, key_into_, sorted_into_;
  std::vector<int> image_;
};

}  // namespace

std::optional<ChannelPermutation> find_inclusion(const OutputSet& from, const OutputSet& into) {
  if (from.n != into.n) throw std::invalid_argument("sets have different widths");
  if (from.n > 57) throw std::invalid_argument("inclusion search supports at most 57 channels");
  return InclusionSearch(from, into).run();
}

std::optional<ChannelPermutation> subsumes(const ComparatorNetwork& c, const ComparatorNetwork& c2) {
  if (c.channels() != c2.channels()) throw std::invalid_argument("networks have different channel counts");
  return find_inclusion(outputs(c), outputs(c2));
}

std::optional<ChannelPermutation> cosubsumes(const ComparatorNetwork& c, const ComparatorNetwork& c2) {
  if (c.channels() != c2.channels()) throw std::invalid_argument("networks have different channel counts");
  return find_inclusion(sorts_set(c), sorts_set(c2));
}

OutputSet complement(const OutputSet& set) {
  OutputSet out{set.n, {}};
  out.words.reserve(set.size());
  const Word mask = channel_mask(set.n);
  for (Word w : set.words) out.words.push_back(~w & mask);
  std::sort(out.words.begin(), out.words.end());
  return out;
}

std::optional<ReflectedWitness> subsumes_up_to_reflection(const OutputSet& c, const OutputSet& c2) {
  if (auto p = find_inclusion(c, c2)) return ReflectedWitness{*p, false};
  if (auto p = find_inclusion(complement(c), c2)) return ReflectedWitness{*p, true};
  return std::nullopt;
}

bool monotone_check(const ComparatorNetwork& net) {
  const int n = net.channels();
  require_enumerable(n);
  // Checking covering pairs (y = x plus one bit) suffices by transitivity.
  const Word total = Word{1} << n;
  for (Word x = 0; x < total; ++x) {
    const Word cx = apply(net, x);
    for (int b = 0; b < n; ++b) {
      if ((x >> b) & 1) continue;
      const Word cy = apply(net, x | (Word{1} << b));
      if (cx & ~cy) return false;
    }
  }
  return true;
}

}  // namespace sortnet
