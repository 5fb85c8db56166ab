#include "sortnet/filters.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sortnet/catalog_data.hpp"
#include "sortnet/netcore.hpp"

namespace sortnet {

namespace {

void require_channels(int n) {
  if (n < 2 || n > kMaxChannels) throw std::invalid_argument("n must be in 2.." + std::to_string(kMaxChannels));
}

// All matchings on `channels`, the empty one included. Stops once visit
// returns false; the return value says whether enumeration ran to the end.
bool for_each_matching(const std::vector<int>& channels, Layer& current, Word taken,
                       const std::function<bool(const Layer&)>& visit, std::size_t from = 0) {
  while (from < channels.size() && ((taken >> (channels[from] - 1)) & 1)) ++from;
  if (from == channels.size()) return visit(current);
  const int a = channels[from];
  const Word with_a = taken | (Word{1} << (a - 1));
  if (!for_each_matching(channels, current, with_a, visit, from + 1)) return false;
  for (std::size_t j = from + 1; j < channels.size(); ++j) {
    const int b = channels[j];
    if ((taken >> (b - 1)) & 1) continue;
    current.push_back({a, b});
    const bool go_on = for_each_matching(channels, current, with_a | (Word{1} << (b - 1)), visit, from + 1);
    current.pop_back();
    if (!go_on) return false;
  }
  return true;
}

std::vector<int> all_channels(int n) {
  std::vector<int> c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = i + 1;
  return c;
}

bool is_maximal(const Layer& layer, int n) { return static_cast<int>(layer.size()) == n / 2; }

// True when some non-empty matching on the channels free in `second` maps
// `outputs` onto a strict subset of itself.
bool can_shrink(const OutputSet& outputs, Word used, int n) {
  std::vector<int> free;
  for (int c = 1; c <= n; ++c)
    if (!((used >> (c - 1)) & 1)) free.push_back(c);
  bool shrinks = false;
  Layer current;
  std::vector<Word> image;
  for_each_matching(free, current, 0, [&](const Layer& m) {
    if (m.empty()) return true;
    image.clear();
    for (Word w : outputs.words) {
      const Word x = apply(m, w);
      if (!outputs.contains(x)) return true;
      image.push_back(x);
    }
    std::sort(image.begin(), image.end());
    if (std::unique(image.begin(), image.end()) - image.begin() < static_cast<std::ptrdiff_t>(outputs.size()))
      shrinks = true;
    return !shrinks;
  });
  return shrinks;
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

Layer first_layer_P(int n) {
  require_channels(n);
  Layer l;
  for (int i = 1; i <= n / 2; ++i) l.push_back({2 * i - 1, 2 * i});
  return l;
}

Layer first_layer_BZ(int n) {
  require_channels(n);
  Layer l;
  for (int i = 1; i <= n / 2; ++i) l.push_back({i, n + 1 - i});
  return canonical_layer(std::move(l), n);
}

ComparatorNetwork green_filter(int n, int depth) {
  if (n < 2 || n > kMaxChannels || std::popcount(static_cast<unsigned>(n)) != 1)
    throw std::invalid_argument("green filter needs n a power of two");
  const int log = std::countr_zero(static_cast<unsigned>(n));
  if (depth < 0 || depth > log) throw std::invalid_argument("green filter depth must be in 0..log2(n)");
  std::vector<Layer> layers;
  for (int t = 1; t <= depth; ++t) {
    const int stride = 1 << (t - 1);
    Layer l;
    for (int i = 1; i <= n; ++i)
      if (!(((i - 1) >> (t - 1)) & 1)) l.push_back({i, i + stride});
    layers.push_back(std::move(l));
  }
  return ComparatorNetwork(n, std::move(layers));
}

std::uint64_t matching_count(int n) {
  if (n < 0) throw std::invalid_argument("n must be non-negative");
  std::uint64_t prev = 1, cur = 1;  // T(0), T(1)
  for (int m = 2; m <= n; ++m) {
    std::uint64_t step = 0;
    if (__builtin_mul_overflow(static_cast<std::uint64_t>(m - 1), prev, &step) ||
        __builtin_add_overflow(cur, step, &step))
      throw std::overflow_error("matching count exceeds 64 bits");
    prev = cur;
    cur = step;
  }
  return n == 0 ? 1 : cur;
}

std::uint64_t count_layers(int n) { return matching_count(n) - 1; }

void for_each_layer(int n, const std::function<bool(const Layer&)>& visit) {
  if (n < 1 || n > kMaxStreamedLayerChannels)
    throw std::invalid_argument("layer streaming supports 1 <= n <= " + std::to_string(kMaxStreamedLayerChannels));
  Layer current;
  for_each_matching(all_channels(n), current, 0, [&](const Layer& l) { return l.empty() || visit(l); });
}

std::vector<Layer> enumerate_layers(int n) {
  std::vector<Layer> out;
  for_each_layer(n, [&](const Layer& l) {
    out.push_back(canonical_layer(l, n));
    return true;
  });
  return out;
}

std::vector<Layer> saturated_second_layers(int n, const Layer& first) {
  require_channels(n);
  if (!is_maximal(first, n)) throw std::invalid_argument("first layer must be maximal");
  const ComparatorNetwork base(n, {first});
  const OutputSet after_first = outputs(base);

  std::vector<Layer> candidates;
  Layer current;
  for_each_matching(all_channels(n), current, 0, [&](const Layer& l) {
    candidates.push_back(canonical_layer(l, n));
    return true;
  });

  std::vector<char> keep(candidates.size(), 0);
  parallel_for(candidates.size(), [&](std::size_t i) {
    const Layer& l = candidates[i];
    Word used = 0;
    for (const auto& c : l) used |= (Word{1} << (c.top - 1)) | (Word{1} << (c.bottom - 1));
    const OutputSet s = image(ComparatorNetwork(n, {l}), after_first);
    keep[i] = !can_shrink(s, used, n);
  });

  std::vector<Layer> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (keep[i]) out.push_back(candidates[i]);
  return out;
}

FilterSet complete_filter_set(int n, int limit) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (n > limit)
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the generation limit " + std::to_string(limit) +
                                "; load a precomputed filter set instead");
  const Layer first = first_layer_P(n);
  const auto seconds = saturated_second_layers(n, first);

  struct Candidate {
    ComparatorNetwork net;
    OutputSet out;
    std::string text;
  };
  std::vector<Candidate> cands(seconds.size());
  parallel_for(seconds.size(), [&](std::size_t i) {
    ComparatorNetwork net(n, {first, seconds[i]});
    cands[i].out = outputs(net);
    cands[i].text = format_network(net);
    cands[i].net = std::move(net);
  });
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.out.size() != b.out.size()) return a.out.size() < b.out.size();
    return a.text < b.text;
  });

  std::vector<const Candidate*> kept;
  for (const auto& c : cands) {
    const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Candidate* k) {
      return k->out.size() <= c.out.size() && subsumes_up_to_reflection(k->out, c.out).has_value();
    });
    if (covered) continue;
    std::erase_if(kept, [&](const Candidate* k) {
      return c.out.size() <= k->out.size() && subsumes_up_to_reflection(c.out, k->out).has_value();
    });
    kept.push_back(&c);
  }

  FilterSet set;
  set.n = n;
  for (const Candidate* k : kept) set.prefixes.push_back(k->net);
  set.provenance = {{"first_layer", "P"},
                    {"saturated_second_layers", std::to_string(seconds.size())},
                    {"pruning", "subsumption up to reflection"}};
  return set;
}

std::string to_json_lines(const FilterSet& set) {
  nlohmann::json header;
  header["n"] = set.n;
  header["count"] = set.prefixes.size();
  header["provenance"] = set.provenance;
  std::string out = nlohmann::json{{"filter_set", header}}.dump() + "\n";
  for (const auto& p : set.prefixes) out += to_json(p) + "\n";
  return out;
}

FilterSet filter_set_from_json_lines(const std::string& text) {
  FilterSet set;
  std::istringstream in(text);
  std::string line;
  bool have_n = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.contains("filter_set")) {
      const auto& h = j["filter_set"];
      set.n = h.at("n").get<int>();
      have_n = true;
      if (h.contains("provenance")) set.provenance = h["provenance"].get<std::map<std::string, std::string>>();
      continue;
    }
    auto net = network_from_json(line);
    if (!have_n) {
      set.n = net.channels();
      have_n = true;
    } else if (net.channels() != set.n) {
      throw std::invalid_argument("filter set mixes channel counts");
    }
    set.prefixes.push_back(std::move(net));
  }
  return set;
}

Catalog::Catalog(std::vector<CatalogEntry> entries, std::vector<KnownBound> bounds, int version)
    : entries_(std::move(entries)), bounds_(std::move(bounds)), version_(version) {}

const CatalogEntry& Catalog::at(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw std::out_of_range("no catalog entry named '" + name + "'");
}

std::optional<KnownBound> Catalog::bounds_for(int n) const {
  for (const auto& b : bounds_)
    if (b.n == n) return b;
  return std::nullopt;
}

Catalog parse_catalog(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  std::vector<CatalogEntry> entries;
  for (const auto& e : j.at("networks")) {
    const int n = e.at("n").get<int>();
    CatalogEntry entry{e.at("name").get<std::string>(), e.value("description", ""),
                       parse_network(e.at("layers").get<std::string>(), n), e.value("prefix_depth", 0)};
    entries.push_back(std::move(entry));
  }
  std::vector<KnownBound> bounds;
  for (const auto& b : j.at("known_bounds")) {
    KnownBound kb{b.at("n").get<int>(),
                  {b.at("size").at(0).get<int>(), b.at("size").at(1).get<int>()},
                  {b.at("depth").at(0).get<int>(), b.at("depth").at(1).get<int>()}};
    if (kb.size.lower > kb.size.upper || kb.depth.lower > kb.depth.upper)
      throw std::invalid_argument("catalog bound with lower > upper for n = " + std::to_string(kb.n));
    bounds.push_back(kb);
  }
  return Catalog(std::move(entries), std::move(bounds), j.value("version", 0));
}

const Catalog& catalog() {
  static const Catalog c = parse_catalog(detail::kCatalogJson);
  return c;
}

}  // namespace sortnet
