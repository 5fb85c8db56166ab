#include <doctest.h>

#include <algorithm>
#include <set>

#include "sortnet/filters.hpp"
#include "sortnet/netcore.hpp"
#include "support.hpp"

using namespace sortnet;
namespace t = sortnet::testing;

namespace {

// Matchings on n points by the usual recurrence: channel n is free or paired.
std::uint64_t matchings(int n) {
  std::uint64_t a = 1, b = 1;  // T(0), T(1)
  if (n == 0) return 1;
  for (int k = 2; k <= n; ++k) {
    const auto c = b + static_cast<std::uint64_t>(k - 1) * a;
    a = b;
    b = c;
  }
  return b;
}

bool maximal(const Layer& l, int n) { return static_cast<int>(l.size()) == n / 2; }

}  // namespace

TEST_SUITE("filters") {
  TEST_CASE("first layers") {
    CHECK(format_network(ComparatorNetwork(6, {first_layer_P(6)})) == "1:2 3:4 5:6");
    CHECK(format_network(ComparatorNetwork(6, {first_layer_BZ(6)})) == "1:6 2:5 3:4");
    CHECK(format_network(ComparatorNetwork(5, {first_layer_BZ(5)})) == "1:5 2:4");
    for (int n = 2; n <= 17; ++n) {
      CHECK(maximal(first_layer_P(n), n));
      CHECK(maximal(first_layer_BZ(n), n));
    }
  }

  TEST_CASE("first-layer window sums") {
    for (int n = 3; n <= 12; ++n) {
      const auto p = window_sum(outputs(ComparatorNetwork(n, {first_layer_P(n)})));
      const auto bz = window_sum(outputs(ComparatorNetwork(n, {first_layer_BZ(n)})));
      CHECK(p == t::kWindowSumP[n - 3]);
      CHECK(bz == t::kWindowSumBZ[n - 3]);
      CHECK(bz < p);
    }
  }

  TEST_CASE("Green filter on 16 channels") {
    CHECK(green_filter(16, 4) == catalog().at("fig4").network);
    // The 17-channel prefix is the 16-channel filter with one idle channel.
    CHECK(ComparatorNetwork(17, green_filter(16, 3).layers()) == catalog().at("fig6").prefix());
    CHECK_THROWS(green_filter(17, 3));
    // After log2(n) layers the Green filter leaves channel 1 holding the minimum.
    const auto g = green_filter(8, 3);
    for (Word w = 1; w < 256; ++w) CHECK((apply(g, w) & 1) == ((w == 255) ? 1u : 0u));
  }

  TEST_CASE("layer counts") {
    for (int n = 0; n <= 17; ++n) CHECK(matching_count(n) == matchings(n));
    CHECK(matching_count(17) == 211799312);
    CHECK(count_layers(17) == 211799311);
    for (int n = 1; n <= 9; ++n) {
      const auto layers = enumerate_layers(n);
      CHECK(layers.size() == count_layers(n));
      std::set<std::string> distinct;
      for (const auto& l : layers) {
        CHECK_FALSE(l.empty());
        distinct.insert(format_network(ComparatorNetwork(n, {l})));
      }
      CHECK(distinct.size() == layers.size());
    }
    std::uint64_t streamed = 0;
    for_each_layer(10, [&](const Layer&) { return ++streamed < 100; });
    CHECK(streamed == 100);
  }

  TEST_CASE("saturated second layers admit no shrinking extension") {
    // Saturated: no comparator on channels the layer leaves free maps the
    // output set into a strictly smaller part of itself.
    for (int n = 3; n <= 7; ++n) {
      const auto first = first_layer_P(n);
      const auto second = saturated_second_layers(n, first);
      CHECK_FALSE(second.empty());
      std::size_t rejected = 0;
      t::all_matchings(n, [&](const Layer& l) {
        const auto s = outputs(ComparatorNetwork(n, {first, l}));
        std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
        for (const auto& c : l) used[static_cast<std::size_t>(c.top)] = used[static_cast<std::size_t>(c.bottom)] = true;
        bool shrinks = false;
        for (int i = 1; i <= n; ++i)
          for (int j = i + 1; j <= n; ++j) {
            if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)]) continue;
            std::set<Word> img;
            bool inside = true;
            for (Word w : s.words) {
              const Word x = t::pack(t::run(ComparatorNetwork(n, {{{i, j}}}), t::unpack(w, n)));
              inside = inside && s.contains(x);
              img.insert(x);
            }
            if (inside && img.size() < s.size()) shrinks = true;
          }
        const bool listed = std::find(second.begin(), second.end(), l) != second.end();
        if (shrinks) CHECK_FALSE(listed);
        if (!listed) ++rejected;
      });
      CHECK(rejected + second.size() == matching_count(n));
    }
  }

  TEST_CASE("complete filter sets on small n") {
    for (int n = 3; n <= 8; ++n) {
      const auto set = complete_filter_set(n);
      CHECK(set.n == n);
      CHECK(set.prefixes.size() == t::kFilterSetSizes[n - 3]);
      for (const auto& p : set.prefixes) {
        CHECK(p.channels() == n);
        CHECK(p.depth() == 2);
        CHECK(p.layer(0) == first_layer_P(n));
      }
    }
    CHECK_THROWS(complete_filter_set(12, 11));
  }

  TEST_CASE("every second layer is covered by some filter") {
    for (int n = 4; n <= 6; ++n) {
      const auto set = complete_filter_set(n);
      std::vector<OutputSet> filter_outputs;
      for (const auto& f : set.prefixes) filter_outputs.push_back(outputs(f));
      t::all_matchings(n, [&](const Layer& l) {
        const auto op = outputs(ComparatorNetwork(n, {first_layer_P(n), l}));
        bool covered = false;
        for (const auto& fo : filter_outputs)
          if (subsumes_up_to_reflection(fo, op)) covered = true;
        CHECK(covered);
      });
    }
  }

  TEST_CASE("filter set files round trip") {
    const auto set = complete_filter_set(7);
    const auto text = to_json_lines(set);
    const auto back = filter_set_from_json_lines(text);
    CHECK(back.n == set.n);
    CHECK(back.prefixes == set.prefixes);
    CHECK(text.substr(0, 14) == R"({"filter_set":)");
    CHECK_THROWS(filter_set_from_json_lines("not json"));
  }

  TEST_CASE("catalog") {
    const auto& cat = catalog();
    CHECK(cat.version() >= 1);
    CHECK(cat.at("fig1").network.depth() == 5);
    CHECK(cat.at("fig6").prefix_depth == 3);
    CHECK(cat.at("fig7").prefix().depth() == 4);
    CHECK_THROWS(cat.at("nope"));
    for (int n = 1; n <= 10; ++n) {
      const auto b = cat.bounds_for(n);
      REQUIRE(b.has_value());
      CHECK(b->depth.lower == t::kOptimalDepth[n]);
      CHECK(b->depth.upper == t::kOptimalDepth[n]);
    }
    CHECK(cat.bounds_for(17)->depth.lower == 10);
    CHECK_FALSE(cat.bounds_for(99).has_value());
    CHECK_THROWS(parse_catalog("{}"));
  }
}
