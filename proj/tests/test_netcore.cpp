#include <doctest.h>

#include <algorithm>
#include <random>

#include "sortnet/filters.hpp"
#include "sortnet/netcore.hpp"
#include "support.hpp"

using namespace sortnet;
namespace t = sortnet::testing;

namespace {
const char* kFig1 = "1:2 3:4; 2:4 3:5; 1:3 2:5; 2:3 4:5; 3:4";
}

TEST_SUITE("netcore") {
  TEST_CASE("five-channel network shape and verdict") {
    const auto net = parse_network(kFig1);
    CHECK(net.channels() == 5);
    CHECK(net.depth() == 5);
    CHECK(net.size() == 9);
    CHECK(is_sorting_network(net));
    CHECK(t::naive_sorts(net));
  }

  TEST_CASE("dropping any comparator of a size-optimal network breaks it") {
    // 9 comparators is optimal on 5 channels, so every one is needed.
    const auto net = parse_network(kFig1);
    for (int k = 0; k < net.depth(); ++k)
      for (std::size_t c = 0; c < net.layer(k).size(); ++c) {
        auto layers = net.layers();
        layers[static_cast<std::size_t>(k)].erase(layers[static_cast<std::size_t>(k)].begin() + static_cast<long>(c));
        const ComparatorNetwork cut(5, layers);
        CHECK_FALSE(is_sorting_network(cut));
        CHECK_FALSE(t::naive_sorts(cut));
      }
  }

  TEST_CASE("apply agrees with comparator-at-a-time evaluation") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 7;
      const auto net = t::random_network(n, 1 + trial % 6, rng, trial % 2 == 1);
      for (Word w = 0; w < (Word{1} << n); ++w) REQUIRE(apply(net, w) == t::pack(t::run(net, t::unpack(w, n))));
      CHECK(is_sorting_network(net) == t::naive_sorts(net));
    }
  }

  TEST_CASE("outputs match the set of images") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2 + trial % 6;
      const auto net = t::random_network(n, 1 + trial % 4, rng);
      const auto out = outputs(net);
      const auto ref = t::naive_outputs(net);
      CHECK(std::vector<Word>(ref.begin(), ref.end()) == out.words);
    }
  }

  TEST_CASE("single comparator on two channels") {
    const ComparatorNetwork net(2, {{{1, 2}}});
    const auto out = outputs(net);
    CHECK(out.size() == 3);
    CHECK_FALSE(out.contains(parse_word("10").bits));
    CHECK(out.sorted_count() == 3);
  }

  TEST_CASE("sorting networks are large enough to need 64-bit slicing") {
    for (const char* name : {"fig6", "fig7"}) {
      const auto& e = catalog().at(name);
      CHECK(is_sorting_network(e.network));
      auto broken = e.network.layers();
      broken.back().pop_back();
      CHECK_FALSE(is_sorting_network(ComparatorNetwork(e.network.channels(), broken)));
    }
  }

  TEST_CASE("words and windows") {
    CHECK(format_word(parse_word("0010111").bits, 7) == "0010111");
    const auto ws = window_stats(parse_word("0010111"));
    CHECK(ws.leading_zeros == 2);
    CHECK(ws.trailing_ones == 3);
    CHECK(ws.window == 2);
    CHECK(window_stats(parse_word("0011")).window == 0);
    CHECK(window_stats(parse_word("1100")).window == 4);
    CHECK(window_stats(parse_word("0000")).window == 0);
    CHECK(is_sorted_word(sorted_word(6, 2), 6));
    CHECK(format_word(sorted_word(6, 2), 6) == "000011");
    CHECK_THROWS(parse_word("01x"));
  }

  TEST_CASE("window sum over the full cube") {
    for (int n = 1; n <= 10; ++n) {
      long long expect = 0;
      for (Word w = 0; w < (Word{1} << n); ++w) {
        const auto x = t::unpack(w, n);
        int lo = 0, hi = n;
        while (lo < n && x[static_cast<std::size_t>(lo)] == 0) ++lo;
        while (hi > lo && x[static_cast<std::size_t>(hi - 1)] == 1) --hi;
        expect += hi - lo;
      }
      CHECK(window_sum(all_words(n)) == expect);
    }
  }

  TEST_CASE("trace and evaluate") {
    const auto net = parse_network(kFig1);
    const auto steps = trace(net, parse_word("11010"));
    REQUIRE(steps.size() == 6);
    CHECK(format_word(steps.front().bits, 5) == "11010");
    CHECK(format_word(steps.back().bits, 5) == "00111");
    CHECK(evaluate(net, parse_word("11010")) == steps.back());
    CHECK_THROWS_AS(evaluate(net, parse_word("1101")), std::invalid_argument);
  }

  TEST_CASE("text and JSON round trips") {
    std::mt19937_64 rng(3);
    for (const auto& e : catalog().entries()) {
      CHECK(parse_network(format_network(e.network), e.network.channels()) == e.network);
      CHECK(network_from_json(to_json(e.network)) == e.network);
      CHECK(read_network(write_network(e.network)) == e.network);
    }
    for (int trial = 0; trial < 100; ++trial) {
      const auto net = t::random_network(2 + trial % 9, trial % 5, rng, true);
      CHECK(parse_network(format_network(net), net.channels()) == net);
      CHECK(read_network(write_network(net)) == net);
      CHECK(network_from_json(to_json(net)) == net);
    }
    CHECK(to_json(ComparatorNetwork(2, {{{1, 2}}})) == R"({"n":2,"layers":[[[1,2]]]})");
    CHECK(format_network(ComparatorNetwork(3, {{{3, 1}}})) == "3:1");
  }

  TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(read_network(""), ParseError);
    try {
      parse_network("1:2 3:4;\n1:x");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() == 3);
    }
    CHECK_THROWS(parse_network("1:2 2:3"));
    CHECK_THROWS(parse_network("1:1"));
    CHECK_THROWS(parse_network("1:4", 3));
  }

  TEST_CASE("permutations compose") {
    const ChannelPermutation a({2, 3, 1}), b({1, 3, 2});
    const auto ab = a.after(b);
    for (int c = 1; c <= 3; ++c) CHECK(ab(c) == a(b(c)));
    CHECK(a.after(a.inverse()).is_identity());
    CHECK(a.apply(parse_word("100").bits) == parse_word("010").bits);
    CHECK_THROWS(ChannelPermutation({1, 1, 2}));
  }

  TEST_CASE("forward standardization keeps the output set up to a permutation") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 80; ++trial) {
      const int n = 3 + trial % 4;
      const auto g = t::random_network(n, 2 + trial % 4, rng, true);
      const auto s = standardize_forward(g);
      CHECK(s.is_standard());
      CHECK(s.size() == g.size());
      const auto a = outputs(g), b = outputs(s);
      CHECK(a.size() == b.size());
      CHECK(find_inclusion(a, b).has_value());
      // The dual variant only promises to keep sorting networks sorting.
      CHECK(standardize_dual(g).is_standard());
    }
  }

  TEST_CASE("standardization preserves sorting") {
    std::mt19937_64 rng(19);
    const auto base = parse_network(kFig1);
    int sorted_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
      // Flip random comparators; the variants that still sort must keep
      // sorting once untangled.
      auto layers = base.layers();
      for (auto& l : layers)
        for (auto& c : l)
          if (std::bernoulli_distribution(0.2)(rng)) std::swap(c.top, c.bottom);
      const ComparatorNetwork g(5, layers);
      if (!is_sorting_network(g)) continue;
      ++sorted_seen;
      CHECK(is_sorting_network(standardize_forward(g)));
      CHECK(is_sorting_network(standardize_dual(g)));
    }
    CHECK(sorted_seen > 0);
    const auto g = permute(base, ChannelPermutation({5, 4, 3, 2, 1}));
    CHECK(t::naive_sorts(reflect(base)));
    CHECK_FALSE(g.is_standard());
    CHECK(standardize_forward(g).is_standard());
  }

  TEST_CASE("reflection complements and reverses outputs") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 6;
      const auto net = t::random_network(n, 1 + trial % 4, rng);
      const auto out = outputs(net);
      const auto rout = outputs(reflect(net));
      CHECK(out.size() == rout.size());
      for (Word w : out.words) {
        auto x = t::unpack(w, n);
        std::reverse(x.begin(), x.end());
        for (auto& b : x) b = 1 - b;
        CHECK(rout.contains(t::pack(x)));
      }
    }
    CHECK(is_sorting_network(reflect(parse_network(kFig1))));
  }

  TEST_CASE("redundancy removal preserves the function") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 3 + trial % 5;
      const auto net = t::random_network(n, 3 + trial % 5, rng);
      const auto r = remove_redundant(net);
      const auto rk = remove_redundant_keep_depth(net);
      CHECK(rk.depth() == net.depth());
      CHECK(r.size() <= net.size());
      for (Word w = 0; w < (Word{1} << n); ++w) {
        REQUIRE(apply(r, w) == apply(net, w));
        REQUIRE(apply(rk, w) == apply(net, w));
      }
      for (int k = 0; k < r.depth(); ++k)
        for (const auto& c : r.layer(k)) CHECK_FALSE(is_redundant(r, k, c));
    }
    // A repeated comparator is the textbook redundant one.
    const ComparatorNetwork twice(2, {{{1, 2}}, {{1, 2}}});
    CHECK(is_redundant(twice, 1, {1, 2}));
    CHECK_FALSE(is_redundant(twice, 0, {1, 2}));
    CHECK(remove_redundant(twice).size() == 1);
  }

  TEST_CASE("subsumption witnesses are real inclusions") {
    std::mt19937_64 rng(31);
    int found = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const int n = 3 + trial % 4;
      const auto a = t::random_network(n, 2, rng), b = t::random_network(n, 2, rng);
      const auto oa = outputs(a), ob = outputs(b);
      if (const auto pi = subsumes(a, b)) {
        ++found;
        for (Word w : oa.words) CHECK(ob.contains(pi->apply(w)));
      }
      if (const auto pi = cosubsumes(a, b)) {
        const auto sa = sorts_set(a), sb = sorts_set(b);
        for (Word w : sa.words) CHECK(sb.contains(pi->apply(w)));
      }
      if (const auto rw = subsumes_up_to_reflection(oa, ob)) {
        const auto src = rw->complemented ? complement(oa) : oa;
        for (Word w : src.words) CHECK(ob.contains(rw->perm.apply(w)));
      }
    }
    CHECK(found > 0);
    // Every network subsumes itself under a permutation of itself.
    const auto c = parse_network("1:2 3:4; 1:3");
    CHECK(subsumes(c, permute(c, ChannelPermutation({4, 3, 2, 1}))).has_value());
    // Larger output set cannot be included in a smaller one.
    CHECK_FALSE(subsumes(ComparatorNetwork(4), c).has_value());
  }

  TEST_CASE("sorts_set is the preimage of sorted words") {
    const auto c = parse_network("1:2 3:4; 1:3 2:4");
    const auto s = sorts_set(c);
    for (Word w = 0; w < 16; ++w) CHECK(s.contains(w) == is_sorted_word(apply(c, w), 4));
  }

  TEST_CASE("standard networks are monotone") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2 + trial % 5;
      CHECK(monotone_check(t::random_network(n, 1 + trial % 5, rng)));
    }
  }
}
