#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "sortnet/filters.hpp"
#include "sortnet/netcore.hpp"
#include "sortnet/satdriver.hpp"

using namespace sortnet;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sortnet-tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p.string();
}

std::string write_cnf(const std::string& name, const std::string& body) {
  const auto path = scratch(name);
  std::ofstream(path) << body;
  return path;
}

SolverConfig solver() {
  auto cfg = SolverConfig::from_environment();
  cfg.timeout_seconds = 120;
  return cfg;
}

}  // namespace

TEST_SUITE("satdriver") {
  TEST_CASE("verdict names") {
    for (auto v : {Verdict::kSat, Verdict::kUnsat, Verdict::kTimeout, Verdict::kError})
      CHECK(verdict_from_string(to_string(v)) == v);
    CHECK(to_string(Verdict::kSat) == "SAT");
    CHECK_THROWS(verdict_from_string("MAYBE"));
  }

  TEST_CASE("plain DIMACS through the external solver") {
    const auto sat = write_cnf("sat.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    const auto r = solve_file(sat, 2, solver());
    REQUIRE(r.verdict == Verdict::kSat);
    REQUIRE(r.model.has_value());
    CHECK((*r.model)[1] == -1);
    CHECK((*r.model)[2] == 1);
    const auto unsat = write_cnf("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    CHECK(solve_file(unsat, 1, solver()).verdict == Verdict::kUnsat);
  }

  TEST_CASE("timeouts, failures and cancellation") {
    const auto cnf = write_cnf("any.cnf", "p cnf 1 1\n1 0\n");
    SolverConfig slow;
    slow.command = "sleep 30";
    slow.timeout_seconds = 0.5;
    const auto t0 = std::chrono::steady_clock::now();
    CHECK(solve_file(cnf, 1, slow).verdict == Verdict::kTimeout);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));

    SolverConfig broken;
    broken.command = "exit 3";
    CHECK(solve_file(cnf, 1, broken).verdict == Verdict::kError);

    SolverConfig liar;  // claims SAT without a model line
    liar.command = "echo 's SATISFIABLE'; exit 10";
    CHECK(solve_file(cnf, 1, liar).verdict == Verdict::kError);

    std::atomic<bool> cancel{true};
    slow.timeout_seconds = 60;
    const auto t1 = std::chrono::steady_clock::now();
    CHECK(solve_file(cnf, 1, slow, &cancel).verdict != Verdict::kSat);
    CHECK(std::chrono::steady_clock::now() - t1 < std::chrono::seconds(10));
  }

  TEST_CASE("witness verification") {
    const auto fig1 = catalog().at("fig1").network;
    CHECK(verify_witness(fig1.prefix(2), fig1.suffix_from(2), 5));
    CHECK_FALSE(verify_witness(fig1.prefix(2), fig1.suffix_from(3), 5));
  }

  TEST_CASE("extension search on small widths") {
    const auto cfg = solver();
    for (const auto& opts : {EncodeOptions::none(), EncodeOptions::all()}) {
      const auto found = search_extension(ComparatorNetwork(3, {first_layer_P(3)}), 3, opts, cfg);
      REQUIRE(found.has_value());
      CHECK(found->depth() == 3);
      CHECK(is_sorting_network(*found));
      CHECK_FALSE(search_extension(ComparatorNetwork(3, {first_layer_P(3)}), 2, opts, cfg).has_value());
      const auto five = search_extension(ComparatorNetwork(5), 5, opts, cfg);
      REQUIRE(five.has_value());
      CHECK(is_sorting_network(*five));
    }
    // Depth equal to the prefix depth is decided without a solver.
    const auto d0 = search_extension_detailed(catalog().at("fig1").network, 5, EncodeOptions::all(), cfg);
    CHECK(d0.verdict == Verdict::kSat);
    CHECK(search_extension_detailed(ComparatorNetwork(3, {first_layer_P(3)}), 1, {}, cfg).verdict == Verdict::kUnsat);
    SolverConfig slow;
    slow.command = "sleep 30";
    slow.timeout_seconds = 0.3;
    CHECK_THROWS(search_extension(ComparatorNetwork(4), 3, {}, slow));
  }

  TEST_CASE("campaigns and their journal") {
    const auto set = complete_filter_set(5);
    const auto journal = scratch("journal.jsonl");
    CampaignOptions co;
    co.journal_path = journal;
    const auto refute = campaign(set, 4, EncodeOptions::all(), solver(), CampaignMode::kRefute, co);
    CHECK(refute.aggregate == Aggregate::kNoNetwork);
    CHECK(refute.outcomes.size() == set.prefixes.size());
    for (const auto& o : refute.outcomes) CHECK_FALSE(o.resumed);

    std::ifstream in(journal);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("hash"));
      CHECK(j.at("verdict") == "UNSAT");
      ++lines;
    }
    CHECK(lines == set.prefixes.size());

    // A rerun against a solver that always fails still concludes from the journal.
    SolverConfig broken;
    broken.command = "exit 3";
    const auto again = campaign(set, 4, EncodeOptions::all(), broken, CampaignMode::kRefute, co);
    CHECK(again.aggregate == Aggregate::kNoNetwork);
    for (const auto& o : again.outcomes) CHECK(o.resumed);

    const auto found = campaign(set, 5, EncodeOptions::all(), solver(), CampaignMode::kFind);
    CHECK(found.aggregate == Aggregate::kNetworkFound);
    REQUIRE(found.witness.has_value());
    CHECK(is_sorting_network(*found.witness));
    CHECK(nlohmann::json::parse(found.to_json()).at("aggregate") == "NETWORK_FOUND");

    const auto failing = campaign(set, 4, EncodeOptions::all(), broken, CampaignMode::kRefute);
    CHECK(failing.aggregate == Aggregate::kInconclusive);
    CHECK(failing.offending.has_value());
  }

  TEST_CASE("optimized prefixes give the same verdicts") {
    CampaignOptions co;
    co.optimize_prefixes = true;
    co.parallelism = 2;
    const auto set = complete_filter_set(6);
    CHECK(campaign(set, 4, EncodeOptions::all(), solver(), CampaignMode::kRefute, co).aggregate ==
          Aggregate::kNoNetwork);
    CHECK(campaign(set, 5, EncodeOptions::all(), solver(), CampaignMode::kFind, co).aggregate ==
          Aggregate::kNetworkFound);
  }
}
