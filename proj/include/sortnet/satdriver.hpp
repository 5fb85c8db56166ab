#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "sortnet/encoder.hpp"
#include "sortnet/filters.hpp"
#include "sortnet/network.hpp"
#include "sortnet/prefopt.hpp"

namespace sortnet {

enum class Verdict { kSat, kUnsat, kTimeout, kError };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SolverConfig {
  /// Shell command; "{cnf}" is replaced by the DIMACS path.
  std::string command;
  double timeout_seconds = 3600;
  int sat_exit_code = 10;
  int unsat_exit_code = 20;
  std::string model_prefix = "v";
  /// Where instance files go; the system temp directory when empty.
  std::string work_dir;
  bool keep_files = false;

  /// SORTNET_SOLVER if set, else the bundled python-sat wrapper.
  static SolverConfig from_environment();
};

struct SolveResult {
  Verdict verdict = Verdict::kError;
  std::optional<Assignment> model;
  double wall_seconds = 0;
  std::string detail;
};

/// Runs the solver on a DIMACS file already on disk.
SolveResult solve_file(const std::string& cnf_path, int num_vars, const SolverConfig& config,
                       const std::atomic<bool>* cancel = nullptr);
SolveResult solve(const Encoding& encoding, const SolverConfig& config, const std::atomic<bool>* cancel = nullptr);

/// Exhaustive check that prefix;suffix sorts, independent of the encoder.
bool verify_witness(const ComparatorNetwork& prefix, const ComparatorNetwork& suffix, int n);

struct ExtensionResult {
  Verdict verdict = Verdict::kError;
  std::optional<ComparatorNetwork> network;  // verified prefix;suffix on SAT
  double wall_seconds = 0;
  std::size_t clauses = 0;
  int variables = 0;
  std::string detail;
};

/// Looks for a depth-d sorting network starting with `prefix`. Throws
/// std::logic_error if the solver's model does not verify.
ExtensionResult search_extension_detailed(const ComparatorNetwork& prefix, int d, const EncodeOptions& opts,
                                          const SolverConfig& config, const std::atomic<bool>* cancel = nullptr);
std::optional<ComparatorNetwork> search_extension(const ComparatorNetwork& prefix, int d, const EncodeOptions& opts,
                                                  const SolverConfig& config);

enum class CampaignMode { kFind, kRefute };
enum class Aggregate { kNetworkFound, kNoNetwork, kInconclusive };
std::string to_string(CampaignMode m);
std::string to_string(Aggregate a);

struct PrefixOutcome {
  std::size_t index = 0;
  std::string hash;
  std::optional<Verdict> verdict;  // empty when skipped after a find succeeded
  double seconds = 0;
  bool resumed = false;
  std::string detail;
};

struct CampaignOptions {
  int parallelism = 1;
  std::string journal_path;  // empty disables journaling
  bool optimize_prefixes = false;
  OptimizerConfig optimizer;
};

struct CampaignResult {
  int n = 0;
  int d = 0;
  CampaignMode mode = CampaignMode::kRefute;
  std::vector<PrefixOutcome> outcomes;
  Aggregate aggregate = Aggregate::kInconclusive;
  std::optional<ComparatorNetwork> witness;
  std::optional<std::size_t> offending;  // first TIMEOUT/ERROR prefix
  double wall_seconds = 0;

  std::string to_json() const;
};

CampaignResult campaign(const FilterSet& filters, int d, const EncodeOptions& opts, const SolverConfig& config,
                        CampaignMode mode, const CampaignOptions& options = {});

}  // namespace sortnet
