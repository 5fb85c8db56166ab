#include "sortnet/satdriver.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sortnet/netcore.hpp"

#ifndef SORTNET_DEFAULT_SOLVER
#define SORTNET_DEFAULT_SOLVER "python3 tools/pysat_solve.py {cnf}"
#endif

namespace fs = std::filesystem;

namespace sortnet {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string tail(const std::string& s, std::size_t max = 400) {
  return s.size() <= max ? s : s.substr(s.size() - max);
}

fs::path fresh_path(const SolverConfig& config, const std::string& ext) {
  static std::atomic<unsigned long> counter{0};
  const fs::path dir = config.work_dir.empty() ? fs::temp_directory_path() : fs::path(config.work_dir);
  fs::create_directories(dir);
  return dir / ("sortnet-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ext);
}

std::string substitute(std::string command, const std::string& path) {
  const std::string quoted = "'" + path + "'";
  for (std::size_t pos = command.find("{cnf}"); pos != std::string::npos; pos = command.find("{cnf}", pos + quoted.size()))
    command.replace(pos, 5, quoted);
  return command;
}

struct ProcessResult {
  bool finished = false;
  bool cancelled = false;
  int exit_code = -1;
  std::string out;
  std::string err;
};

ProcessResult run_process(const std::string& command, double timeout, const std::atomic<bool>* cancel,
                          const SolverConfig& config) {
  const fs::path out_path = fresh_path(config, ".out");
  const fs::path err_path = fresh_path(config, ".err");
  ProcessResult r;
  // Opened before forking so the child only calls async-signal-safe functions.
  const int out_fd = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  const int err_fd = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (out_fd < 0 || err_fd < 0) throw std::runtime_error("cannot create solver output files");
  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    if (::dup2(out_fd, 1) < 0 || ::dup2(err_fd, 2) < 0) ::_exit(126);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(out_fd);
  ::close(err_fd);
  const auto start = Clock::now();
  int status = 0;
  auto pause = std::chrono::milliseconds(1);
  while (true) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      r.finished = true;
      break;
    }
    const bool stop = cancel && cancel->load();
    if (stop || seconds_since(start) > timeout) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      r.cancelled = stop;
      break;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(25));
  }
  if (r.finished) r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  std::error_code ec;
  fs::remove(out_path, ec);
  fs::remove(err_path, ec);
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kSat: return "SAT";
    case Verdict::kUnsat: return "UNSAT";
    case Verdict::kTimeout: return "TIMEOUT";
    case Verdict::kError: return "ERROR";
  }
  return "ERROR";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "SAT") return Verdict::kSat;
  if (s == "UNSAT") return Verdict::kUnsat;
  if (s == "TIMEOUT") return Verdict::kTimeout;
  if (s == "ERROR") return Verdict::kError;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

std::string to_string(CampaignMode m) { return m == CampaignMode::kFind ? "find" : "refute"; }

std::string to_string(Aggregate a) {
  switch (a) {
    case Aggregate::kNetworkFound: return "NETWORK_FOUND";
    case Aggregate::kNoNetwork: return "NO_NETWORK";
    case Aggregate::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

SolverConfig SolverConfig::from_environment() {
  SolverConfig c;
  const char* env = std::getenv("SORTNET_SOLVER");
  c.command = env && *env ? env : SORTNET_DEFAULT_SOLVER;
  return c;
}

SolveResult solve_file(const std::string& cnf_path, int num_vars, const SolverConfig& config,
                       const std::atomic<bool>* cancel) {
  if (config.command.empty()) throw std::invalid_argument("solver command is empty");
  if (!(config.timeout_seconds > 0)) throw std::invalid_argument("solver timeout must be positive");
  const auto start = Clock::now();
  SolveResult res;
  const auto proc = run_process(substitute(config.command, cnf_path), config.timeout_seconds, cancel, config);
  res.wall_seconds = seconds_since(start);
  if (!proc.finished) {
    res.verdict = proc.cancelled ? Verdict::kError : Verdict::kTimeout;
    res.detail = proc.cancelled ? "cancelled" : "timeout after " + std::to_string(config.timeout_seconds) + " s";
    return res;
  }

  std::optional<Verdict> status_line;
  Assignment model(static_cast<std::size_t>(num_vars) + 1, 0);
  bool saw_values = false;
  std::istringstream lines(proc.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSAT") != std::string::npos) status_line = Verdict::kUnsat;
      else if (line.find("SAT") != std::string::npos) status_line = Verdict::kSat;
    } else if (line.rfind(config.model_prefix + " ", 0) == 0) {
      std::istringstream lits(line.substr(config.model_prefix.size() + 1));
      long long lit = 0;
      while (lits >> lit) {
        if (lit == 0) continue;
        const long long var = lit < 0 ? -lit : lit;
        if (var <= num_vars) model[static_cast<std::size_t>(var)] = lit > 0 ? 1 : -1;
        saw_values = true;
      }
    }
  }

  if (proc.exit_code == config.sat_exit_code || (status_line == Verdict::kSat && proc.exit_code != config.unsat_exit_code)) {
    if (!saw_values) {
      res.verdict = Verdict::kError;
      res.detail = "solver reported SAT without a model";
      return res;
    }
    res.verdict = Verdict::kSat;
    res.model = std::move(model);
  } else if (proc.exit_code == config.unsat_exit_code || status_line == Verdict::kUnsat) {
    res.verdict = Verdict::kUnsat;
  } else {
    res.verdict = Verdict::kError;
    res.detail = proc.exit_code == 127 ? "solver command not found: " + config.command
                                       : "solver exited with code " + std::to_string(proc.exit_code) + ": " + tail(proc.err);
  }
  return res;
}

SolveResult solve(const Encoding& encoding, const SolverConfig& config, const std::atomic<bool>* cancel) {
  const fs::path cnf = fresh_path(config, ".cnf");
  {
    std::ofstream out(cnf);
    write_dimacs(out, encoding.cnf);
    if (!out) throw std::runtime_error("cannot write " + cnf.string());
  }
  auto res = solve_file(cnf.string(), encoding.cnf.num_vars, config, cancel);
  if (!config.keep_files) {
    std::error_code ec;
    fs::remove(cnf, ec);
  } else {
    res.detail += (res.detail.empty() ? "" : "; ") + std::string("instance kept at ") + cnf.string();
  }
  return res;
}

bool verify_witness(const ComparatorNetwork& prefix, const ComparatorNetwork& suffix, int n) {
  if (prefix.channels() != n || suffix.channels() != n) return false;
  return is_sorting_network(prefix.then(suffix));
}

ExtensionResult search_extension_detailed(const ComparatorNetwork& prefix, int d, const EncodeOptions& opts,
                                          const SolverConfig& config, const std::atomic<bool>* cancel) {
  const int n = prefix.channels();
  const int layers = d - prefix.depth();
  if (layers < 0) throw std::invalid_argument("prefix is deeper than the target depth");
  const auto start = Clock::now();
  ExtensionResult res;
  const OutputSet inputs = outputs(prefix);
  if (layers == 0) {
    const bool sorted = inputs.sorted_count() == inputs.size();
    res.verdict = sorted ? Verdict::kSat : Verdict::kUnsat;
    if (sorted) res.network = prefix;
    res.detail = "decided without a solver";
    res.wall_seconds = seconds_since(start);
    return res;
  }
  const auto enc = encode(n, layers, inputs, opts.applicable_for(layers), hex64(fnv1a(format_network(prefix))));
  res.clauses = enc.cnf.num_clauses();
  res.variables = enc.cnf.num_vars;
  const auto solved = solve(enc, config, cancel);
  res.verdict = solved.verdict;
  res.detail = solved.detail;
  if (solved.verdict == Verdict::kSat) {
    const auto suffix = decode_model(*solved.model, enc.registry, n, layers);
    if (!verify_witness(prefix, suffix, n))
      throw std::logic_error("solver model does not yield a sorting network; encoder and solver disagree");
    res.network = prefix.then(suffix);
  }
  res.wall_seconds = seconds_since(start);
  return res;
}

std::optional<ComparatorNetwork> search_extension(const ComparatorNetwork& prefix, int d, const EncodeOptions& opts,
                                                  const SolverConfig& config) {
  auto res = search_extension_detailed(prefix, d, opts, config);
  if (res.verdict == Verdict::kTimeout || res.verdict == Verdict::kError)
    throw std::runtime_error("solver " + to_string(res.verdict) + ": " + res.detail);
  return res.network;
}

std::string CampaignResult::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["d"] = d;
  j["mode"] = to_string(mode);
  j["aggregate"] = to_string(aggregate);
  j["wall_seconds"] = wall_seconds;
  if (witness) j["witness"] = nlohmann::json::parse(sortnet::to_json(*witness));
  if (offending) j["offending_prefix"] = *offending;
  auto& arr = j["prefixes"] = nlohmann::json::array();
  for (const auto& o : outcomes) {
    nlohmann::json e{{"index", o.index}, {"hash", o.hash}, {"seconds", o.seconds}, {"resumed", o.resumed}};
    e["verdict"] = o.verdict ? to_string(*o.verdict) : "SKIPPED";
    if (!o.detail.empty()) e["detail"] = o.detail;
    arr.push_back(std::move(e));
  }
  return j.dump();
}

CampaignResult campaign(const FilterSet& filters, int d, const EncodeOptions& opts, const SolverConfig& config,
                        CampaignMode mode, const CampaignOptions& options) {
  const auto start = Clock::now();
  CampaignResult result;
  result.n = filters.n;
  result.d = d;
  result.mode = mode;
  const std::size_t count = filters.prefixes.size();
  result.outcomes.resize(count);

  std::vector<std::string> hashes(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& p = filters.prefixes[i];
    hashes[i] = hex64(fnv1a(format_network(p) + "|n=" + std::to_string(filters.n) + "|d=" + std::to_string(d) + "|" +
                            opts.to_string() + (options.optimize_prefixes ? "|opt" : "")));
    result.outcomes[i].index = i;
    result.outcomes[i].hash = hashes[i];
  }

  struct Recorded {
    Verdict verdict;
    double seconds;
    std::string witness;
  };
  std::map<std::string, Recorded> journal;
  if (!options.journal_path.empty() && fs::exists(options.journal_path)) {
    std::ifstream in(options.journal_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        journal[j.at("hash").get<std::string>()] = {verdict_from_string(j.at("verdict").get<std::string>()),
                                                    j.value("seconds", 0.0), j.value("witness", "")};
      } catch (const std::exception&) {
        // A torn last line from an interrupted run is simply re-solved.
      }
    }
  }
  std::ofstream journal_out;
  if (!options.journal_path.empty()) journal_out.open(options.journal_path, std::ios::app);

  std::mutex mu;
  std::atomic<bool> stop{false};
  std::atomic<std::size_t> next{0};
  std::optional<ComparatorNetwork> witness;

  auto record = [&](std::size_t i, Verdict v, double secs, const std::string& detail,
                    const std::optional<ComparatorNetwork>& net, bool resumed) {
    std::lock_guard lock(mu);
    auto& o = result.outcomes[i];
    o.verdict = v;
    o.seconds = secs;
    o.detail = detail;
    o.resumed = resumed;
    if (v == Verdict::kSat && net && !witness) witness = net;
    if (!resumed && journal_out.is_open() && (v == Verdict::kSat || v == Verdict::kUnsat)) {
      nlohmann::json j{{"hash", hashes[i]}, {"index", i}, {"verdict", to_string(v)}, {"seconds", secs}};
      if (net) j["witness"] = format_network(*net);
      journal_out << j.dump() << "\n";
      journal_out.flush();
    }
    if (v == Verdict::kSat && mode == CampaignMode::kFind) stop = true;
  };

  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      if (stop) return;
      if (auto it = journal.find(hashes[i]); it != journal.end()) {
        std::optional<ComparatorNetwork> net;
        bool usable = true;
        if (it->second.verdict == Verdict::kSat) {
          // A SAT entry is only trusted with a witness that still verifies.
          usable = !it->second.witness.empty();
          if (usable) net = parse_network(it->second.witness, filters.n);
          usable = usable && is_sorting_network(*net);
        }
        if (usable) {
          record(i, it->second.verdict, it->second.seconds, "from journal", net, true);
          continue;
        }
      }
      try {
        ComparatorNetwork prefix = filters.prefixes[i];
        if (options.optimize_prefixes) prefix = optimize_prefix(prefix, options.optimizer).result;
        auto res = search_extension_detailed(prefix, d, opts, config, &stop);
        if (stop && res.verdict == Verdict::kError && res.detail == "cancelled") continue;
        record(i, res.verdict, res.wall_seconds, res.detail, res.network, false);
      } catch (const std::logic_error&) {
        throw;
      } catch (const std::exception& e) {
        record(i, Verdict::kError, 0, e.what(), std::nullopt, false);
      }
    }
  };

  const int workers = std::max(1, std::min<int>(options.parallelism, static_cast<int>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex fail_mu;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        try {
          work();
        } catch (...) {
          std::lock_guard lock(fail_mu);
          if (!failure) failure = std::current_exception();
          stop = true;
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  bool all_unsat = count > 0;
  for (const auto& o : result.outcomes) {
    if (!o.verdict || *o.verdict != Verdict::kUnsat) all_unsat = false;
    if (o.verdict && (*o.verdict == Verdict::kTimeout || *o.verdict == Verdict::kError) && !result.offending)
      result.offending = o.index;
  }
  if (witness) {
    result.aggregate = Aggregate::kNetworkFound;
    result.witness = witness;
  } else if (all_unsat) {
    result.aggregate = Aggregate::kNoNetwork;
  } else {
    result.aggregate = Aggregate::kInconclusive;
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

}  // namespace sortnet
