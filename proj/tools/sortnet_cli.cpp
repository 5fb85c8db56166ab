#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sortnet/encoder.hpp"
#include "sortnet/filters.hpp"
#include "sortnet/netcore.hpp"
#include "sortnet/prefopt.hpp"
#include "sortnet/render.hpp"
#include "sortnet/satdriver.hpp"
#include "sortnet/suffix.hpp"

using namespace sortnet;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFalse = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

// "@name" picks a catalog network, "@name/prefix" its distinguished prefix.
ComparatorNetwork load(const std::string& spec) {
  if (!spec.empty() && spec[0] == '@') {
    std::string name = spec.substr(1);
    bool prefix = false;
    if (auto slash = name.find('/'); slash != std::string::npos) {
      if (name.substr(slash + 1) != "prefix") throw std::runtime_error("unknown catalog selector in " + spec);
      prefix = true;
      name.resize(slash);
    }
    const auto& e = catalog().at(name);
    return prefix ? e.prefix() : e.network;
  }
  return read_network(slurp(spec));
}

void print(bool as_json, const json& j, const std::string& text) {
  if (as_json) std::cout << j.dump() << "\n";
  else std::cout << text;
}

SuffixKind suffix_kind(const std::string& s) {
  if (s == "nonredundant") return SuffixKind::kNonredundantLastLayer;
  if (s == "llnf") return SuffixKind::kLlnfLastLayer;
  if (s == "cosat-suffixes" || s == "cosat") return SuffixKind::kCosaturatedTwoLayer;
  throw std::runtime_error("unknown enumeration kind '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sorting network toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  std::string net_path;
  std::string word_text;

  auto* verify = app.add_subcommand("verify", "Check whether a network sorts (exit 2 if not)");
  verify->add_option("network", net_path, "Network file or @catalog-name")->required();

  auto* eval = app.add_subcommand("eval", "Run one 0/1 word through a network");
  eval->add_option("network", net_path)->required();
  eval->add_option("word", word_text, "e.g. 10110")->required();

  auto* trace_cmd = app.add_subcommand("trace", "Show a word after every layer");
  trace_cmd->add_option("network", net_path)->required();
  trace_cmd->add_option("word", word_text)->required();

  bool list_words = false;
  auto* outputs_cmd = app.add_subcommand("outputs", "Output set statistics");
  outputs_cmd->add_option("network", net_path)->required();
  outputs_cmd->add_flag("--stats", "Print statistics (default)");
  outputs_cmd->add_flag("--list", list_words, "Also list every output word");

  std::string enum_kind;
  int enum_n = 0;
  bool emit_items = false;
  auto* enumerate = app.add_subcommand("enumerate", "Count last layers, co-saturated suffixes or layers");
  enumerate->add_option("kind", enum_kind, "nonredundant | llnf | cosat-suffixes | layers")->required();
  enumerate->add_option("n", enum_n)->required();
  enumerate->add_flag("--emit-items", emit_items, "Stream the items in canonical text");

  int filt_n = 0, filt_limit = kDefaultFilterLimit;
  std::string filt_out;
  auto* filters = app.add_subcommand("filters", "Generate a complete set of two-layer filters");
  filters->add_option("n", filt_n)->required();
  filters->add_option("--limit", filt_limit, "Largest n generated");
  filters->add_option("--out", filt_out, "Write JSON lines here");

  std::string opt_in, opt_out, perm_out;
  OptimizerConfig opt_cfg;
  auto* optimize = app.add_subcommand("optimize-prefix", "Permute a prefix to minimize total window size");
  optimize->add_option("--in", opt_in)->required();
  optimize->add_option("--seed", opt_cfg.rng_seed);
  optimize->add_option("--pop", opt_cfg.population_size);
  optimize->add_option("--iters", opt_cfg.iterations);
  optimize->add_option("--swaps", opt_cfg.swaps_per_mutation);
  optimize->add_option("--out", opt_out);
  optimize->add_option("--perm-out", perm_out);

  int enc_n = 0, enc_d = 0;
  std::string enc_prefix, enc_options = "none", enc_out, enc_registry;
  auto* encode_cmd = app.add_subcommand("encode", "Write the DIMACS instance for a depth question");
  encode_cmd->add_option("--n", enc_n, "Channels (taken from the prefix when given)");
  encode_cmd->add_option("--d", enc_d, "Total depth")->required();
  encode_cmd->add_option("--prefix", enc_prefix, "Prefix network file or @catalog-name");
  encode_cmd->add_option("--options", enc_options, "none | all | comma list of flags");
  encode_cmd->add_option("--out", enc_out, "DIMACS path")->required();
  encode_cmd->add_option("--registry", enc_registry, "Registry sidecar path");

  std::string solve_cnf, solve_registry, solve_prefix;
  double timeout = 3600;
  auto* solve_cmd = app.add_subcommand("solve", "Run the external solver on a DIMACS file");
  solve_cmd->add_option("cnf", solve_cnf)->required();
  solve_cmd->add_option("--registry", solve_registry, "Sidecar used to decode and verify a model");
  solve_cmd->add_option("--prefix", solve_prefix, "Prefix the instance was built for");
  solve_cmd->add_option("--timeout", timeout);

  std::string search_prefix, search_options = "all", search_out;
  int search_n = 0, search_d = 0;
  auto* search = app.add_subcommand("search", "Extend a prefix to a sorting network of depth d");
  search->add_option("--prefix", search_prefix, "Prefix network file or @catalog-name");
  search->add_option("--n", search_n, "Channels when no prefix is given");
  search->add_option("--d", search_d)->required();
  search->add_option("--options", search_options);
  search->add_option("--timeout", timeout);
  search->add_option("--out", search_out);

  int camp_n = 0, camp_d = 0;
  std::string camp_mode = "refute", camp_filters, camp_options = "all", camp_journal, camp_out;
  CampaignOptions camp_opts;
  auto* campaign_cmd = app.add_subcommand("campaign", "Solve every prefix of a filter set (exit 2 if inconclusive)");
  campaign_cmd->add_option("--n", camp_n)->required();
  campaign_cmd->add_option("--d", camp_d)->required();
  campaign_cmd->add_option("--mode", camp_mode, "find | refute");
  campaign_cmd->add_option("--filters", camp_filters, "Filter set JSON lines (generated when omitted)");
  campaign_cmd->add_option("--options", camp_options);
  campaign_cmd->add_option("--parallel", camp_opts.parallelism);
  campaign_cmd->add_option("--journal", camp_journal, "Resume journal (JSON lines)");
  campaign_cmd->add_flag("--optimize-prefixes", camp_opts.optimize_prefixes);
  campaign_cmd->add_option("--timeout", timeout);
  campaign_cmd->add_option("--out", camp_out, "Write the result JSON here");

  std::string render_format = "text", render_out;
  bool no_separators = false, no_labels = false;
  auto* render_cmd = app.add_subcommand("render", "Draw a Knuth diagram");
  render_cmd->add_option("network", net_path)->required();
  render_cmd->add_option("--format", render_format, "text | svg");
  render_cmd->add_flag("--no-separators", no_separators);
  render_cmd->add_flag("--no-labels", no_labels);
  render_cmd->add_option("--out", render_out);

  std::string cat_name;
  bool cat_prefix = false, cat_bounds = false;
  auto* catalog_cmd = app.add_subcommand("catalog", "List or print catalog networks and known bounds");
  catalog_cmd->add_option("name", cat_name);
  catalog_cmd->add_flag("--prefix", cat_prefix, "Print the distinguished prefix");
  catalog_cmd->add_flag("--bounds", cat_bounds, "Print the table of known bounds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const auto net = load(net_path);
      const bool sorts = is_sorting_network(net);
      const auto violations = sorts ? validate_suffix_conditions(remove_redundant(net)) : std::vector<SuffixViolation>{};
      json j{{"sorting", sorts}, {"n", net.channels()}, {"depth", net.depth()}, {"size", net.size()}};
      std::ostringstream text;
      text << (sorts ? "sorting network" : "not a sorting network") << ", depth " << net.depth() << ", size "
           << net.size() << "\n";
      j["violations"] = json::array();
      for (const auto& v : violations) {
        j["violations"].push_back(v.message);
        text << "  " << v.message << "\n";
      }
      print(as_json, j, text.str());
      return sorts ? kOk : kFalse;
    }

    if (*eval || *trace_cmd) {
      const auto net = load(net_path);
      const auto word = parse_word(word_text);
      if (*eval) {
        const auto out = evaluate(net, word);
        print(as_json, json{{"input", word_text}, {"output", format_word(out.bits, out.n)}},
              format_word(out.bits, out.n) + "\n");
        return kOk;
      }
      const auto steps = trace(net, word);
      json j = json::array();
      std::ostringstream text;
      for (std::size_t k = 0; k < steps.size(); ++k) {
        j.push_back(format_word(steps[k].bits, steps[k].n));
        text << k << " " << format_word(steps[k].bits, steps[k].n) << "\n";
      }
      print(as_json, j, text.str());
      return kOk;
    }

    if (*outputs_cmd) {
      const auto net = load(net_path);
      const auto out = outputs(net);
      json j{{"outputs", out.size()}, {"sorted", out.sorted_count()}, {"window_sum", window_sum(out)}};
      std::ostringstream text;
      text << "outputs " << out.size() << "\nsorted " << out.sorted_count() << "\nwindow_sum " << window_sum(out)
           << "\n";
      if (list_words) {
        j["words"] = json::array();
        for (Word w : out.words) {
          j["words"].push_back(format_word(w, out.n));
          text << format_word(w, out.n) << "\n";
        }
      }
      print(as_json, j, text.str());
      return kOk;
    }

    if (*enumerate) {
      if (enum_kind == "layers") {
        const auto count = count_layers(enum_n);
        print(as_json, json{{"n", enum_n}, {"kind", "layers"}, {"count", count}, {"matchings", matching_count(enum_n)}},
              std::to_string(count) + "\n");
        if (emit_items)
          for_each_layer(enum_n, [&](const Layer& l) {
            std::cout << format_network(ComparatorNetwork(enum_n, {l})) << "\n";
            return true;
          });
        return kOk;
      }
      const auto kind = suffix_kind(enum_kind);
      if (emit_items) {
        // Items are streamed, so the report itself stays small.
        EnumerationReport report;
        if (kind == SuffixKind::kCosaturatedTwoLayer) {
          report = enumerate_cosat_suffixes(enum_n, false, [](const ComparatorNetwork& s) {
            std::cout << format_network(s) << "\n";
          });
        } else {
          report = enumerate_last_layers(enum_n, kind, true);
          for (const auto& item : report.items) std::cout << format_network(item) << "\n";
        }
        std::cerr << to_json(report) << "\n";
        return kOk;
      }
      const auto report = kind == SuffixKind::kCosaturatedTwoLayer ? enumerate_cosat_suffixes(enum_n)
                                                                  : enumerate_last_layers(enum_n, kind);
      print(as_json, json::parse(to_json(report)), std::to_string(report.count) + "\n");
      return kOk;
    }

    if (*filters) {
      const auto set = complete_filter_set(filt_n, filt_limit);
      if (!filt_out.empty()) spit(filt_out, to_json_lines(set));
      json j{{"n", filt_n}, {"count", set.prefixes.size()}};
      std::ostringstream text;
      text << set.prefixes.size() << " prefixes\n";
      if (filt_out.empty())
        for (const auto& p : set.prefixes) text << format_network(p) << "\n";
      print(as_json, j, text.str());
      return kOk;
    }

    if (*optimize) {
      const auto prefix = load(opt_in);
      const auto res = optimize_prefix(prefix, opt_cfg);
      if (!opt_out.empty()) spit(opt_out, write_network(res.result));
      json perm{{"permutation", res.permutation.images()}, {"fitness", res.fitness}};
      if (!perm_out.empty()) spit(perm_out, perm.dump() + "\n");
      json j{{"input_fitness", fitness(prefix)}, {"fitness", res.fitness},
             {"permutation", res.permutation.images()}, {"network", format_network(res.result)}};
      print(as_json, j,
            "fitness " + std::to_string(fitness(prefix)) + " -> " + std::to_string(res.fitness) + "\n" +
                format_network(res.result) + "\n");
      return kOk;
    }

    if (*encode_cmd) {
      ComparatorNetwork prefix = enc_prefix.empty() ? ComparatorNetwork(enc_n) : load(enc_prefix);
      if (enc_prefix.empty() && enc_n < 1) throw std::runtime_error("--n or --prefix is required");
      const int n = prefix.channels();
      const int layers = enc_d - prefix.depth();
      const auto enc = encode(n, layers, outputs(prefix), EncodeOptions::parse(enc_options),
                              hex64(fnv1a(format_network(prefix))));
      json meta{{"n", n}, {"d", enc_d}, {"layers", layers}, {"prefix", format_network(prefix)},
                {"options", enc.cnf.meta.options}};
      const std::string registry = enc.registry.to_json(meta.dump());
      const std::string reg_hash = hex64(fnv1a(registry));
      {
        std::ofstream out(enc_out);
        write_dimacs(out, enc.cnf, reg_hash);
        if (!out) throw std::runtime_error("cannot write " + enc_out);
      }
      if (!enc_registry.empty()) spit(enc_registry, registry + "\n");
      if (!enc.cnf.meta.warning.empty()) std::cerr << "warning: " << enc.cnf.meta.warning << "\n";
      print(as_json, json{{"variables", enc.cnf.num_vars}, {"clauses", enc.cnf.num_clauses()}, {"registry", reg_hash}},
            "p cnf " + std::to_string(enc.cnf.num_vars) + " " + std::to_string(enc.cnf.num_clauses()) + "\n");
      return kOk;
    }

    if (*solve_cmd) {
      auto cfg = SolverConfig::from_environment();
      cfg.timeout_seconds = timeout;
      std::optional<VarRegistry> reg;
      json meta;
      if (!solve_registry.empty()) {
        const auto text = slurp(solve_registry);
        reg = VarRegistry::from_json(text);
        meta = json::parse(text).at("meta");
      }
      int num_vars = reg ? reg->size() : 0;
      if (!reg) {
        std::istringstream in(slurp(solve_cnf));
        std::string line;
        while (std::getline(in, line))
          if (line.rfind("p cnf ", 0) == 0) {
            num_vars = std::stoi(line.substr(6));
            break;
          }
      }
      const auto res = solve_file(solve_cnf, num_vars, cfg);
      json j{{"verdict", to_string(res.verdict)}, {"wall_seconds", res.wall_seconds}};
      std::string text = to_string(res.verdict) + "\n";
      if (res.verdict == Verdict::kSat && reg) {
        const int n = meta.at("n"), layers = meta.at("layers");
        const auto suffix = decode_model(*res.model, *reg, n, layers);
        const ComparatorNetwork prefix =
            solve_prefix.empty() ? parse_network(meta.value("prefix", ""), n) : load(solve_prefix);
        const bool ok = verify_witness(prefix, suffix, n);
        j["network"] = format_network(prefix.then(suffix));
        j["verified"] = ok;
        text += format_network(prefix.then(suffix)) + "\n" + (ok ? "verified\n" : "NOT a sorting network\n");
        if (!ok) {
          print(as_json, j, text);
          return kError;
        }
      }
      if (!res.detail.empty()) j["detail"] = res.detail;
      print(as_json, j, text);
      if (res.verdict == Verdict::kSat) return kOk;
      return res.verdict == Verdict::kUnsat ? kFalse : kError;
    }

    if (*search) {
      auto cfg = SolverConfig::from_environment();
      cfg.timeout_seconds = timeout;
      const ComparatorNetwork prefix = search_prefix.empty() ? ComparatorNetwork(search_n) : load(search_prefix);
      if (prefix.channels() < 1) throw std::runtime_error("--n or --prefix is required");
      const auto res = search_extension_detailed(prefix, search_d, EncodeOptions::parse(search_options), cfg);
      json j{{"verdict", to_string(res.verdict)}, {"wall_seconds", res.wall_seconds},
             {"variables", res.variables}, {"clauses", res.clauses}};
      std::string text = to_string(res.verdict) + " in " + std::to_string(res.wall_seconds) + " s\n";
      if (res.network) {
        j["network"] = format_network(*res.network);
        text += format_network(*res.network) + "\n";
        if (!search_out.empty()) spit(search_out, write_network(*res.network));
      }
      if (!res.detail.empty()) j["detail"] = res.detail;
      print(as_json, j, text);
      if (res.verdict == Verdict::kSat) return kOk;
      return res.verdict == Verdict::kUnsat ? kFalse : kError;
    }

    if (*campaign_cmd) {
      auto cfg = SolverConfig::from_environment();
      cfg.timeout_seconds = timeout;
      if (camp_mode != "find" && camp_mode != "refute") throw std::runtime_error("mode must be find or refute");
      const FilterSet set = camp_filters.empty() ? complete_filter_set(camp_n) : filter_set_from_json_lines(slurp(camp_filters));
      if (set.n != camp_n) throw std::runtime_error("filter set is for a different n");
      camp_opts.journal_path = camp_journal;
      const auto res = campaign(set, camp_d, EncodeOptions::parse(camp_options), cfg,
                                camp_mode == "find" ? CampaignMode::kFind : CampaignMode::kRefute, camp_opts);
      if (!camp_out.empty()) spit(camp_out, res.to_json() + "\n");
      std::ostringstream text;
      text << to_string(res.aggregate) << " (n=" << res.n << ", d=" << res.d << ", " << set.prefixes.size()
           << " prefixes, " << res.wall_seconds << " s)\n";
      if (res.witness) text << format_network(*res.witness) << "\n";
      if (res.offending) text << "inconclusive at prefix " << *res.offending << "\n";
      print(as_json, json::parse(res.to_json()), text.str());
      return res.aggregate == Aggregate::kInconclusive ? kFalse : kOk;
    }

    if (*render_cmd) {
      RenderSpec spec;
      if (render_format == "svg") spec.format = RenderSpec::Format::kSvg;
      else if (render_format != "text") throw std::runtime_error("format must be text or svg");
      spec.layer_separators = !no_separators;
      spec.channel_labels = !no_labels;
      const auto out = render(load(net_path), spec);
      if (render_out.empty()) std::cout << out;
      else spit(render_out, out);
      return kOk;
    }

    if (*catalog_cmd) {
      const auto& cat = catalog();
      if (cat_bounds) {
        json j = json::array();
        std::ostringstream text;
        text << "n  size      depth\n";
        for (const auto& b : cat.known_bounds()) {
          j.push_back({{"n", b.n}, {"size", {b.size.lower, b.size.upper}}, {"depth", {b.depth.lower, b.depth.upper}}});
          auto range = [](BoundRange r) {
            return r.lower == r.upper ? std::to_string(r.lower) : std::to_string(r.lower) + "-" + std::to_string(r.upper);
          };
          char line[64];
          std::snprintf(line, sizeof line, "%-2d %-9s %s\n", b.n, range(b.size).c_str(), range(b.depth).c_str());
          text << line;
        }
        print(as_json, j, text.str());
        return kOk;
      }
      if (cat_name.empty()) {
        json j = json::array();
        std::ostringstream text;
        for (const auto& e : cat.entries()) {
          j.push_back({{"name", e.name}, {"n", e.network.channels()}, {"depth", e.network.depth()},
                       {"prefix_depth", e.prefix_depth}, {"description", e.description}});
          text << e.name << "  n=" << e.network.channels() << " depth=" << e.network.depth() << "  " << e.description
               << "\n";
        }
        print(as_json, j, text.str());
        return kOk;
      }
      const auto& e = cat.at(cat_name);
      if (cat_prefix && e.prefix_depth == 0) throw std::runtime_error(cat_name + " has no distinguished prefix");
      const auto net = cat_prefix ? e.prefix() : e.network;
      if (as_json) std::cout << to_json(net) << "\n";
      else std::cout << write_network(net);
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
