#include "sortnet/encoder.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "sortnet/netcore.hpp"

namespace sortnet {

namespace {

constexpr int kTrue = std::numeric_limits<int>::max();
constexpr int kFalse = -kTrue;
// Lazily created auxiliaries get provisional ids from here and are renumbered
// after the v blocks once encoding is done.
constexpr int kAuxBase = 1 << 29;

struct FlagName {
  const char* name;
  bool EncodeOptions::*flag;
};

constexpr FlagName kFlags[] = {
    {"windows", &EncodeOptions::improved_windows},
    {"prune", &EncodeOptions::prune_inert_updates},
    {"updown", &EncodeOptions::one_up_down_clauses},
    {"necessary", &EncodeOptions::last_layer_necessary},
    {"implications", &EncodeOptions::last_layer_implications},
    {"cosat", &EncodeOptions::cosat_breaks},
    {"phi1-per-layer", &EncodeOptions::generalized_phi1_per_layer},
};

const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::kG: return "g";
    case VarKind::kUsed: return "used";
    case VarKind::kV: return "v";
    case VarKind::kOneDown: return "oneDown";
    case VarKind::kOneUp: return "oneUp";
  }
  return "?";
}

}  // namespace

EncodeOptions EncodeOptions::all() {
  EncodeOptions o;
  o.improved_windows = o.prune_inert_updates = o.one_up_down_clauses = true;
  o.last_layer_necessary = o.last_layer_implications = o.cosat_breaks = true;
  return o;
}

bool EncodeOptions::uses_last_two_layers() const {
  return last_layer_necessary || last_layer_implications || cosat_breaks;
}

EncodeOptions EncodeOptions::applicable_for(int layers) const {
  EncodeOptions o = *this;
  if (layers < 2) o.last_layer_necessary = o.last_layer_implications = o.cosat_breaks = false;
  return o;
}

std::string EncodeOptions::to_string() const {
  std::string out;
  for (const auto& f : kFlags)
    if (this->*f.flag) out += (out.empty() ? "" : ",") + std::string(f.name);
  return out.empty() ? "none" : out;
}

EncodeOptions EncodeOptions::parse(const std::string& text) {
  if (text == "all") return all();
  EncodeOptions o;
  if (text.empty() || text == "none") return o;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto it = std::find_if(std::begin(kFlags), std::end(kFlags), [&](const FlagName& f) { return item == f.name; });
    if (it == std::end(kFlags)) throw std::invalid_argument("unknown encoder option '" + item + "'");
    o.*(it->flag) = true;
  }
  return o;
}

std::vector<EncodeOptions> all_option_combinations() {
  constexpr int kCount = static_cast<int>(std::size(kFlags));
  std::vector<EncodeOptions> out;
  for (int mask = 0; mask < (1 << kCount); ++mask) {
    EncodeOptions o;
    for (int b = 0; b < kCount; ++b)
      if (mask >> b & 1) o.*(kFlags[b].flag) = true;
    out.push_back(o);
  }
  return out;
}

std::uint64_t VarRegistry::key(VarKind kind, int input, int k, int i, int j) {
  return (static_cast<std::uint64_t>(kind) << 60) | (static_cast<std::uint64_t>(input + 1) << 24) |
         (static_cast<std::uint64_t>(k) << 14) | (static_cast<std::uint64_t>(i) << 7) | static_cast<std::uint64_t>(j);
}

int VarRegistry::find(VarKind kind, int input, int k, int i, int j) const {
  auto it = index_.find(key(kind, input, k, i, j));
  return it == index_.end() ? 0 : it->second;
}

int VarRegistry::add(VarKind kind, int input, int k, int i, int j) {
  const auto kk = key(kind, input, k, i, j);
  if (index_.count(kk)) throw std::logic_error("variable registered twice");
  entries_.push_back({kind, input, k, i, j});
  const int var = static_cast<int>(entries_.size());
  index_.emplace(kk, var);
  return var;
}

std::string VarRegistry::to_json(const std::string& meta_json) const {
  nlohmann::json j;
  for (const char* name : {"g", "used", "v", "oneDown", "oneUp"}) j[name] = nlohmann::json::array();
  for (int var = 1; var <= size(); ++var) {
    const auto& e = entry(var);
    switch (e.kind) {
      case VarKind::kG:
      case VarKind::kOneDown:
      case VarKind::kOneUp: j[kind_name(e.kind)].push_back({e.k, e.i, e.j, var}); break;
      case VarKind::kUsed: j["used"].push_back({e.k, e.i, var}); break;
      case VarKind::kV: j["v"].push_back({e.input, e.k, e.i, var}); break;
    }
  }
  j["meta"] = nlohmann::json::parse(meta_json);
  return j.dump();
}

VarRegistry VarRegistry::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  struct Row {
    int var;
    Entry e;
  };
  std::vector<Row> rows;
  auto take = [&](const char* name, VarKind kind) {
    if (!j.contains(name)) return;
    for (const auto& r : j[name]) {
      Entry e{kind};
      if (kind == VarKind::kUsed) {
        e.k = r.at(0);
        e.i = r.at(1);
        rows.push_back({r.at(2).get<int>(), e});
      } else if (kind == VarKind::kV) {
        e.input = r.at(0);
        e.k = r.at(1);
        e.i = r.at(2);
        rows.push_back({r.at(3).get<int>(), e});
      } else {
        e.k = r.at(0);
        e.i = r.at(1);
        e.j = r.at(2);
        rows.push_back({r.at(3).get<int>(), e});
      }
    }
  };
  take("g", VarKind::kG);
  take("used", VarKind::kUsed);
  take("v", VarKind::kV);
  take("oneDown", VarKind::kOneDown);
  take("oneUp", VarKind::kOneUp);
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.var < b.var; });
  VarRegistry reg;
  for (const auto& r : rows) {
    if (reg.add(r.e.kind, r.e.input, r.e.k, r.e.i, r.e.j) != r.var)
      throw std::invalid_argument("registry numbering is not dense");
  }
  return reg;
}

void CnfInstance::add_clause(std::span<const int> lits) {
  for (int l : lits) {
    if (l == 0) throw std::invalid_argument("literal 0 in clause");
    lits_.push_back(l);
  }
  lits_.push_back(0);
  ++clause_count_;
}

std::vector<std::vector<int>> CnfInstance::clauses() const {
  std::vector<std::vector<int>> out;
  out.reserve(clause_count_);
  std::vector<int> cur;
  for (int l : lits_) {
    if (l == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(l);
    }
  }
  return out;
}

VarRegistry network_registry(int n, int layers) {
  VarRegistry reg;
  for (int k = 1; k <= layers; ++k)
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) reg.add(VarKind::kG, -1, k, i, j);
  for (int k = 1; k <= layers; ++k)
    for (int i = 1; i <= n; ++i) reg.add(VarKind::kUsed, -1, k, i);
  return reg;
}

std::vector<std::vector<int>> encode_last_layer_constraints(int n, int layers, const EncodeOptions& opts,
                                                            const VarRegistry& reg) {
  std::vector<std::vector<int>> out;
  const bool wants_two = opts.last_layer_necessary || opts.last_layer_implications || opts.cosat_breaks;
  if (wants_two && layers < 2) throw std::invalid_argument("last-layer constraints need at least two layers");
  const int d = layers;
  auto g = [&](int k, int i, int j) {
    const int v = reg.g(k, i, j);
    if (!v) throw std::logic_error("missing g variable");
    return v;
  };
  auto used = [&](int k, int i) {
    const int v = reg.used(k, i);
    if (!v) throw std::logic_error("missing used variable");
    return v;
  };

  if (opts.last_layer_necessary) {
    for (int i = 1; i <= n; ++i)
      for (int j = i + 2; j <= n; ++j) out.push_back({-g(d, i, j)});
    for (int i = 1; i <= n; ++i)
      for (int j = i + 4; j <= n; ++j) out.push_back({-g(d - 1, i, j)});
  }
  if (opts.last_layer_implications) {
    for (int i = 1; i + 3 <= n; ++i) {
      out.push_back({-g(d - 1, i, i + 3), g(d, i, i + 1)});
      out.push_back({-g(d - 1, i, i + 3), g(d, i + 2, i + 3)});
    }
    for (int i = 1; i + 2 <= n; ++i) out.push_back({-g(d - 1, i, i + 2), g(d, i, i + 1), g(d, i + 1, i + 2)});
  }
  if (opts.cosat_breaks) {
    for (int i = 1; i < n; ++i) out.push_back({used(d, i), used(d, i + 1)});
    for (int i = 1; i + 3 <= n; ++i) {
      const int a = -g(d, i, i + 1), b = -g(d, i + 2, i + 3);
      for (int p : {i, i + 1})
        for (int q : {i + 2, i + 3}) out.push_back({a, b, used(d - 1, p), used(d - 1, q)});
    }
    for (int i = 1; i + 2 <= n; ++i) {
      const int a = -g(d, i, i + 1), b = used(d, i + 2);
      for (int p : {i, i + 1}) out.push_back({a, b, used(d - 1, p), used(d - 1, i + 2)});
    }
    for (int i = 1; i + 2 <= n; ++i) {
      const int a = used(d, i), b = -g(d, i + 1, i + 2);
      for (int q : {i + 1, i + 2}) out.push_back({a, b, used(d - 1, i), used(d - 1, q)});
    }
    for (int i = 1; i + 2 <= n; ++i)
      out.push_back({-g(d, i, i + 1), used(d, i + 2), used(d - 1, i), used(d - 1, i + 1)});
    for (int i = 2; i + 1 <= n; ++i)
      out.push_back({-g(d, i, i + 1), used(d, i - 1), used(d - 1, i), used(d - 1, i + 1)});
  }
  if (opts.generalized_phi1_per_layer) {
    for (int l = 1; l < d; ++l)
      for (int i = 1; i <= n; ++i)
        for (int j = i + 2; j <= n; ++j) {
          std::vector<int> c{-g(l, i, j)};
          for (int k = l + 1; k <= d; ++k) {
            c.push_back(used(k, i));
            c.push_back(used(k, j));
          }
          out.push_back(std::move(c));
        }
  }
  return out;
}

class Encoder {
 public:
  Encoder(int n, int layers, const EncodeOptions& opts) : n_(n), d_(layers), opts_(opts) {
    reg_ = network_registry(n, layers);
  }

  Encoding run(const OutputSet& inputs, const std::string& prefix_hash) {
    emit_valid();
    emit_used();
    for (const auto& c : encode_last_layer_constraints(n_, d_, opts_, reg_)) clause(c);

    std::size_t encoded = 0;
    for (std::size_t idx = 0; idx < inputs.words.size(); ++idx) {
      const Word x = inputs.words[idx];
      if (is_sorted_word(x, n_)) continue;
      emit_input(static_cast<int>(idx), x);
      ++encoded;
    }
    finish_aux();

    Encoding out;
    out.cnf = std::move(cnf_);
    out.cnf.num_vars = reg_.size();
    out.cnf.meta = {n_, d_, encoded, prefix_hash, opts_.to_string(), ""};
    if (encoded == 0) out.cnf.meta.warning = "no unsorted inputs; instance is trivially satisfiable";
    out.registry = std::move(reg_);
    return out;
  }

 private:
  struct PendingAux {
    VarKind kind;
    int k, i, j;
  };

  int g(int k, int i, int j) const { return reg_.g(k, std::min(i, j), std::max(i, j)); }

  void clause(std::initializer_list<int> lits) { clause(std::span<const int>(lits.begin(), lits.size())); }
  void clause(std::span<const int> lits) {
    scratch_.clear();
    for (int l : lits) {
      if (l == kTrue) return;
      if (l == kFalse) continue;
      if (std::find(scratch_.begin(), scratch_.end(), -l) != scratch_.end()) return;
      if (std::find(scratch_.begin(), scratch_.end(), l) == scratch_.end()) scratch_.push_back(l);
    }
    cnf_.add_clause(scratch_);
  }
  void clause(const std::vector<int>& lits) { clause(std::span<const int>(lits)); }

  void emit_valid() {
    for (int k = 1; k <= d_; ++k)
      for (int i = 1; i <= n_; ++i)
        for (int j = 1; j <= n_; ++j)
          for (int l = j + 1; l <= n_; ++l)
            if (j != i && l != i) clause({-g(k, i, j), -g(k, i, l)});
  }

  void emit_used() {
    for (int k = 1; k <= d_; ++k)
      for (int i = 1; i <= n_; ++i) {
        std::vector<int> def{-reg_.used(k, i)};
        for (int j = 1; j <= n_; ++j) {
          if (j == i) continue;
          def.push_back(g(k, i, j));
          clause({reg_.used(k, i), -g(k, i, j)});
        }
        clause(def);
      }
  }

  // oneDown(k,i,j) <-> OR_{i<l<=j} g(k,i,l); oneUp(k,i,j) <-> OR_{i<=l<j} g(k,l,j).
  int aux(VarKind kind, int k, int i, int j) {
    if (j <= i) return kFalse;
    const auto key = std::make_tuple(static_cast<int>(kind), k, i, j);
    auto it = aux_ids_.find(key);
    if (it != aux_ids_.end()) return it->second;
    const int id = kAuxBase + static_cast<int>(pending_.size());
    pending_.push_back({kind, k, i, j});
    aux_ids_.emplace(key, id);
    std::vector<int> def{-id};
    for (int l = (kind == VarKind::kOneDown ? i + 1 : i); l <= (kind == VarKind::kOneDown ? j : j - 1); ++l) {
      const int gv = kind == VarKind::kOneDown ? g(k, i, l) : g(k, l, j);
      def.push_back(gv);
      clause({id, -gv});
    }
    clause(def);
    return id;
  }

  void emit_input(int idx, Word x) {
    const int n = n_;
    const int zeros = n - std::popcount(x);
    int lo = 1, hi = n;
    if (opts_.improved_windows) {
      const auto ws = window_stats(x, n);
      lo = ws.leading_zeros + 1;
      hi = n - ws.trailing_ones;
    }
    // values[k][i], 1-based channels.
    std::vector<std::vector<int>> val(static_cast<std::size_t>(d_) + 1, std::vector<int>(static_cast<std::size_t>(n) + 1));
    for (int k = 0; k <= d_; ++k)
      for (int i = 1; i <= n; ++i) {
        int& v = val[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        const bool x_i = (x >> (i - 1)) & 1;
        const bool y_i = i > zeros;
        if (opts_.improved_windows && (i < lo || i > hi)) {
          v = i < lo ? kFalse : kTrue;
        } else if (opts_.improved_windows && k == 0) {
          v = x_i ? kTrue : kFalse;
        } else if (opts_.improved_windows && k == d_) {
          v = y_i ? kTrue : kFalse;
        } else {
          v = reg_.add(VarKind::kV, idx, k, i);
          if (k == 0) clause({x_i ? v : -v});
          if (k == d_) clause({y_i ? v : -v});
        }
      }

    for (int k = 1; k <= d_; ++k) {
      const auto& before = val[static_cast<std::size_t>(k) - 1];
      const auto& after = val[static_cast<std::size_t>(k)];
      for (int i = lo; i <= hi; ++i) {
        const int w = after[static_cast<std::size_t>(i)];
        const int a = before[static_cast<std::size_t>(i)];
        for (int j = 1; j <= n; ++j) {
          if (j == i) continue;
          if (opts_.prune_inert_updates && (j < lo || j > hi)) continue;
          const int gv = g(k, i, j);
          const int b = before[static_cast<std::size_t>(j)];
          if (j < i) {  // i receives the maximum
            clause({-gv, -w, b, a});
            clause({-gv, w, -b});
            clause({-gv, w, -a});
          } else {  // i receives the minimum
            clause({-gv, -w, a});
            clause({-gv, -w, b});
            clause({-gv, w, -a, -b});
          }
        }
        guard_.clear();
        if (!opts_.prune_inert_updates) {
          guard_.push_back(reg_.used(k, i));
        } else if (opts_.one_up_down_clauses) {
          guard_.push_back(aux(VarKind::kOneUp, k, lo, i));
          guard_.push_back(aux(VarKind::kOneDown, k, i, hi));
        } else {
          for (int j = lo; j <= hi; ++j)
            if (j != i) guard_.push_back(g(k, i, j));
        }
        auto with_guard = [&](std::initializer_list<int> tail) {
          std::vector<int> c(guard_);
          c.insert(c.end(), tail);
          clause(c);
        };
        with_guard({-w, a});
        with_guard({w, -a});
        if (opts_.one_up_down_clauses) {
          clause({-a, aux(VarKind::kOneDown, k, i, hi), w});
          clause({a, aux(VarKind::kOneUp, k, lo, i), -w});
        }
      }
    }
  }

  void finish_aux() {
    const int base = reg_.size();
    for (const auto& p : pending_) reg_.add(p.kind, -1, p.k, p.i, p.j);
    for (int& l : cnf_.lits_) {
      if (l >= kAuxBase) l = l - kAuxBase + base + 1;
      else if (l <= -kAuxBase) l = l + kAuxBase - base - 1;
    }
  }

  int n_;
  int d_;
  EncodeOptions opts_;
  VarRegistry reg_;
  CnfInstance cnf_;
  std::vector<int> scratch_;
  std::vector<int> guard_;
  std::vector<PendingAux> pending_;
  std::map<std::tuple<int, int, int, int>, int> aux_ids_;
};

Encoding encode(int n, int layers, const OutputSet& inputs, const EncodeOptions& opts, const std::string& prefix_hash) {
  if (n < 1 || n > kMaxChannels) throw std::invalid_argument("n out of range");
  if (layers < 1) throw std::invalid_argument("need at least one layer to encode");
  if (inputs.n != n) throw std::invalid_argument("input width does not match n");
  return Encoder(n, layers, opts).run(inputs, prefix_hash);
}

void write_dimacs(std::ostream& out, const CnfInstance& cnf, const std::string& registry_hash) {
  out << "c sortnet n=" << cnf.meta.n << " layers=" << cnf.meta.layers << " inputs=" << cnf.meta.inputs
      << " options=" << cnf.meta.options << "\n";
  if (!cnf.meta.prefix_hash.empty()) out << "c prefix " << cnf.meta.prefix_hash << "\n";
  if (!registry_hash.empty()) out << "c registry " << registry_hash << "\n";
  if (!cnf.meta.warning.empty()) out << "c warning " << cnf.meta.warning << "\n";
  out << "p cnf " << cnf.num_vars << " " << cnf.num_clauses() << "\n";
  std::string line;
  for (int l : cnf.flat()) {
    line += std::to_string(l);
    if (l == 0) {
      line += '\n';
      out << line;
      line.clear();
    } else {
      line += ' ';
    }
  }
}

std::string emit_dimacs(const CnfInstance& cnf, const std::string& registry_hash) {
  std::ostringstream out;
  write_dimacs(out, cnf, registry_hash);
  return out.str();
}

ComparatorNetwork decode_model(const Assignment& model, const VarRegistry& registry, int n, int layers) {
  std::vector<Layer> result(static_cast<std::size_t>(layers));
  for (int k = 1; k <= layers; ++k) {
    Word seen = 0;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) {
        const int var = registry.g(k, i, j);
        if (!var) throw std::runtime_error("registry lacks g variable");
        const signed char value = static_cast<std::size_t>(var) < model.size() ? model[static_cast<std::size_t>(var)] : 0;
        if (value == 0) throw std::runtime_error("model leaves a g variable unassigned");
        if (value < 0) continue;
        const Word mask = (Word{1} << (i - 1)) | (Word{1} << (j - 1));
        if (seen & mask)
          throw std::runtime_error("model places overlapping comparators in layer " + std::to_string(k));
        seen |= mask;
        result[static_cast<std::size_t>(k) - 1].push_back({i, j});
      }
  }
  return ComparatorNetwork(n, std::move(result));
}

}  // namespace sortnet
