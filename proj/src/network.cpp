#include "sortnet/network.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <numeric>

#include <json.hpp>

namespace sortnet {

bool is_sorted_word(Word w, int n) {
  return w == sorted_word(n, std::popcount(w));
}

Layer canonical_layer(Layer layer, int n) {
  Word seen = 0;
  for (const auto& c : layer) {
    if (c.top < 1 || c.top > n || c.bottom < 1 || c.bottom > n)
      throw std::invalid_argument("comparator endpoint out of range 1.." + std::to_string(n));
    if (c.top == c.bottom)
      throw std::invalid_argument("degenerate comparator on channel " + std::to_string(c.top));
    const Word bits = (Word{1} << (c.top - 1)) | (Word{1} << (c.bottom - 1));
    if (seen & bits)
      throw std::invalid_argument("comparators in a layer must be disjoint");
    seen |= bits;
  }
  std::sort(layer.begin(), layer.end(),
            [](const Comparator& a, const Comparator& b) { return a.low() < b.low(); });
  return layer;
}

ComparatorNetwork::ComparatorNetwork(int n, std::vector<Layer> layers) : n_(n) {
  if (n < 0 || n > kMaxChannels)
    throw std::invalid_argument("channel count must be in 0.." + std::to_string(kMaxChannels));
  layers_.reserve(layers.size());
  for (auto& l : layers) layers_.push_back(canonical_layer(std::move(l), n));
}

std::size_t ComparatorNetwork::size() const {
  std::size_t s = 0;
  for (const auto& l : layers_) s += l.size();
  return s;
}

bool ComparatorNetwork::is_standard() const {
  for (const auto& l : layers_)
    for (const auto& c : l)
      if (c.reversed()) return false;
  return true;
}

ComparatorNetwork ComparatorNetwork::prefix(int k) const {
  if (k < 0 || k > depth()) throw std::out_of_range("prefix length out of range");
  return ComparatorNetwork(n_, {layers_.begin(), layers_.begin() + k});
}

ComparatorNetwork ComparatorNetwork::suffix_from(int k) const {
  if (k < 0 || k > depth()) throw std::out_of_range("suffix start out of range");
  return ComparatorNetwork(n_, {layers_.begin() + k, layers_.end()});
}

ComparatorNetwork ComparatorNetwork::then(const ComparatorNetwork& other) const {
  if (other.n_ != n_) throw std::invalid_argument("channel counts differ");
  auto layers = layers_;
  layers.insert(layers.end(), other.layers_.begin(), other.layers_.end());
  return ComparatorNetwork(n_, std::move(layers));
}

ComparatorNetwork ComparatorNetwork::with_layer(Layer layer) const {
  auto layers = layers_;
  layers.push_back(std::move(layer));
  return ComparatorNetwork(n_, std::move(layers));
}

Word ComparatorNetwork::used_channels(int k) const {
  Word used = 0;
  for (const auto& c : layer(k)) used |= (Word{1} << (c.top - 1)) | (Word{1} << (c.bottom - 1));
  return used;
}

std::string format_word(Word w, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if ((w >> i) & 1) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

BitWord parse_word(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxChannels))
    throw std::invalid_argument("word longer than " + std::to_string(kMaxChannels) + " bits");
  BitWord b{static_cast<int>(text.size()), 0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      b.bits |= Word{1} << i;
    else if (text[i] != '0')
      throw std::invalid_argument("word must consist of 0 and 1 characters");
  }
  return b;
}

bool OutputSet::contains(Word w) const { return std::binary_search(words.begin(), words.end(), w); }

std::size_t OutputSet::sorted_count() const {
  return static_cast<std::size_t>(
      std::count_if(words.begin(), words.end(), [this](Word w) { return is_sorted_word(w, n); }));
}

ChannelPermutation::ChannelPermutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> hit(images_.size() + 1, false);
  for (int v : images_) {
    if (v < 1 || v > static_cast<int>(images_.size()) || hit[static_cast<std::size_t>(v)])
      throw std::invalid_argument("channel permutation is not a bijection");
    hit[static_cast<std::size_t>(v)] = true;
  }
}

ChannelPermutation ChannelPermutation::identity(int n) {
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 1);
  return ChannelPermutation(std::move(images));
}

ChannelPermutation ChannelPermutation::transposition(int n, int a, int b) {
  auto p = identity(n);
  std::swap(p.images_.at(static_cast<std::size_t>(a - 1)), p.images_.at(static_cast<std::size_t>(b - 1)));
  return p;
}

Word ChannelPermutation::apply(Word w) const {
  Word out = 0;
  for (std::size_t i = 0; i < images_.size(); ++i)
    out |= ((w >> i) & 1) << (images_[i] - 1);
  return out;
}

ChannelPermutation ChannelPermutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    inv[static_cast<std::size_t>(images_[i] - 1)] = static_cast<int>(i) + 1;
  return ChannelPermutation(std::move(inv));
}

ChannelPermutation ChannelPermutation::after(const ChannelPermutation& first) const {
  if (first.size() != size()) throw std::invalid_argument("permutation sizes differ");
  std::vector<int> out(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) out[i] = (*this)(first.images_[i]);
  return ChannelPermutation(std::move(out));
}

bool ChannelPermutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i) + 1) return false;
  return true;
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string format_network(const ComparatorNetwork& net) {
  std::string out;
  for (int k = 0; k < net.depth(); ++k) {
    if (k > 0) out += "; ";
    bool first = true;
    for (const auto& c : net.layer(k)) {
      if (!first) out += ' ';
      first = false;
      out += std::to_string(c.top) + ":" + std::to_string(c.bottom);
    }
  }
  return out;
}

namespace {

// Tracks line/column while scanning network text.
class Scanner {
 public:
  Scanner(std::string_view text, int line) : text_(text), line_(line) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  int number() {
    if (done() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected channel number");
    long v = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > 1000) fail("channel number too large");
      advance();
    }
    return static_cast<int>(v);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, column_); }

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int column_ = 1;
};

ComparatorNetwork parse_layers(std::string_view text, std::optional<int> n, int first_line) {
  Scanner sc(text, first_line);
  std::vector<Layer> layers;
  Layer current;
  int max_channel = 0;
  std::vector<std::pair<int, int>> where;  // position of first comparator per layer
  int layer_line = first_line;
  int layer_col = 1;
  sc.skip_space();
  if (sc.done()) {
    if (n) return ComparatorNetwork(*n);
    sc.fail("empty network text");
  }
  while (true) {
    sc.skip_space();
    if (sc.done()) break;
    if (sc.peek() == ';') {
      layers.push_back(std::move(current));
      where.emplace_back(layer_line, layer_col);
      current.clear();
      sc.advance();
      continue;
    }
    if (current.empty()) {
      layer_line = sc.line();
      layer_col = sc.column();
    }
    const int a = sc.number();
    if (sc.done() || sc.peek() != ':') sc.fail("expected ':' after channel");
    sc.advance();
    const int b = sc.number();
    if (a == 0 || b == 0) sc.fail("channels are 1-based");
    if (a == b) sc.fail("comparator endpoints must differ");
    max_channel = std::max({max_channel, a, b});
    current.push_back({a, b});
  }
  layers.push_back(std::move(current));
  where.emplace_back(layer_line, layer_col);
  const int channels = n.value_or(max_channel);
  if (max_channel > channels)
    throw ParseError("channel " + std::to_string(max_channel) + " exceeds n=" + std::to_string(channels),
                     first_line, 1);
  for (std::size_t k = 0; k < layers.size(); ++k) {
    try {
      layers[k] = canonical_layer(std::move(layers[k]), channels);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), where[k].first, where[k].second);
    }
  }
  return ComparatorNetwork(channels, std::move(layers));
}

}  // namespace

ComparatorNetwork parse_network(std::string_view text, std::optional<int> n) {
  return parse_layers(text, n, 1);
}

ComparatorNetwork read_network(std::string_view contents) {
  std::size_t i = 0;
  int line = 1;
  // Skip leading whitespace and '#' comment lines.
  while (i < contents.size()) {
    if (contents[i] == '#') {
      while (i < contents.size() && contents[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(contents[i]))) {
      if (contents[i] == '\n') ++line;
      ++i;
    } else {
      break;
    }
  }
  if (i >= contents.size()) throw ParseError("empty network file", line, 1);
  if (contents[i] == '{') {
    try {
      return network_from_json(contents.substr(i));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), line, 1);
    }
  }
  std::optional<int> n;
  if (contents.compare(i, 2, "n=") == 0) {
    std::size_t j = i + 2;
    int v = 0;
    if (j >= contents.size() || !std::isdigit(static_cast<unsigned char>(contents[j])))
      throw ParseError("expected channel count after n=", line, 3);
    while (j < contents.size() && std::isdigit(static_cast<unsigned char>(contents[j]))) {
      v = v * 10 + (contents[j] - '0');
      if (v > kMaxChannels) throw ParseError("channel count too large", line, 3);
      ++j;
    }
    n = v;
    i = j;
  }
  // Strip trailing comment lines from the body.
  std::string body;
  body.reserve(contents.size() - i);
  bool in_comment = false;
  for (std::size_t j = i; j < contents.size(); ++j) {
    if (contents[j] == '#') in_comment = true;
    if (contents[j] == '\n') in_comment = false;
    body += in_comment ? ' ' : contents[j];
  }
  // An all-whitespace body after a header is the empty-depth network.
  if (n && body.find_first_not_of(" \t\r\n") == std::string::npos) return ComparatorNetwork(*n);
  return parse_layers(body, n, line);
}

std::string write_network(const ComparatorNetwork& net) {
  return "n=" + std::to_string(net.channels()) + "\n" + format_network(net) + "\n";
}

std::string to_json(const ComparatorNetwork& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& c : l) jl.push_back({c.top, c.bottom});
    layers.push_back(std::move(jl));
  }
  nlohmann::ordered_json j;
  j["n"] = net.channels();
  j["layers"] = std::move(layers);
  return j.dump();
}

ComparatorNetwork network_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  std::vector<Layer> layers;
  for (const auto& jl : j.at("layers")) {
    Layer l;
    for (const auto& jc : jl) l.push_back({jc.at(0).get<int>(), jc.at(1).get<int>()});
    layers.push_back(std::move(l));
  }
  return ComparatorNetwork(n, std::move(layers));
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace sortnet
