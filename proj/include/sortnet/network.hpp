#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sortnet {

/// Boolean vector packed into a machine word. Channel i (1-based) lives in
/// bit i-1, so "sorted" means all zero bits below all one bits.
using Word = std::uint64_t;

inline constexpr int kMaxChannels = 63;

/// Bits of the n low channels.
constexpr Word channel_mask(int n) { return n >= 64 ? ~Word{0} : (Word{1} << n) - 1; }

/// The sorted word on n channels with k ones.
constexpr Word sorted_word(int n, int k) {
  return k == 0 ? Word{0} : channel_mask(k) << (n - k);
}

bool is_sorted_word(Word w, int n);

/// A compare-exchange gate. The minimum is routed to `top` and the maximum to
/// `bottom`. top > bottom marks a generalized (reversed) comparator.
struct Comparator {
  int top = 0;
  int bottom = 0;

  constexpr bool reversed() const { return top > bottom; }
  constexpr int low() const { return top < bottom ? top : bottom; }
  constexpr int high() const { return top < bottom ? bottom : top; }
  constexpr bool touches(int c) const { return top == c || bottom == c; }

  friend constexpr auto operator<=>(const Comparator&, const Comparator&) = default;
};

/// Comparators in a layer are kept ordered by their lower endpoint.
using Layer = std::vector<Comparator>;

class ComparatorNetwork {
 public:
  ComparatorNetwork() = default;

  /// Throws std::invalid_argument when an endpoint is out of range, a
  /// comparator is degenerate, or two comparators of a layer share a channel.
  /// Empty layers are permitted.
  explicit ComparatorNetwork(int n, std::vector<Layer> layers = {});

  int channels() const { return n_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  std::size_t size() const;
  bool is_standard() const;

  const std::vector<Layer>& layers() const { return layers_; }
  const Layer& layer(int k) const { return layers_.at(static_cast<std::size_t>(k)); }

  /// First k layers.
  ComparatorNetwork prefix(int k) const;
  /// Layers k..depth-1.
  ComparatorNetwork suffix_from(int k) const;
  ComparatorNetwork then(const ComparatorNetwork& other) const;
  ComparatorNetwork with_layer(Layer layer) const;

  /// Channels touched by some comparator of layer k, as a bit set.
  Word used_channels(int k) const;

  friend bool operator==(const ComparatorNetwork&, const ComparatorNetwork&) = default;

 private:
  int n_ = 0;
  std::vector<Layer> layers_;
};

/// Canonical ordering of a layer; validates disjointness against n.
Layer canonical_layer(Layer layer, int n);

/// Length-carrying Boolean vector, used where the caller supplies the width.
struct BitWord {
  int n = 0;
  Word bits = 0;

  friend bool operator==(const BitWord&, const BitWord&) = default;
};

/// "0101..." with channel 1 first.
std::string format_word(Word w, int n);
BitWord parse_word(std::string_view text);

/// Deduplicated set of words in ascending numeric order.
struct OutputSet {
  int n = 0;
  std::vector<Word> words;

  std::size_t size() const { return words.size(); }
  bool contains(Word w) const;
  std::size_t sorted_count() const;

  friend bool operator==(const OutputSet&, const OutputSet&) = default;
};

class ChannelPermutation {
 public:
  ChannelPermutation() = default;
  /// images[c-1] is the image of channel c; throws unless a bijection on 1..n.
  explicit ChannelPermutation(std::vector<int> images);

  static ChannelPermutation identity(int n);
  static ChannelPermutation transposition(int n, int a, int b);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int channel) const { return images_.at(static_cast<std::size_t>(channel - 1)); }
  const std::vector<int>& images() const { return images_; }

  /// Moves the bit of channel c to channel pi(c).
  Word apply(Word w) const;
  ChannelPermutation inverse() const;
  /// (this ∘ first)(c) = this(first(c)).
  ChannelPermutation after(const ChannelPermutation& first) const;
  bool is_identity() const;

  friend bool operator==(const ChannelPermutation&, const ChannelPermutation&) = default;

 private:
  std::vector<int> images_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Canonical text: layers separated by "; ", comparators "i:j" separated by
/// single spaces. Reversed comparators print as "j:i" with j > i.
std::string format_network(const ComparatorNetwork& net);

/// Parses the canonical text. Newlines count as whitespace. When n is absent
/// the largest channel index is used; when it is given, empty text is the
/// depth-0 network.
ComparatorNetwork parse_network(std::string_view text, std::optional<int> n = std::nullopt);

/// File form: an optional "n=<N>" header line followed by the canonical text,
/// or a JSON object {"n":N,"layers":[[[i,j],...],...]}.
ComparatorNetwork read_network(std::string_view contents);
std::string write_network(const ComparatorNetwork& net);

std::string to_json(const ComparatorNetwork& net);
ComparatorNetwork network_from_json(std::string_view json);

/// Stable 64-bit FNV-1a digest, used for file metadata and journals.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace sortnet
