#pragma once

#include <string>
#include <vector>

#include "sortnet/network.hpp"

namespace sortnet {

struct RenderSpec {
  enum class Format { kText, kSvg };
  Format format = Format::kText;
  bool layer_separators = true;
  bool channel_labels = true;
};

/// Comparators of one layer packed into columns so that no two comparators
/// of a column overlap vertically. First fit, in canonical order.
std::vector<std::vector<Comparator>> layer_columns(const Layer& layer);

/// Knuth diagram, channel 1 on top. For a reversed comparator the endpoint
/// receiving the minimum is drawn differently.
std::string render(const ComparatorNetwork& net, const RenderSpec& spec = {});

}  // namespace sortnet
