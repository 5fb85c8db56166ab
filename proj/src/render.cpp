#include "sortnet/render.hpp"

#include <algorithm>
#include <sstream>

namespace sortnet {

std::vector<std::vector<Comparator>> layer_columns(const Layer& layer) {
  std::vector<std::vector<Comparator>> cols;
  for (const auto& c : layer) {
    auto fits = [&](const std::vector<Comparator>& col) {
      return std::none_of(col.begin(), col.end(),
                          [&](const Comparator& o) { return !(o.high() < c.low() || c.high() < o.low()); });
    };
    auto it = std::find_if(cols.begin(), cols.end(), fits);
    if (it == cols.end()) cols.emplace_back().push_back(c);
    else it->push_back(c);
  }
  return cols;
}

namespace {

std::string render_text(const ComparatorNetwork& net, const RenderSpec& spec) {
  const int n = net.channels();
  const int rows = n == 0 ? 0 : 2 * n - 1;
  const int label_width = spec.channel_labels ? static_cast<int>(std::to_string(n).size()) + 1 : 0;
  std::vector<std::string> grid(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    auto& line = grid[static_cast<std::size_t>(r)];
    if (spec.channel_labels) {
      std::string label = r % 2 == 0 ? std::to_string(r / 2 + 1) : "";
      line = std::string(static_cast<std::size_t>(label_width - 1) - label.size(), ' ') + label + " ";
    }
    line += r % 2 == 0 ? "-" : " ";
  }
  auto push = [&](auto cell) {
    for (int r = 0; r < rows; ++r) grid[static_cast<std::size_t>(r)] += cell(r);
  };
  for (int k = 0; k < net.depth(); ++k) {
    if (k > 0 && spec.layer_separators) push([](int r) { return r % 2 == 0 ? std::string("-:-") : std::string(" : "); });
    const auto cols = layer_columns(net.layer(k));
    if (cols.empty()) push([](int r) { return r % 2 == 0 ? std::string("---") : std::string("   "); });
    for (const auto& col : cols) {
      push([&](int r) {
        for (const auto& c : col) {
          const int top = 2 * (c.low() - 1), bottom = 2 * (c.high() - 1);
          if (r == top || r == bottom) {
            const bool min_end = (r / 2 + 1) == c.top;
            return std::string("-") + (c.reversed() && min_end ? '*' : 'o') + "-";
          }
          if (r > top && r < bottom) return r % 2 == 0 ? std::string("-|-") : std::string(" | ");
        }
        return r % 2 == 0 ? std::string("---") : std::string("   ");
      });
    }
  }
  push([](int r) { return r % 2 == 0 ? std::string("-") : std::string(" "); });
  std::string out;
  for (auto& line : grid) {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string render_svg(const ComparatorNetwork& net, const RenderSpec& spec) {
  constexpr int kRow = 20, kCol = 16, kGap = 12, kMargin = 10;
  const int n = net.channels();
  const int left = kMargin + (spec.channel_labels ? 20 : 0);

  std::vector<std::vector<std::vector<Comparator>>> layers;
  for (int k = 0; k < net.depth(); ++k) {
    auto cols = layer_columns(net.layer(k));
    if (cols.empty()) cols.emplace_back();
    layers.push_back(std::move(cols));
  }
  int x = left + kGap;
  std::vector<std::vector<int>> col_x;
  std::vector<int> separators;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (k > 0) {
      separators.push_back(x + kGap / 2 - kCol / 2);
      x += kGap;
    }
    auto& xs = col_x.emplace_back();
    for (std::size_t c = 0; c < layers[k].size(); ++c) {
      xs.push_back(x);
      x += kCol;
    }
  }
  const int width = x + kGap + kMargin;
  const int height = 2 * kMargin + std::max(0, n - 1) * kRow;
  auto y_of = [&](int ch) { return kMargin + (ch - 1) * kRow; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  s << "<g stroke=\"black\" stroke-width=\"1\">\n";
  for (int c = 1; c <= n; ++c)
    s << "<line x1=\"" << left << "\" y1=\"" << y_of(c) << "\" x2=\"" << width - kMargin << "\" y2=\"" << y_of(c)
      << "\"/>\n";
  s << "</g>\n";
  if (spec.channel_labels) {
    s << "<g font-family=\"monospace\" font-size=\"10\" text-anchor=\"end\">\n";
    for (int c = 1; c <= n; ++c) s << "<text x=\"" << left - 4 << "\" y=\"" << y_of(c) + 3 << "\">" << c << "</text>\n";
    s << "</g>\n";
  }
  if (spec.layer_separators && !separators.empty()) {
    s << "<g stroke=\"gray\" stroke-dasharray=\"3,3\">\n";
    for (int sx : separators)
      s << "<line x1=\"" << sx << "\" y1=\"" << kMargin / 2 << "\" x2=\"" << sx << "\" y2=\"" << height - kMargin / 2
        << "\"/>\n";
    s << "</g>\n";
  }
  s << "<g stroke=\"black\" stroke-width=\"2\" fill=\"black\">\n";
  for (std::size_t k = 0; k < layers.size(); ++k)
    for (std::size_t c = 0; c < layers[k].size(); ++c)
      for (const auto& cmp : layers[k][c]) {
        const int cx = col_x[k][c];
        s << "<line x1=\"" << cx << "\" y1=\"" << y_of(cmp.low()) << "\" x2=\"" << cx << "\" y2=\"" << y_of(cmp.high())
          << "\"/>\n";
        for (int ch : {cmp.top, cmp.bottom}) {
          const bool hollow = cmp.reversed() && ch == cmp.top;
          s << "<circle cx=\"" << cx << "\" cy=\"" << y_of(ch) << "\" r=\"3\"" << (hollow ? " fill=\"white\"" : "")
            << "/>\n";
        }
      }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace

std::string render(const ComparatorNetwork& net, const RenderSpec& spec) {
  return spec.format == RenderSpec::Format::kSvg ? render_svg(net, spec) : render_text(net, spec);
}

}  // namespace sortnet
