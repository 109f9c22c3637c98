#include "docsom/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "docsom/error.hpp"

namespace docsom {
namespace {

constexpr const char* kEmptyFill = "#f2f2f2";

struct Layout {
  double step = 0.0;  // pixels per unit of planar grid distance
  double width = 0.0;
  double height = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
};

Layout make_layout(const SomMap& map, const RenderSpec& spec) {
  const double r = spec.cell_radius;
  const double rows = static_cast<double>(map.rows());
  const double cols = static_cast<double>(map.cols());
  Layout l;
  if (map.topology() == Topology::kHexagonal) {
    const double half_width = std::sqrt(3.0) / 2.0 * r;
    l.step = std::sqrt(3.0) * r;
    l.origin_x = spec.margin + half_width;
    l.origin_y = spec.margin + r;
    l.width = 2 * spec.margin + cols * l.step + (map.rows() > 1 ? l.step / 2 : 0.0);
    l.height = 2 * spec.margin + 2 * r + (rows - 1) * 1.5 * r;
  } else {
    l.step = 2 * r;
    l.origin_x = spec.margin + r;
    l.origin_y = spec.margin + r;
    l.width = 2 * spec.margin + cols * l.step;
    l.height = 2 * spec.margin + rows * l.step;
  }
  return l;
}

std::pair<double, double> center(const SomMap& map, const Layout& l, std::size_t i) {
  const auto& p = map.position(i);
  return {l.origin_x + p.x * l.step, l.origin_y + p.y * l.step};
}

std::string gray(int level) { return fmt::format("#{0:02x}{0:02x}{0:02x}", level); }

void append_cell(std::string& out, const SomMap& map, const Layout& l, const RenderSpec& spec,
                 std::size_t i, const std::string& fill, const std::string& extra) {
  const auto [cx, cy] = center(map, l, i);
  const double r = spec.cell_radius;
  if (map.topology() == Topology::kHexagonal) {
    std::string points;
    for (int k = 0; k < 6; ++k) {
      const double angle = (30.0 + 60.0 * k) * std::numbers::pi / 180.0;
      if (k > 0) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", cx + r * std::cos(angle), cy + r * std::sin(angle));
    }
    out += fmt::format(
        "<polygon class=\"cell\" data-neuron=\"{}\"{} points=\"{}\" fill=\"{}\" stroke=\"#888888\" "
        "stroke-width=\"0.5\"/>\n",
        i, extra, points, fill);
  } else {
    out += fmt::format(
        "<rect class=\"cell\" data-neuron=\"{}\"{} x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
        "height=\"{:.2f}\" fill=\"{}\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n",
        i, extra, cx - r, cy - r, 2 * r, 2 * r, fill);
  }
}

std::string header(const Layout& l) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.2f}\" height=\"{1:.2f}\" "
      "viewBox=\"0 0 {0:.2f} {1:.2f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n",
      l.width, l.height);
}

double max_value(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

void check_umatrix(const UMatrix& u, const SomMap& map) {
  if (u.node_values.size() != map.neuron_count()) {
    throw Error(fmt::format("U-matrix has {} nodes, map has {} neurons", u.node_values.size(),
                            map.neuron_count()));
  }
}

}  // namespace

void RenderSpec::validate() const {
  if (!(cell_radius > 0.0)) throw Error("cell_radius must be > 0");
  if (!(margin >= 0.0)) throw Error("margin must be >= 0");
  if (!(max_marker_fraction > 0.0 && max_marker_fraction <= 1.0)) {
    throw Error("max_marker_fraction must lie in (0, 1]");
  }
}

int grayscale_level(double value, double max_value) {
  if (!(max_value > 0.0)) return 255;
  const double t = std::clamp(value / max_value, 0.0, 1.0);
  return static_cast<int>(std::lround(255.0 * (1.0 - t)));
}

double marker_radius(std::size_t hits, std::size_t max_hits, const RenderSpec& spec,
                     Topology topology) {
  if (hits == 0 || max_hits == 0) return 0.0;
  const double inner = topology == Topology::kHexagonal
                           ? std::sqrt(3.0) / 2.0 * spec.cell_radius
                           : spec.cell_radius;
  return spec.max_marker_fraction * inner * static_cast<double>(hits) /
         static_cast<double>(max_hits);
}

std::string render_umatrix(const UMatrix& u, const SomMap& map, const RenderSpec& spec) {
  spec.validate();
  check_umatrix(u, map);
  const Layout l = make_layout(map, spec);
  const double top = max_value(u.node_values);
  std::string out = header(l);
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    append_cell(out, map, l, spec, i, gray(grayscale_level(u.node_values[i], top)),
                fmt::format(" data-value=\"{:.6f}\"", u.node_values[i]));
  }
  out += "</svg>\n";
  return out;
}

std::string render_hits(const HitHistogram& hits, const SomMap& map, const RenderSpec& spec,
                        const UMatrix* shading) {
  spec.validate();
  if (hits.counts.size() != map.neuron_count()) {
    throw Error(fmt::format("hit histogram has {} neurons, map has {}", hits.counts.size(),
                            map.neuron_count()));
  }
  const bool shaded = spec.overlay && shading != nullptr;
  if (shaded) check_umatrix(*shading, map);
  const double top = shaded ? max_value(shading->node_values) : 0.0;

  const Layout l = make_layout(map, spec);
  std::string out = header(l);
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    append_cell(out, map, l, spec, i,
                shaded ? gray(grayscale_level(shading->node_values[i], top)) : kEmptyFill, "");
  }
  const std::size_t max_hits =
      hits.counts.empty() ? 0 : *std::max_element(hits.counts.begin(), hits.counts.end());
  const char* marker_fill = shaded ? "#d62728" : "#1f4e9c";
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    if (hits.counts[i] == 0) continue;
    const auto [cx, cy] = center(map, l, i);
    out += fmt::format(
        "<circle class=\"hit\" data-neuron=\"{}\" data-hits=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" "
        "r=\"{:.2f}\" fill=\"{}\"/>\n",
        i, hits.counts[i], cx, cy, marker_radius(hits.counts[i], max_hits, spec, map.topology()),
        marker_fill);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace docsom
