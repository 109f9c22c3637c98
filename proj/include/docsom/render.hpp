#pragma once

// SVG renderings of a trained map: U-matrix (grayscale, lighter = closer
// prototypes) and hit histogram (marker size proportional to hit count).

#include <optional>
#include <string>

#include "docsom/som.hpp"

namespace docsom {

struct RenderSpec {
  double cell_radius = 18.0;          // pixels, hexagon circumradius or half a square side
  double margin = 4.0;                // pixels around the grid
  double max_marker_fraction = 0.8;   // largest marker relative to the cell's inner radius
  bool overlay = false;               // draw hit markers over U-matrix shading

  void validate() const;
};

// 0 -> 255 (white), max_value -> 0 (black). All-zero input maps to white.
int grayscale_level(double value, double max_value);
double marker_radius(std::size_t hits, std::size_t max_hits, const RenderSpec& spec,
                     Topology topology);

std::string render_umatrix(const UMatrix& u, const SomMap& map, const RenderSpec& spec);
// `shading` is only used when spec.overlay is set.
std::string render_hits(const HitHistogram& hits, const SomMap& map, const RenderSpec& spec,
                        const UMatrix* shading = nullptr);

}  // namespace docsom
