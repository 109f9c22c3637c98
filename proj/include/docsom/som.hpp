#pragma once

// Online Kohonen self-organizing map: random init inside the data bounds,
// uniform sampling, Euclidean BMU, Gaussian neighborhood over planar grid
// positions, linearly decaying learning rate and radius.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "docsom/matrix.hpp"

namespace docsom {

enum class Topology { kHexagonal, kRectangular };

Topology parse_topology(std::string_view name);
std::string_view topology_name(Topology topology);

struct SomConfig {
  std::size_t rows = 10;
  std::size_t cols = 10;
  std::size_t iterations = 50'000;
  double eta0 = 0.5;
  double sigma_min = 0.5;
  Topology topology = Topology::kHexagonal;
  std::uint64_t seed = 1;
  // Scale input vectors to unit length before training and projection.
  bool normalize_inputs = false;

  void validate() const;
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;
};

// Hexagonal layout: odd rows shifted +0.5 in x, rows sqrt(3)/2 apart, so every
// immediate neighbor sits at distance 1. Rectangular layout: integer grid.
std::vector<GridPoint> grid_positions(std::size_t rows, std::size_t cols, Topology topology);
// Immediate-neighbor pairs (i < j), each listed once, ordered by (i, j).
std::vector<std::pair<std::size_t, std::size_t>> grid_edges(std::size_t rows, std::size_t cols,
                                                            Topology topology);

class SomMap {
 public:
  SomMap() = default;
  // prototypes: one row per neuron, neuron index = row * cols + col.
  SomMap(std::size_t rows, std::size_t cols, Topology topology, DenseMatrix prototypes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Topology topology() const { return topology_; }
  std::size_t neuron_count() const { return prototypes_.rows(); }
  std::size_t dim() const { return prototypes_.cols(); }

  std::span<const double> prototype(std::size_t i) const { return prototypes_.row(i); }
  std::span<double> prototype(std::size_t i) { return prototypes_.row(i); }
  const DenseMatrix& prototypes() const { return prototypes_; }
  const GridPoint& position(std::size_t i) const { return positions_.at(i); }
  const std::vector<GridPoint>& positions() const { return positions_; }

  double grid_distance_squared(std::size_t a, std::size_t b) const;

  bool operator==(const SomMap& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Topology topology_ = Topology::kHexagonal;
  DenseMatrix prototypes_;
  std::vector<GridPoint> positions_;
};

struct DimensionBounds {
  double min = 0.0;
  double max = 0.0;
};

std::vector<DimensionBounds> data_bounds(const DenseMatrix& data);
void normalize_rows(DenseMatrix& data);

// Each component uniform in its dimension's [min, max]; fully seeded.
SomMap init_map(const SomConfig& cfg, std::size_t dim, std::span<const DimensionBounds> bounds);

// Nearest prototype; ties go to the smallest index.
std::size_t find_bmu(const SomMap& map, std::span<const double> x);

double neighborhood(const SomMap& map, std::size_t bmu, std::size_t i, double sigma);

// Half the map diagonal: sqrt(rows^2 + cols^2) / 2.
double initial_radius(const SomConfig& cfg);
// Schedules at iteration n (0-based): eta0 (1 - n/n_max) and
// max(sigma0 (1 - n/n_max), sigma_min).
double learning_rate(const SomConfig& cfg, std::size_t n);
double neighborhood_radius(const SomConfig& cfg, std::size_t n);

// Moves every prototype toward x by eta * h(bmu, i).
void update_step(SomMap& map, std::span<const double> x, std::size_t bmu, double eta,
                 double sigma);

// Mean distance from each row to its BMU prototype.
double quantization_error(const SomMap& map, const DenseMatrix& data, unsigned threads = 1);

struct QuantizationSample {
  std::size_t iteration = 0;  // updates applied so far
  double error = 0.0;
};

struct TrainResult {
  SomMap map;
  std::vector<QuantizationSample> trace;  // first entry is the untrained map
};

TrainResult train(SomMap map, const DenseMatrix& data, const SomConfig& cfg,
                  unsigned threads = 1);

struct UMatrixEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
};

struct UMatrix {
  std::vector<UMatrixEdge> edges;
  std::vector<double> node_values;  // mean of incident edge distances
};

UMatrix compute_umatrix(const SomMap& map);

struct HitHistogram {
  std::vector<std::size_t> counts;
  std::map<std::size_t, std::vector<std::string>> members;  // only when labels are given

  std::size_t total() const;
};

std::vector<std::size_t> project(const SomMap& map, const DenseMatrix& data, unsigned threads = 1);
HitHistogram compute_hits(const SomMap& map, const DenseMatrix& data,
                          const std::vector<std::string>* labels = nullptr,
                          unsigned threads = 1);

// map.json / umatrix.json / hits.json
struct MapFile {
  SomMap map;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
};

std::string format_map_json(const SomMap& map, std::uint64_t seed, std::size_t iterations);
MapFile parse_map_json(std::string_view json);
std::string format_umatrix_json(const UMatrix& u);
UMatrix parse_umatrix_json(std::string_view json);
std::string format_hits_json(const HitHistogram& hits);
HitHistogram parse_hits_json(std::string_view json);

}  // namespace docsom
