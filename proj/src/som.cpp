#include "docsom/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "docsom/error.hpp"
#include "docsom/kernels.hpp"
#include "docsom/parallel.hpp"

namespace docsom {
namespace {

using nlohmann::json;

const double kRowSpacingHex = std::sqrt(3.0) / 2.0;

// Portable uniform draws; std distributions are implementation-defined.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % bound);
}

void check_dim(const SomMap& map, std::size_t len) {
  if (len != map.dim()) {
    throw Error(fmt::format("input vector has length {}, map dimension is {}", len, map.dim()));
  }
}

template <typename T>
T require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(fmt::format("missing field '{}'", key));
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(fmt::format("bad field '{}': {}", key, e.what()));
  }
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace

Topology parse_topology(std::string_view name) {
  if (name == "hexagonal" || name == "hex") return Topology::kHexagonal;
  if (name == "rectangular" || name == "rect") return Topology::kRectangular;
  throw Error(fmt::format("unknown topology '{}'", name));
}

std::string_view topology_name(Topology topology) {
  return topology == Topology::kHexagonal ? "hexagonal" : "rectangular";
}

void SomConfig::validate() const {
  if (rows < 2 || cols < 2) throw Error("map must be at least 2x2");
  if (iterations < 1) throw Error("iterations must be >= 1");
  if (!(eta0 > 0.0 && eta0 <= 1.0)) throw Error("eta0 must lie in (0, 1]");
  if (!(sigma_min > 0.0)) throw Error("sigma_min must be > 0");
}

std::vector<GridPoint> grid_positions(std::size_t rows, std::size_t cols, Topology topology) {
  std::vector<GridPoint> out;
  out.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (topology == Topology::kHexagonal) {
        out.push_back({static_cast<double>(c) + (r % 2 == 1 ? 0.5 : 0.0),
                       static_cast<double>(r) * kRowSpacingHex});
      } else {
        out.push_back({static_cast<double>(c), static_cast<double>(r)});
      }
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> grid_edges(std::size_t rows, std::size_t cols,
                                                            Topology topology) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  auto id = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t self = id(r, c);
      std::vector<std::size_t> later;
      if (c + 1 < cols) later.push_back(id(r, c + 1));
      if (r + 1 < rows) {
        if (topology == Topology::kRectangular) {
          later.push_back(id(r + 1, c));
        } else if (r % 2 == 0) {
          if (c > 0) later.push_back(id(r + 1, c - 1));
          later.push_back(id(r + 1, c));
        } else {
          later.push_back(id(r + 1, c));
          if (c + 1 < cols) later.push_back(id(r + 1, c + 1));
        }
      }
      std::sort(later.begin(), later.end());
      for (std::size_t j : later) edges.emplace_back(self, j);
    }
  }
  return edges;
}

SomMap::SomMap(std::size_t rows, std::size_t cols, Topology topology, DenseMatrix prototypes)
    : rows_(rows), cols_(cols), topology_(topology), prototypes_(std::move(prototypes)) {
  if (rows_ == 0 || cols_ == 0) throw Error("map needs at least one row and column");
  if (prototypes_.rows() != rows_ * cols_) {
    throw Error(fmt::format("map {}x{} needs {} prototypes, got {}", rows_, cols_, rows_ * cols_,
                            prototypes_.rows()));
  }
  positions_ = grid_positions(rows_, cols_, topology_);
}

double SomMap::grid_distance_squared(std::size_t a, std::size_t b) const {
  const double dx = positions_.at(a).x - positions_.at(b).x;
  const double dy = positions_.at(a).y - positions_.at(b).y;
  return dx * dx + dy * dy;
}

bool SomMap::operator==(const SomMap& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && topology_ == other.topology_ &&
         prototypes_ == other.prototypes_;
}

std::vector<DimensionBounds> data_bounds(const DenseMatrix& data) {
  if (data.empty()) throw Error("data_bounds: no data");
  std::vector<DimensionBounds> bounds(data.cols(),
                                      {std::numeric_limits<double>::infinity(),
                                       -std::numeric_limits<double>::infinity()});
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t k = 0; k < data.cols(); ++k) {
      bounds[k].min = std::min(bounds[k].min, data(r, k));
      bounds[k].max = std::max(bounds[k].max, data(r, k));
    }
  }
  return bounds;
}

void normalize_rows(DenseMatrix& data) {
  for (std::size_t r = 0; r < data.rows(); ++r) {
    auto row = data.row(r);
    const double norm = std::sqrt(kernels::dot(row, row));
    if (norm == 0.0) continue;
    for (double& v : row) v /= norm;
  }
}

SomMap init_map(const SomConfig& cfg, std::size_t dim, std::span<const DimensionBounds> bounds) {
  if (dim < 1) throw Error("init_map: dimension must be >= 1");
  if (bounds.size() != dim) {
    throw Error(fmt::format("init_map: {} bounds for dimension {}", bounds.size(), dim));
  }
  for (std::size_t k = 0; k < dim; ++k) {
    if (!std::isfinite(bounds[k].min) || !std::isfinite(bounds[k].max) ||
        bounds[k].min > bounds[k].max) {
      throw Error(fmt::format("init_map: invalid bounds for dimension {}", k));
    }
  }
  std::mt19937_64 rng(cfg.seed);
  DenseMatrix prototypes(cfg.rows * cfg.cols, dim);
  for (std::size_t i = 0; i < prototypes.rows(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      prototypes(i, k) = bounds[k].min + uniform01(rng) * (bounds[k].max - bounds[k].min);
    }
  }
  return SomMap(cfg.rows, cfg.cols, cfg.topology, std::move(prototypes));
}

std::size_t find_bmu(const SomMap& map, std::span<const double> x) {
  check_dim(map, x.size());
  const auto& k = kernels::active();
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    const double d2 = k.squared_distance(map.prototype(i).data(), x.data(), x.size());
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double neighborhood(const SomMap& map, std::size_t bmu, std::size_t i, double sigma) {
  if (!(sigma > 0.0)) throw Error("neighborhood radius must be > 0");
  return std::exp(-map.grid_distance_squared(bmu, i) / (2.0 * sigma * sigma));
}

double initial_radius(const SomConfig& cfg) {
  const double a = static_cast<double>(cfg.rows);
  const double b = static_cast<double>(cfg.cols);
  return std::sqrt(a * a + b * b) / 2.0;
}

double learning_rate(const SomConfig& cfg, std::size_t n) {
  return cfg.eta0 * (1.0 - static_cast<double>(n) / static_cast<double>(cfg.iterations));
}

double neighborhood_radius(const SomConfig& cfg, std::size_t n) {
  const double decay = 1.0 - static_cast<double>(n) / static_cast<double>(cfg.iterations);
  return std::max(initial_radius(cfg) * decay, cfg.sigma_min);
}

void update_step(SomMap& map, std::span<const double> x, std::size_t bmu, double eta,
                 double sigma) {
  check_dim(map, x.size());
  if (bmu >= map.neuron_count()) throw Error("update_step: BMU index out of range");
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    kernels::move_toward(map.prototype(i), x, eta * neighborhood(map, bmu, i, sigma));
  }
}

double quantization_error(const SomMap& map, const DenseMatrix& data, unsigned threads) {
  if (data.empty()) throw Error("quantization_error: no data");
  std::vector<double> dist(data.rows());
  parallel_for(data.rows(), threads, [&](std::size_t r) {
    const auto x = data.row(r);
    dist[r] = std::sqrt(kernels::squared_distance(map.prototype(find_bmu(map, x)), x));
  });
  double sum = 0.0;
  for (double d : dist) sum += d;
  return sum / static_cast<double>(data.rows());
}

TrainResult train(SomMap map, const DenseMatrix& data, const SomConfig& cfg, unsigned threads) {
  cfg.validate();
  if (data.empty()) throw Error("train: no input vectors");
  check_dim(map, data.cols());

  const std::size_t neurons = map.neuron_count();
  std::vector<double> grid_d2(neurons * neurons);
  for (std::size_t a = 0; a < neurons; ++a) {
    for (std::size_t b = 0; b < neurons; ++b) grid_d2[a * neurons + b] = map.grid_distance_squared(a, b);
  }

  // Sampling stream is separate from the initialization stream.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t interval = std::max<std::size_t>(1, cfg.iterations / 100);
  const auto& k = kernels::active();

  TrainResult result;
  result.trace.push_back({0, quantization_error(map, data, threads)});
  for (std::size_t n = 0; n < cfg.iterations; ++n) {
    const auto x = data.row(uniform_index(rng, data.rows()));
    const std::size_t bmu = find_bmu(map, x);
    const double eta = learning_rate(cfg, n);
    const double sigma = neighborhood_radius(cfg, n);
    const double denom = 2.0 * sigma * sigma;
    const double* d2 = grid_d2.data() + bmu * neurons;
    for (std::size_t i = 0; i < neurons; ++i) {
      k.move_toward(map.prototype(i).data(), x.data(), eta * std::exp(-d2[i] / denom), x.size());
    }
    if ((n + 1) % interval == 0 || n + 1 == cfg.iterations) {
      if (result.trace.back().iteration != n + 1) {
        result.trace.push_back({n + 1, quantization_error(map, data, threads)});
      }
    }
  }
  result.map = std::move(map);
  return result;
}

UMatrix compute_umatrix(const SomMap& map) {
  UMatrix u;
  u.node_values.assign(map.neuron_count(), 0.0);
  std::vector<std::size_t> degree(map.neuron_count(), 0);
  for (const auto& [a, b] : grid_edges(map.rows(), map.cols(), map.topology())) {
    const double d = std::sqrt(kernels::squared_distance(map.prototype(a), map.prototype(b)));
    u.edges.push_back({a, b, d});
    u.node_values[a] += d;
    u.node_values[b] += d;
    ++degree[a];
    ++degree[b];
  }
  for (std::size_t i = 0; i < u.node_values.size(); ++i) {
    if (degree[i] > 0) u.node_values[i] /= static_cast<double>(degree[i]);
  }
  return u;
}

std::size_t HitHistogram::total() const {
  std::size_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::vector<std::size_t> project(const SomMap& map, const DenseMatrix& data, unsigned threads) {
  if (!data.empty()) check_dim(map, data.cols());
  std::vector<std::size_t> bmus(data.rows());
  parallel_for(data.rows(), threads, [&](std::size_t r) { bmus[r] = find_bmu(map, data.row(r)); });
  return bmus;
}

HitHistogram compute_hits(const SomMap& map, const DenseMatrix& data,
                          const std::vector<std::string>* labels, unsigned threads) {
  if (labels != nullptr && !labels->empty() && labels->size() != data.rows()) {
    throw Error(fmt::format("{} labels for {} input vectors", labels->size(), data.rows()));
  }
  const auto bmus = project(map, data, threads);
  HitHistogram h;
  h.counts.assign(map.neuron_count(), 0);
  const bool with_members = labels != nullptr && !labels->empty();
  for (std::size_t r = 0; r < bmus.size(); ++r) {
    ++h.counts[bmus[r]];
    if (with_members) h.members[bmus[r]].push_back((*labels)[r]);
  }
  return h;
}

std::string format_map_json(const SomMap& map, std::uint64_t seed, std::size_t iterations) {
  json prototypes = json::array();
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    const auto p = map.prototype(i);
    prototypes.push_back(std::vector<double>(p.begin(), p.end()));
  }
  json positions = json::array();
  for (const auto& p : map.positions()) positions.push_back({p.x, p.y});
  json j = {{"rows", map.rows()},
            {"cols", map.cols()},
            {"topology", topology_name(map.topology())},
            {"dim", map.dim()},
            {"seed", seed},
            {"iterations", iterations},
            {"prototypes", std::move(prototypes)},
            {"positions", std::move(positions)}};
  return j.dump() + "\n";
}

MapFile parse_map_json(std::string_view text) {
  const json j = parse_json(text, "map.json");
  const auto rows = require<std::size_t>(j, "rows");
  const auto cols = require<std::size_t>(j, "cols");
  const auto dim = require<std::size_t>(j, "dim");
  const auto protos = require<std::vector<std::vector<double>>>(j, "prototypes");
  DenseMatrix m(protos.size(), dim);
  for (std::size_t i = 0; i < protos.size(); ++i) {
    if (protos[i].size() != dim) throw Error(fmt::format("prototype {} has wrong length", i));
    std::copy(protos[i].begin(), protos[i].end(), m.row(i).begin());
  }
  MapFile out{SomMap(rows, cols, parse_topology(require<std::string>(j, "topology")), std::move(m)),
              require<std::uint64_t>(j, "seed"), require<std::size_t>(j, "iterations")};
  return out;
}

std::string format_umatrix_json(const UMatrix& u) {
  json edges = json::array();
  for (const auto& e : u.edges) edges.push_back({e.a, e.b, e.distance});
  json j = {{"node_values", u.node_values}, {"edges", std::move(edges)}};
  return j.dump() + "\n";
}

UMatrix parse_umatrix_json(std::string_view text) {
  const json j = parse_json(text, "umatrix.json");
  UMatrix u;
  u.node_values = require<std::vector<double>>(j, "node_values");
  for (const auto& e : require<json>(j, "edges")) {
    if (!e.is_array() || e.size() != 3) throw Error("umatrix edge must be [i, j, distance]");
    u.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  return u;
}

std::string format_hits_json(const HitHistogram& hits) {
  json members = json::object();
  for (const auto& [neuron, ids] : hits.members) members[std::to_string(neuron)] = ids;
  json j = {{"counts", hits.counts}, {"members", std::move(members)}};
  return j.dump() + "\n";
}

HitHistogram parse_hits_json(std::string_view text) {
  const json j = parse_json(text, "hits.json");
  HitHistogram h;
  h.counts = require<std::vector<std::size_t>>(j, "counts");
  if (auto it = j.find("members"); it != j.end()) {
    for (const auto& [key, ids] : it->items()) {
      h.members[std::stoul(key)] = ids.get<std::vector<std::string>>();
    }
  }
  return h;
}

}  // namespace docsom
