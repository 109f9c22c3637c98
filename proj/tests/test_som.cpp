#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "docsom/error.hpp"
#include "docsom/kernels.hpp"
#include "docsom/som.hpp"
#include "synthetic.hpp"
#include "test_helpers.hpp"

using namespace docsom;

namespace {

SomMap map_from(std::size_t rows, std::size_t cols, Topology t,
                const std::vector<std::vector<double>>& protos) {
  DenseMatrix m(protos.size(), protos.front().size());
  for (std::size_t i = 0; i < protos.size(); ++i) {
    std::copy(protos[i].begin(), protos[i].end(), m.row(i).begin());
  }
  return SomMap(rows, cols, t, std::move(m));
}

std::vector<DimensionBounds> unit_bounds(std::size_t dim) {
  return std::vector<DimensionBounds>(dim, DimensionBounds{0.0, 1.0});
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(kernels::squared_distance(a, b));
}

}  // namespace

TEST_CASE("init_map is seeded, shaped and inside the bounds") {
  SomConfig cfg;
  cfg.seed = 99;
  std::vector<DimensionBounds> bounds{{-1, 1}, {0, 0}, {2, 5}, {0, 1}, {10, 11}};
  const auto a = init_map(cfg, 5, bounds);
  const auto b = init_map(cfg, 5, bounds);
  CHECK(a == b);
  CHECK(a.neuron_count() == 100);
  CHECK(a.dim() == 5);
  for (std::size_t i = 0; i < a.neuron_count(); ++i) {
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(a.prototype(i)[k] >= bounds[k].min);
      CHECK(a.prototype(i)[k] <= bounds[k].max);
    }
  }
  cfg.seed = 100;
  CHECK(!(init_map(cfg, 5, bounds) == a));

  const std::vector<DimensionBounds> zeros(3, DimensionBounds{0, 0});
  const auto z = init_map(SomConfig{}, 3, zeros);
  CHECK(std::ranges::all_of(z.prototypes().data(), [](double v) { return v == 0.0; }));

  const std::vector<DimensionBounds> inverted{{1, 0}};
  CHECK_THROWS_AS(init_map(SomConfig{}, 1, inverted), Error);
  const std::vector<DimensionBounds> inf{{0, INFINITY}};
  CHECK_THROWS_AS(init_map(SomConfig{}, 1, inf), Error);
  CHECK_THROWS_AS(init_map(SomConfig{}, 2, inverted), Error);
  CHECK_THROWS_AS(init_map(SomConfig{}, 0, {}), Error);
}

TEST_CASE("find_bmu") {
  const auto map = map_from(1, 2, Topology::kRectangular, {{0, 0}, {1, 1}});
  const std::vector<double> x{0.9, 0.8};
  CHECK(find_bmu(map, x) == 1);
  const std::vector<double> exact{0, 0};
  CHECK(find_bmu(map, exact) == 0);
  const std::vector<double> tie{0.5, 0.5};
  CHECK(find_bmu(map, tie) == 0);
  const std::vector<double> wrong{1, 2, 3};
  CHECK_THROWS_AS(find_bmu(map, wrong), Error);

  const auto same = map_from(2, 2, Topology::kRectangular, {{3, 3}, {1, 1}, {1, 1}, {1, 1}});
  const std::vector<double> near{1.2, 1.1};
  CHECK(find_bmu(same, near) == 1);
}

TEST_CASE("neighborhood kernel") {
  const auto map = init_map(SomConfig{}, 2, unit_bounds(2));
  // Rectangular neighbors one row apart: grid distance 1, so sigma = 1/sqrt(2).
  const auto rect = map_from(2, 2, Topology::kRectangular, {{0}, {0}, {0}, {0}});
  CHECK(neighborhood(rect, 0, 2, 1.0 / std::sqrt(2.0)) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  // Rectangular diagonal: distance sqrt(2), sigma = 1.
  CHECK(neighborhood(rect, 0, 3, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (std::size_t i = 0; i < map.neuron_count(); ++i) {
    CHECK(neighborhood(map, i, i, 0.5) == 1.0);
    CHECK(neighborhood(map, i, i, 7.0) == 1.0);
  }
  double prev = 0.0;
  for (double sigma : {0.5, 1.0, 2.0, 4.0, 8.0, 100.0, 1e6}) {
    const double h = neighborhood(map, 0, 99, sigma);
    CHECK(h > prev);
    CHECK(h <= 1.0);
    prev = h;
  }
  CHECK(prev == doctest::Approx(1.0));
  CHECK_THROWS_AS(neighborhood(map, 0, 1, 0.0), Error);
}

TEST_CASE("initial radius is half the map diagonal") {
  SomConfig c;
  CHECK(std::fabs(initial_radius(c) - 7.0710678118654755) <= 1e-12);
  c.rows = 3;
  c.cols = 4;
  CHECK(initial_radius(c) == 2.5);
  c.rows = c.cols = 2;
  CHECK(std::fabs(initial_radius(c) - 1.4142135623730951) <= 1e-12);
}

TEST_CASE("schedules decrease monotonically and respect the floor") {
  SomConfig c;
  c.iterations = 1000;
  CHECK(learning_rate(c, 0) == c.eta0);
  CHECK(neighborhood_radius(c, 0) == initial_radius(c));
  for (std::size_t n = 1; n < c.iterations; ++n) {
    CHECK(learning_rate(c, n) <= learning_rate(c, n - 1));
    CHECK(neighborhood_radius(c, n) <= neighborhood_radius(c, n - 1));
    CHECK(neighborhood_radius(c, n) >= c.sigma_min);
    CHECK(learning_rate(c, n) > 0.0);
  }
  CHECK(neighborhood_radius(c, c.iterations - 1) == c.sigma_min);
}

TEST_CASE("single update step") {
  auto map = map_from(1, 2, Topology::kRectangular, {{0, 0}, {4, 4}});
  const std::vector<double> x{1, 1};
  update_step(map, x, 0, 0.5, 0.01);
  CHECK(map.prototype(0)[0] == 0.5);
  CHECK(map.prototype(0)[1] == 0.5);
  // h = exp(-1 / 0.0002) underflows to zero: the far neuron stays put.
  CHECK(map.prototype(1)[0] == 4.0);
  CHECK_THROWS_AS(update_step(map, x, 5, 0.5, 1.0), Error);
}

TEST_CASE("update contracts the BMU toward the sample") {
  std::mt19937_64 rng(3);
  auto map = init_map(SomConfig{}, 6, unit_bounds(6));
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = testing::random_vector(rng, 6);
    const auto b = find_bmu(map, x);
    const double before = distance(map.prototype(b), x);
    const double eta = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
    update_step(map, x, b, eta, 2.0);
    CHECK(distance(map.prototype(b), x) <= before);
  }
}

TEST_CASE("training on a single vector converges toward it") {
  SomConfig c;
  c.rows = c.cols = 3;
  c.iterations = 500;
  DenseMatrix data(1, 3);
  data(0, 0) = 0.2;
  data(0, 1) = 0.9;
  data(0, 2) = 0.4;
  const auto map = init_map(c, 3, unit_bounds(3));
  const double before = quantization_error(map, data);
  const auto result = train(map, data, c);
  CHECK(quantization_error(result.map, data) < before);
  CHECK(quantization_error(result.map, data) < 1e-3);
  CHECK(result.trace.front().iteration == 0);
  CHECK(result.trace.front().error == before);
  CHECK(result.trace.back().iteration == c.iterations);
}

TEST_CASE("training is deterministic and validates its inputs") {
  std::mt19937_64 rng(5);
  const auto data = testing::random_matrix(rng, 30, 4);
  SomConfig c;
  c.rows = 4;
  c.cols = 5;
  c.iterations = 2000;
  c.seed = 17;
  const auto init = init_map(c, 4, data_bounds(data));
  const auto a = train(init, data, c);
  const auto b = train(init, data, c, 4);
  CHECK(a.map == b.map);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].error == b.trace[i].error);
  // Trace every n_max / 100 updates plus the starting point.
  CHECK(a.trace.size() == 101);

  c.seed = 18;
  CHECK(!(train(init, data, c).map == a.map));
  CHECK_THROWS_AS(train(init, DenseMatrix(), c), Error);
  CHECK_THROWS_AS(train(init, DenseMatrix(3, 2), c), Error);
}

TEST_CASE("quantization error falls with default settings on random data") {
  std::mt19937_64 rng(11);
  const auto data = testing::random_matrix(rng, 60, 5);
  SomConfig c;
  c.iterations = 5000;
  const auto result = train(init_map(c, 5, data_bounds(data)), data, c);
  CHECK(result.trace.back().error < result.trace.front().error);
}

TEST_CASE("grid positions and edges") {
  const auto hex = grid_positions(10, 10, Topology::kHexagonal);
  const auto edges = grid_edges(10, 10, Topology::kHexagonal);
  std::vector<int> degree(100, 0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : edges) {
    CHECK(a < b);
    CHECK(seen.insert({a, b}).second);
    ++degree[a];
    ++degree[b];
    const double dx = hex[a].x - hex[b].x, dy = hex[a].y - hex[b].y;
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Non-adjacent neurons are strictly farther than 1 apart.
  for (std::size_t a = 0; a < 100; ++a) {
    for (std::size_t b = a + 1; b < 100; ++b) {
      if (seen.contains({a, b})) continue;
      const double dx = hex[a].x - hex[b].x, dy = hex[a].y - hex[b].y;
      CHECK(dx * dx + dy * dy > 1.0 + 1e-9);
    }
  }
  for (std::size_t r = 1; r < 9; ++r) {
    for (std::size_t col = 1; col < 9; ++col) CHECK(degree[r * 10 + col] == 6);
  }

  const auto rect = grid_edges(5, 4, Topology::kRectangular);
  CHECK(rect.size() == 5 * 3 + 4 * 4);
  std::vector<int> rdeg(20, 0);
  for (const auto& [a, b] : rect) {
    ++rdeg[a];
    ++rdeg[b];
  }
  CHECK(rdeg[1 * 4 + 1] == 4);
  CHECK(rdeg[0] == 2);
}

TEST_CASE("U-matrix") {
  const auto flat = map_from(3, 3, Topology::kHexagonal, std::vector<std::vector<double>>(9, {2, 2}));
  const auto u0 = compute_umatrix(flat);
  CHECK(std::ranges::all_of(u0.edges, [](const auto& e) { return e.distance == 0.0; }));
  CHECK(std::ranges::all_of(u0.node_values, [](double v) { return v == 0.0; }));

  const auto pair = map_from(1, 2, Topology::kHexagonal, {{0, 0}, {3, 4}});
  const auto u1 = compute_umatrix(pair);
  REQUIRE(u1.edges.size() == 1);
  CHECK(u1.edges[0].a == 0);
  CHECK(u1.edges[0].b == 1);
  CHECK(u1.edges[0].distance == 5.0);
  CHECK(u1.node_values == std::vector<double>{5.0, 5.0});

  const auto big = init_map(SomConfig{}, 3, unit_bounds(3));
  const auto u = compute_umatrix(big);
  CHECK(u.edges.size() == grid_edges(10, 10, Topology::kHexagonal).size());
  for (const auto& e : u.edges) {
    CHECK(e.distance == doctest::Approx(distance(big.prototype(e.a), big.prototype(e.b))));
  }
  // Node value is the mean of incident edges.
  std::vector<double> sum(100, 0.0);
  std::vector<int> deg(100, 0);
  for (const auto& e : u.edges) {
    sum[e.a] += e.distance;
    sum[e.b] += e.distance;
    ++deg[e.a];
    ++deg[e.b];
  }
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(u.node_values[i] == doctest::Approx(sum[i] / deg[i]).epsilon(1e-14));
    CHECK(u.node_values[i] >= 0.0);
  }
}

TEST_CASE("hit histogram") {
  std::mt19937_64 rng(21);
  const auto data = testing::random_matrix(rng, 57, 3);
  const auto map = init_map(SomConfig{}, 3, data_bounds(data));
  std::vector<std::string> labels;
  for (int i = 0; i < 57; ++i) labels.push_back("doc" + std::to_string(i));
  const auto hits = compute_hits(map, data, &labels);
  CHECK(hits.total() == 57);
  std::size_t members = 0;
  for (const auto& [neuron, ids] : hits.members) {
    CHECK(ids.size() == hits.counts[neuron]);
    members += ids.size();
  }
  CHECK(members == 57);

  DenseMatrix same(9, 3, 0.25);
  const auto h2 = compute_hits(map, same);
  CHECK(std::ranges::count_if(h2.counts, [](std::size_t c) { return c > 0; }) == 1);
  CHECK(h2.total() == 9);
  CHECK(h2.members.empty());

  const std::vector<std::string> short_labels{"a"};
  CHECK_THROWS_AS(compute_hits(map, same, &short_labels), Error);
}

TEST_CASE("two separated clusters leave a ridge in the U-matrix") {
  const auto d = testing::two_gaussians(2016);
  SomConfig c;
  c.seed = 7;
  const auto result = train(init_map(c, 10, data_bounds(d.data)), d.data, c);
  CHECK(result.trace.back().error < 0.5 * result.trace.front().error);
  const auto u = compute_umatrix(result.map);
  const auto stats = testing::ridge_stats(u, testing::neuron_labels(result.map, d));
  REQUIRE(stats.boundary_edges > 0);
  CHECK(stats.boundary_edge_mean >= 1.5 * stats.inside_edge_mean);
  CHECK(stats.boundary_node_mean >= 1.5 * stats.inside_node_mean);
}

TEST_CASE("map, U-matrix and hits JSON round-trip") {
  std::mt19937_64 rng(1);
  const auto data = testing::random_matrix(rng, 10, 4);
  SomConfig c;
  c.rows = 3;
  c.cols = 4;
  c.topology = Topology::kRectangular;
  const auto map = init_map(c, 4, data_bounds(data));
  const auto file = parse_map_json(format_map_json(map, 123, 456));
  CHECK(file.map == map);
  CHECK(file.seed == 123);
  CHECK(file.iterations == 456);

  const auto u = compute_umatrix(map);
  const auto u2 = parse_umatrix_json(format_umatrix_json(u));
  CHECK(u2.node_values == u.node_values);
  REQUIRE(u2.edges.size() == u.edges.size());
  for (std::size_t i = 0; i < u.edges.size(); ++i) {
    CHECK(u2.edges[i].a == u.edges[i].a);
    CHECK(u2.edges[i].distance == u.edges[i].distance);
  }

  std::vector<std::string> labels(10, "x");
  const auto hits = compute_hits(map, data, &labels);
  const auto h2 = parse_hits_json(format_hits_json(hits));
  CHECK(h2.counts == hits.counts);
  CHECK(h2.members == hits.members);

  CHECK_THROWS_AS(parse_map_json("{"), Error);
  CHECK_THROWS_AS(parse_map_json(R"({"rows": 2})"), Error);
  CHECK(parse_topology("hexagonal") == Topology::kHexagonal);
  CHECK_THROWS_AS(parse_topology("triangle"), Error);
}

TEST_CASE("config validation") {
  SomConfig c;
  CHECK_NOTHROW(c.validate());
  c.rows = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SomConfig{};
  c.eta0 = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SomConfig{};
  c.sigma_min = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SomConfig{};
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
