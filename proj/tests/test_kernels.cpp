#include <doctest.h>

#include <cmath>
#include <random>

#include "docsom/kernels.hpp"
#include "test_helpers.hpp"

using namespace docsom;
using docsom::testing::random_vector;

namespace {

// Reference reductions in long double, independent of every backend.
long double dot_ld(const std::vector<double>& a, const std::vector<double>& b, std::size_t off,
                   std::size_t n) {
  long double s = 0;
  for (std::size_t k = 0; k < n; ++k) s += static_cast<long double>(a[off + k]) * b[off + k];
  return s;
}

long double abs_sum(const std::vector<double>& a, const std::vector<double>& b, std::size_t off,
                    std::size_t n) {
  long double s = 0;
  for (std::size_t k = 0; k < n; ++k) s += std::fabs(static_cast<long double>(a[off + k]) * b[off + k]);
  return s;
}

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto backends = kernels::available_backends();
  REQUIRE(!backends.empty());
  CHECK(backends.front() == kernels::Backend::kScalar);
  CHECK(std::string(kernels::table_for(kernels::Backend::kScalar).name) == "scalar");
}

TEST_CASE("scalar reductions agree with a long-double oracle") {
  std::mt19937_64 rng(7);
  const auto& s = kernels::scalar::table();
  for (std::size_t n : {0u, 1u, 3u, 17u, 200u}) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const double bound = 1e-14 * static_cast<double>(abs_sum(a, b, 0, n) + 1);
    CHECK(std::fabs(s.dot(a.data(), b.data(), n) - static_cast<double>(dot_ld(a, b, 0, n))) <= bound);
  }
}

TEST_CASE("every backend matches the scalar reference") {
  std::mt19937_64 rng(11);
  const auto& ref = kernels::scalar::table();
  for (auto backend : kernels::available_backends()) {
    const auto& t = kernels::table_for(backend);
    CAPTURE(t.name);
    // Lengths cover empty input, every SIMD remainder and multi-block loops;
    // offsets exercise unaligned loads.
    for (std::size_t n = 0; n <= 67; ++n) {
      for (std::size_t off = 0; off < 4; ++off) {
        const auto a = random_vector(rng, n + off, 3.0);
        const auto b = random_vector(rng, n + off, 3.0);
        const double* pa = a.data() + off;
        const double* pb = b.data() + off;

        // All backends share one summation order, so results agree bit for bit.
        CHECK(t.dot(pa, pb, n) == ref.dot(pa, pb, n));
        CHECK(t.squared_distance(pa, pb, n) == ref.squared_distance(pa, pb, n));

        std::vector<double> acc1(a.begin() + off, a.end()), acc2 = acc1;
        t.accumulate(acc1.data(), pb, n);
        ref.accumulate(acc2.data(), pb, n);
        CHECK(acc1 == acc2);

        std::vector<double> w1(a.begin() + off, a.end()), w2 = w1;
        t.move_toward(w1.data(), pb, 0.37, n);
        ref.move_toward(w2.data(), pb, 0.37, n);
        CHECK(w1 == w2);
      }
    }
  }
}

TEST_CASE("move_toward applies one update step") {
  std::vector<double> w{0.0, 0.0};
  const std::vector<double> x{1.0, 1.0};
  kernels::move_toward(w, x, 0.5);
  CHECK(w == std::vector<double>{0.5, 0.5});
}

TEST_CASE("span wrappers reject mismatched lengths") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS_AS(kernels::dot(a, b), std::invalid_argument);
  CHECK_THROWS_AS(kernels::squared_distance(a, b), std::invalid_argument);
  CHECK_THROWS_AS(kernels::accumulate(a, b), std::invalid_argument);
  CHECK_THROWS_AS(kernels::move_toward(a, b, 0.1), std::invalid_argument);
}

TEST_CASE("backend names round-trip and select switches the active table") {
  for (auto backend : kernels::available_backends()) {
    CHECK(kernels::parse_backend(kernels::backend_name(backend)) == backend);
  }
  CHECK_THROWS(kernels::parse_backend("sse9"));
  const auto before = kernels::active().backend;
  kernels::select(kernels::Backend::kScalar);
  CHECK(kernels::active().backend == kernels::Backend::kScalar);
  kernels::select(before);
  CHECK(kernels::active().backend == before);
}
