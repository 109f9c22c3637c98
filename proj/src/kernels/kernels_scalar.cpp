#include "docsom/kernels.hpp"

namespace docsom::kernels::scalar {
namespace {

// Reductions use four striped partial sums combined as (s0 + s2) + (s1 + s3),
// then the tail in order. The SIMD backends follow the same order, so every
// backend returns bit-identical results and training does not depend on the
// CPU it runs on.
double dot(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    for (std::size_t j = 0; j < 4; ++j) s[j] += a[k + j] * b[k + j];
  }
  double sum = (s[0] + s[2]) + (s[1] + s[3]);
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double diff = a[k + j] - b[k + j];
      s[j] += diff * diff;
    }
  }
  double sum = (s[0] + s[2]) + (s[1] + s[3]);
  for (; k < n; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

void accumulate(double* acc, const double* x, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) acc[k] += x[k];
}

void move_toward(double* w, const double* x, double rate, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) w[k] += rate * (x[k] - w[k]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable kTable{Backend::kScalar, "scalar", dot, squared_distance,
                                  accumulate, move_toward};
  return kTable;
}

}  // namespace docsom::kernels::scalar
