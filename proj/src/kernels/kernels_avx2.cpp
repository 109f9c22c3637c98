// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "docsom/kernels.hpp"

namespace docsom::kernels::avx2 {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Lane order matches the scalar reference: one 4-wide accumulator, reduced
// as (l0 + l2) + (l1 + l3), tail added in order.
double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double sum = horizontal_sum(acc);
  for (; k < n; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

void accumulate(double* acc, const double* x, std::size_t n) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(x + k)));
  }
  for (; k < n; ++k) acc[k] += x[k];
}

void move_toward(double* w, const double* x, double rate, std::size_t n) {
  const __m256d r = _mm256_set1_pd(rate);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d wv = _mm256_loadu_pd(w + k);
    const __m256d step = _mm256_mul_pd(r, _mm256_sub_pd(_mm256_loadu_pd(x + k), wv));
    _mm256_storeu_pd(w + k, _mm256_add_pd(wv, step));
  }
  for (; k < n; ++k) w[k] += rate * (x[k] - w[k]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable kTable{Backend::kAvx2, "avx2", dot, squared_distance, accumulate,
                                  move_toward};
  return kTable;
}

}  // namespace docsom::kernels::avx2
