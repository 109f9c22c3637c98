#include <arm_neon.h>

#include "docsom/kernels.hpp"

namespace docsom::kernels::neon {
namespace {

// acc0 holds lanes 0-1 and acc1 lanes 2-3, so the final reduction is
// (l0 + l2) + (l1 + l3) as in the scalar reference.
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + k + 2), vld1q_f64(b + k + 2)));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) sum += a[k] * b[k];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
    acc0 = vaddq_f64(acc0, vmulq_f64(d0, d0));
    acc1 = vaddq_f64(acc1, vmulq_f64(d1, d1));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

void accumulate(double* acc, const double* x, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(acc + k, vaddq_f64(vld1q_f64(acc + k), vld1q_f64(x + k)));
  for (; k < n; ++k) acc[k] += x[k];
}

void move_toward(double* w, const double* x, double rate, std::size_t n) {
  const float64x2_t r = vdupq_n_f64(rate);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t wv = vld1q_f64(w + k);
    vst1q_f64(w + k, vaddq_f64(wv, vmulq_f64(r, vsubq_f64(vld1q_f64(x + k), wv))));
  }
  for (; k < n; ++k) w[k] += rate * (x[k] - w[k]);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable kTable{Backend::kNeon, "neon", dot, squared_distance, accumulate,
                                  move_toward};
  return kTable;
}

}  // namespace docsom::kernels::neon
