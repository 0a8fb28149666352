#include <arm_neon.h>

#include "backends.hpp"

namespace icsa::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  for (; k + 2 <= len; k += 2) acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < len; ++k) s += a[k] * b[k];
  return s;
}

void sq_dists_neon(const double* rows, std::size_t n, std::size_t p, const double* point,
                   double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * p;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= p; k += 2) {
      const float64x2_t d = vsubq_f64(vld1q_f64(r + k), vld1q_f64(point + k));
      acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; k < p; ++k) {
      const double d = r[k] - point[k];
      s += d * d;
    }
    out[i] = s;
  }
}

void row_sq_norms_neon(const double* rows, std::size_t n, std::size_t p, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_neon(rows + i * p, rows + i * p, p);
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{"neon", dot_neon, sq_dists_neon, row_sq_norms_neon};
  return table;
}

}  // namespace icsa::kernels
