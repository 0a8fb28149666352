#include <immintrin.h>

#include "backends.hpp"

namespace icsa::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= len; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= len; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < len; ++k) s += a[k] * b[k];
  return s;
}

inline double sq_dist_row(const double* r, const double* point, std::size_t p) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= p; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(r + k), _mm256_loadu_pd(point + k));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; k < p; ++k) {
    const double d = r[k] - point[k];
    s += d * d;
  }
  return s;
}

void sq_dists_avx2(const double* rows, std::size_t n, std::size_t p, const double* point,
                   double* out) {
  if (p >= 4) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sq_dist_row(rows + i * p, point, p);
    return;
  }
  // Narrow rows: vectorize across four rows at a time.
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < p; ++k) {
      const __m256d v = _mm256_set_pd(rows[(i + 3) * p + k], rows[(i + 2) * p + k],
                                      rows[(i + 1) * p + k], rows[i * p + k]);
      const __m256d d = _mm256_sub_pd(v, _mm256_set1_pd(point[k]));
      acc = _mm256_fmadd_pd(d, d, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) out[i] = sq_dist_row(rows + i * p, point, p);
}

void row_sq_norms_avx2(const double* rows, std::size_t n, std::size_t p, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_avx2(rows + i * p, rows + i * p, p);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", dot_avx2, sq_dists_avx2, row_sq_norms_avx2};
  return table;
}

}  // namespace icsa::kernels
