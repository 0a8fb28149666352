#include "backends.hpp"

namespace icsa::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) s += a[k] * b[k];
  return s;
}

void sq_dists_scalar(const double* rows, std::size_t n, std::size_t p, const double* point,
                     double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * p;
    double s = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double d = r[k] - point[k];
      s += d * d;
    }
    out[i] = s;
  }
}

void row_sq_norms_scalar(const double* rows, std::size_t n, std::size_t p, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = dot_scalar(rows + i * p, rows + i * p, p);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, sq_dists_scalar, row_sq_norms_scalar};
  return table;
}

}  // namespace icsa::kernels
