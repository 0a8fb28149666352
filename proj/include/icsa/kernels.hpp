#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace icsa::kernels {

// Row-major n x p block helpers. Every backend implements the same table;
// the scalar backend is the reference the others are tested against.
struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t len);
  // out[i] = ||row_i - point||^2
  void (*sq_dists_to_point)(const double* rows, std::size_t n, std::size_t p,
                            const double* point, double* out);
  // out[i] = ||row_i||^2
  void (*row_sq_norms)(const double* rows, std::size_t n, std::size_t p, double* out);
};

struct Nearest {
  std::size_t index;
  double sq_dist;
};

const KernelTable& scalar_table();
// Backends compiled in and supported by the running CPU, scalar first.
std::vector<const KernelTable*> available_tables();

// Selected once per process: the widest supported backend, or the one named
// by the ICSA_SIMD environment variable (scalar | avx2 | neon).
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t len) {
  return active().dot(a, b, len);
}
inline void sq_dists_to_point(const double* rows, std::size_t n, std::size_t p,
                              const double* point, double* out) {
  active().sq_dists_to_point(rows, n, p, point, out);
}
inline void row_sq_norms(const double* rows, std::size_t n, std::size_t p, double* out) {
  active().row_sq_norms(rows, n, p, out);
}

// Nearest row to `point`; the lowest index wins ties.
Nearest nearest_row(const KernelTable& table, const double* rows, std::size_t n,
                    std::size_t p, const double* point);
inline Nearest nearest_row(const double* rows, std::size_t n, std::size_t p,
                           const double* point) {
  return nearest_row(active(), rows, n, p, point);
}

}  // namespace icsa::kernels
