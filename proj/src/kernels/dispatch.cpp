#include <cstdlib>
#include <string_view>
#include <vector>

#include "backends.hpp"

namespace icsa::kernels {
namespace {

#if defined(ICSA_HAVE_AVX2)
bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& select_table() {
  const auto tables = available_tables();
  if (const char* env = std::getenv("ICSA_SIMD")) {
    for (const KernelTable* t : tables)
      if (t->name == std::string_view(env)) return *t;
  }
  return *tables.back();
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
#if defined(ICSA_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(&avx2_table());
#endif
#if defined(ICSA_HAVE_NEON)
  out.push_back(&neon_table());
#endif
  return out;
}

const KernelTable& active() {
  static const KernelTable& table = select_table();
  return table;
}

Nearest nearest_row(const KernelTable& table, const double* rows, std::size_t n, std::size_t p,
                    const double* point) {
  std::vector<double> d(n);
  table.sq_dists_to_point(rows, n, p, point, d.data());
  Nearest best{0, d.empty() ? 0.0 : d[0]};
  for (std::size_t i = 1; i < n; ++i)
    if (d[i] < best.sq_dist) best = {i, d[i]};
  return best;
}

}  // namespace icsa::kernels
