#include "mobo/simd.hpp"

#include <string_view>

namespace mobo::simd {

namespace {

constexpr Backend kBackends[] = {
    {"scalar", detail::count_leq_scalar, detail::scaled_sqdist_scalar},
#ifdef MOBO_BUILD_AVX2
    {"avx2", detail::count_leq_avx2, detail::scaled_sqdist_avx2},
#endif
};

const Backend& pick() {
  static const Backend* chosen = [] {
    const Backend* best = &kBackends[0];
#ifdef MOBO_BUILD_AVX2
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
      for (const Backend& b : kBackends)
        if (std::string_view(b.name) == "avx2") best = &b;
    }
#endif
    return best;
  }();
  return *chosen;
}

} // namespace

std::size_t count_leq(const double* data, std::size_t k, std::size_t m,
                      const double* q) {
  return pick().count_leq(data, k, m, q);
}

void scaled_sqdist(const double* x, std::size_t n, const double* z,
                   std::size_t p, std::size_t d_, const double* inv_len,
                   double* out) {
  pick().scaled_sqdist(x, n, z, p, d_, inv_len, out);
}

const char* active_backend() { return pick().name; }

std::span<const Backend> backends() { return kBackends; }

} // namespace mobo::simd
