#include "mobo/simd.hpp"

#ifdef MOBO_BUILD_AVX2

#include <immintrin.h>

namespace mobo::simd::detail {

std::size_t count_leq_avx2(const double* data, std::size_t k, std::size_t m,
                           const double* q) {
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t d = 0; d < m; ++d) {
      const __m256d v = _mm256_loadu_pd(data + d * k + i);
      const __m256d qd = _mm256_set1_pd(q[d]);
      inside = _mm256_and_pd(inside, _mm256_cmp_pd(v, qd, _CMP_LE_OQ));
      if (_mm256_movemask_pd(inside) == 0) break;
    }
    count += static_cast<std::size_t>(
        __builtin_popcount(_mm256_movemask_pd(inside)));
  }
  for (; i < k; ++i) {
    bool inside = true;
    for (std::size_t d = 0; d < m; ++d) {
      if (data[d * k + i] > q[d]) {
        inside = false;
        break;
      }
    }
    count += inside ? 1 : 0;
  }
  return count;
}

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

void scaled_sqdist_avx2(const double* x, std::size_t n, const double* z,
                        std::size_t p, std::size_t d_, const double* inv_len,
                        double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x + i * d_;
    for (std::size_t j = 0; j < p; ++j) {
      const double* zj = z + j * d_;
      __m256d acc = _mm256_setzero_pd();
      std::size_t d = 0;
      for (; d + 4 <= d_; d += 4) {
        const __m256d diff = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_loadu_pd(xi + d), _mm256_loadu_pd(zj + d)),
            _mm256_loadu_pd(inv_len + d));
        acc = _mm256_fmadd_pd(diff, diff, acc);
      }
      double total = hsum(acc);
      for (; d < d_; ++d) {
        const double diff = (xi[d] - zj[d]) * inv_len[d];
        total += diff * diff;
      }
      out[i * p + j] = total;
    }
  }
}

} // namespace mobo::simd::detail

#endif // MOBO_BUILD_AVX2
