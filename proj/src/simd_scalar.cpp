#include "mobo/simd.hpp"

namespace mobo::simd::detail {

std::size_t count_leq_scalar(const double* data, std::size_t k, std::size_t m,
                             const double* q) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < k; ++i) {
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

void scaled_sqdist_scalar(const double* x, std::size_t n, const double* z,
                          std::size_t p, std::size_t d_, const double* inv_len,
                          double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x + i * d_;
    for (std::size_t j = 0; j < p; ++j) {
      const double* zj = z + j * d_;
      double acc = 0.0;
      for (std::size_t d = 0; d < d_; ++d) {
        const double diff = (xi[d] - zj[d]) * inv_len[d];
        acc += diff * diff;
      }
      out[i * p + j] = acc;
    }
  }
}

} // namespace mobo::simd::detail
