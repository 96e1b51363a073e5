#pragma once

#include <cstddef>
#include <span>

namespace mobo::simd {

/// Rows of `data` are K points in M dimensions, stored dimension-major:
/// data[d*k + i] is coordinate d of point i. Returns how many points are
/// componentwise <= q.
std::size_t count_leq(const double* data, std::size_t k, std::size_t m,
                      const double* q);

/// out[i*p + j] = sum_d ((x[i*d_ + d] - z[j*d_ + d]) * inv_len[d])^2
/// for X (n x d_) and Z (p x d_), both row-major.
void scaled_sqdist(const double* x, std::size_t n, const double* z,
                   std::size_t p, std::size_t d_, const double* inv_len,
                   double* out);

/// Name of the implementation selected at runtime ("avx2" or "scalar").
const char* active_backend();

struct Backend {
  const char* name;
  std::size_t (*count_leq)(const double*, std::size_t, std::size_t,
                           const double*);
  void (*scaled_sqdist)(const double*, std::size_t, const double*, std::size_t,
                        std::size_t, const double*, double*);
};

/// Every implementation compiled into this build. Index 0 is the scalar
/// reference; the rest must agree with it (exactly for count_leq, to
/// rounding for scaled_sqdist).
std::span<const Backend> backends();

namespace detail {

std::size_t count_leq_scalar(const double* data, std::size_t k, std::size_t m,
                             const double* q);
void scaled_sqdist_scalar(const double* x, std::size_t n, const double* z,
                          std::size_t p, std::size_t d_, const double* inv_len,
                          double* out);

#ifdef MOBO_BUILD_AVX2
std::size_t count_leq_avx2(const double* data, std::size_t k, std::size_t m,
                           const double* q);
void scaled_sqdist_avx2(const double* x, std::size_t n, const double* z,
                        std::size_t p, std::size_t d_, const double* inv_len,
                        double* out);
#endif

} // namespace detail

} // namespace mobo::simd
