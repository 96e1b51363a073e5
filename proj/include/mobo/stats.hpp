#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mobo/common.hpp"

namespace mobo::stats {

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse standard normal CDF. Accurate to full double precision for
/// p in (0,1); returns +/-inf at the endpoints.
double normal_quantile(double p);

/// P(X <= h, Y <= k) for standard bivariate normal with correlation rho.
/// Panelized Gauss-Legendre on the Drezner-Wesolowsky integral; |rho| may
/// approach 1.
double bivariate_normal_cdf(double h, double k, double rho);

/// P(Z <= b) for an M-variate standard normal with correlation matrix R,
/// via the Genz sequential algorithm over a randomly-shifted Richtmyer
/// lattice. Deterministic given seed; typical accuracy ~1e-4 at M <= 8.
double mvn_rectangle(const Vector& b, const Matrix& R,
                     int points_per_shift = 2039, int shifts = 8,
                     std::uint64_t seed = 0x6d766e);

/// Kendall's tau-b. O(n log n) merge-sort counting with tie correction.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// sqrt(n) * sup-distance between the sample ECDF and Unif(0,1).
double ks_uniform_statistic(std::vector<double> sample);

/// Critical value of the Kolmogorov distribution: P(K > value) = alpha.
/// Supported alpha: 0.01, 0.05, 0.10.
double ks_critical_value(double alpha);

/// Uniform draw from the (M-1)-simplex (weights summing to 1).
std::vector<double> simplex_sample(int m, std::mt19937_64& rng);

} // namespace mobo::stats
