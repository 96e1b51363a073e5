#include "mobo/cdf_indicator.hpp"

#include <algorithm>
#include <cmath>

#include "mobo/pit.hpp"

namespace mobo::indicators {

CdfEstimator::CdfEstimator(const Matrix& reference, copula::Family policy,
                           copula::CdfMethod method, int cache_size,
                           std::uint64_t cache_seed)
    : n_(static_cast<std::size_t>(reference.rows())),
      vine_(copula::VineCopula::fit(copula::pit_transform(reference).u, policy,
                                    cache_size, cache_seed)),
      method_(method),
      cache_size_(cache_size),
      cache_seed_(cache_seed) {
  sorted_.resize(reference.cols());
  for (Eigen::Index m = 0; m < reference.cols(); ++m) {
    sorted_[m].assign(reference.col(m).data(), reference.col(m).data() + n_);
    std::sort(sorted_[m].begin(), sorted_[m].end());
  }
}

Vector CdfEstimator::to_pseudo(const Vector& y) const {
  require(y.size() == static_cast<Eigen::Index>(sorted_.size()),
          "cdf estimator: objective dimension mismatch");
  const double n1 = static_cast<double>(n_ + 1);
  Vector u(y.size());
  for (Eigen::Index m = 0; m < y.size(); ++m) {
    require(std::isfinite(y[m]), "cdf estimator: non-finite query");
    const auto& s = sorted_[m];
    const auto lo = std::lower_bound(s.begin(), s.end(), y[m]);
    const auto hi = std::upper_bound(s.begin(), s.end(), y[m]);
    const double c_lt = static_cast<double>(lo - s.begin());
    const double c_le = static_cast<double>(hi - s.begin());
    double val;
    if (c_lt < c_le) {
      // Exact member of the reference column: averaged tied rank, computed
      // from counts only so monotone relabelings cannot move it.
      val = 0.5 * (c_lt + c_le + 1.0) / n1;
    } else if (lo == s.begin()) {
      val = 1.0 / n1;
    } else if (lo == s.end()) {
      val = static_cast<double>(n_) / n1;
    } else {
      const double below = *(lo - 1);
      const double above = *lo;
      const double frac = (y[m] - below) / (above - below);
      val = (c_lt + frac) / n1;
    }
    u[m] = std::clamp(val, 1.0 / n1, static_cast<double>(n_) / n1);
  }
  return u;
}

double CdfEstimator::score(const Vector& y) const {
  const Vector u = to_pseudo(y);
  return vine_.cdf(std::span<const double>(u.data(), u.size()), method_,
                   cache_size_, cache_seed_);
}

std::vector<double> CdfEstimator::scores(const Matrix& ys) const {
  std::vector<double> out(ys.rows());
  for (Eigen::Index i = 0; i < ys.rows(); ++i)
    out[i] = score(ys.row(i).transpose());
  return out;
}

IndicatorValue CdfEstimator::indicator(const Matrix& a) const {
  require(a.rows() > 0, "cdf indicator: empty set");
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    best = std::max(best, score(a.row(i).transpose()));
  return {IndicatorKind::cdf, best};
}

std::vector<std::size_t> greedy_topk_cdf(const CdfEstimator& estimator,
                                         const Matrix& points, std::size_t k) {
  return topk_scores(estimator.scores(points), k);
}

} // namespace mobo::indicators
