#pragma once

#include <cstdint>
#include <vector>

#include "mobo/hypervolume.hpp"
#include "mobo/vine.hpp"

namespace mobo::indicators {

/// Joint-CDF estimate of objective vectors: empirical margins from a fixed
/// reference sample feeding a vine copula fitted on that sample's
/// pseudo-observations. The score of y is the estimated P(Y <= y), so the
/// set indicator is the best multivariate rank any member attains.
///
/// Margins are mapped by counts when the query value appears in the
/// reference column (reproducing the averaged-rank pseudo-observation, and
/// therefore invariant under strictly increasing transforms applied to both
/// reference and query), by linear interpolation between neighboring order
/// statistics otherwise, clamped to [1/(n+1), n/(n+1)].
class CdfEstimator {
public:
  CdfEstimator(const Matrix& reference, copula::Family policy,
               copula::CdfMethod method = copula::CdfMethod::auto_policy,
               int cache_size = copula::VineCopula::kDefaultCacheSize,
               std::uint64_t cache_seed = copula::VineCopula::kDefaultCacheSeed);

  int objective_dim() const { return static_cast<int>(sorted_.size()); }
  std::size_t reference_size() const { return n_; }
  const copula::VineCopula& vine() const { return vine_; }

  Vector to_pseudo(const Vector& y) const;
  double score(const Vector& y) const;
  std::vector<double> scores(const Matrix& ys) const;

  /// max score over the rows of a; errors if a is empty.
  IndicatorValue indicator(const Matrix& a) const;

private:
  std::size_t n_ = 0;
  std::vector<std::vector<double>> sorted_; // per objective, ascending
  copula::VineCopula vine_;
  copula::CdfMethod method_;
  int cache_size_;
  std::uint64_t cache_seed_;
};

/// Indices of the k best rows under the estimator's score, best first;
/// ties break to the lower index.
std::vector<std::size_t> greedy_topk_cdf(const CdfEstimator& estimator,
                                         const Matrix& points, std::size_t k);

} // namespace mobo::indicators
