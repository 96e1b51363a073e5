#pragma once

#include <cstdint>
#include <vector>

#include "mobo/bivariate.hpp"
#include "mobo/gp.hpp"
#include "mobo/vine.hpp"

namespace mobo::acquisition {

enum class Kind { botied_v1, botied_v2, nehvi, nparego, random_pick };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

struct AcquisitionSpec {
  Kind kind = Kind::botied_v1;
  copula::Family family_policy = copula::Family::gaussian;
  int mc_cdf_samples = copula::VineCopula::kDefaultCacheSize; // >= 1000
  double chebyshev_rho = 0.05;
  std::uint64_t seed = 0;
};

/// scores[i] is candidate i's score under the first scoring round (before
/// any batch conditioning); selected lists the B picks in pick order.
struct AcquisitionScores {
  std::vector<double> scores;
  std::vector<std::size_t> selected;
};

/// Candidate-level CDF scoring: pool all L*N posterior draws, rank-transform
/// them jointly, fit one vine on the pooled pseudo-observations, and average
/// each candidate's L CDF values. Every query shares one cached estimator.
AcquisitionScores botied_v1(const gp::PosteriorSamples& samples,
                            std::size_t batch, const AcquisitionSpec& spec);

/// Rank-aggregated variant: same pooled rank transform, but each candidate's
/// L pseudo-observation rows are averaged first and the vine is fitted on
/// (and scored at) the N averaged rows.
AcquisitionScores botied_v2(const gp::PosteriorSamples& samples,
                            std::size_t batch, const AcquisitionSpec& spec);

/// Noisy expected hypervolume improvement over the sampled fronts at the
/// observed designs; batch picks are sequential-greedy, conditioning every
/// sampled front on the picks so far. observed and pool samples must come
/// from the same joint posterior draws (equal L).
AcquisitionScores nehvi(const gp::PosteriorSamples& pool_samples,
                        const gp::PosteriorSamples& observed_samples,
                        const Vector& ref, std::size_t batch);

/// min_m(w_m y_m) + rho * sum_m(w_m y_m).
double chebyshev_scalarization(const Vector& y, const std::vector<double>& w,
                               double rho);

/// Scalarized noisy expected improvement: one simplex weight draw per batch
/// slot, objectives min-max normalized by the observed objective range,
/// incumbent marginalized over the posterior at observed designs.
AcquisitionScores nparego(const gp::PosteriorSamples& pool_samples,
                          const gp::PosteriorSamples& observed_samples,
                          const Matrix& observed_objectives, std::size_t batch,
                          const AcquisitionSpec& spec);

/// B distinct uniform indices; scores are all zero.
AcquisitionScores random_select(std::size_t pool_size, std::size_t batch,
                                std::uint64_t seed);

} // namespace mobo::acquisition
