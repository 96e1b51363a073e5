#pragma once

#include <cstdint>
#include <vector>

#include "mobo/common.hpp"
#include "mobo/pareto.hpp"

namespace mobo::gp {

struct KernelSpec {
  Vector lengthscales;    // ARD, one per input dimension, strictly positive
  double signal_variance; // strictly positive
};

/// Affine map from internal unit-interval target space to natural units:
/// natural = offset + scale * internal.
struct OutputScaler {
  double offset = 0.0;
  double scale = 1.0;
};

/// One objective's Matern-5/2 GP. Inputs live in the unit cube; targets are
/// scaled to the unit interval and centered before fitting. Predictions are
/// for the latent (noise-free) function in natural units.
class GaussianProcessModel {
public:
  /// Maximizes log marginal likelihood with multi-restart BFGS ascent
  /// (one heuristic start plus random restarts, deterministic in seed).
  static GaussianProcessModel fit(const Dataset& data, int objective_index,
                                  std::uint64_t seed = 0);

  /// Latent predictive mean and covariance over pool rows, natural units.
  /// The covariance is symmetrized; it may need jitter before factorization.
  void predict(const Matrix& pool, Vector& mean, Matrix& cov) const;

  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  const OutputScaler& output_scaler() const { return scaler_; }
  double log_marginal_likelihood() const { return lml_; }
  /// Accepted objective values of the winning restart, in ascent order.
  const std::vector<double>& fit_trace() const { return fit_trace_; }

private:
  GaussianProcessModel() = default;

  KernelSpec kernel_;
  double noise_variance_ = 1e-6;
  Matrix train_x_;         // n x d
  Vector train_t_;         // centered unit-interval targets
  OutputScaler scaler_;
  double target_center_ = 0.0;
  Vector alpha_;           // (K + noise I)^-1 t
  Matrix chol_;            // lower Cholesky factor of K + noise I
  double lml_ = 0.0;
  std::vector<double> fit_trace_;
};

/// Per-objective posterior over one pool, natural units.
struct Posterior {
  std::vector<Vector> mean; // M vectors of length N
  std::vector<Matrix> cov;  // M matrices of shape N x N
};

/// values[j] is an N x M matrix: joint draw j over the pool, all objectives.
struct PosteriorSamples {
  std::vector<Matrix> values;
  std::uint64_t seed = 0;
};

/// One fit per objective column of the dataset.
std::vector<GaussianProcessModel> fit_all(const Dataset& data,
                                          std::uint64_t seed = 0);

Posterior posterior(const std::vector<GaussianProcessModel>& models,
                    const Matrix& pool);

/// L joint draws per objective via Cholesky factorization with jitter
/// escalation; objectives are sampled independently. Deterministic in seed.
PosteriorSamples sample_posterior(const Posterior& post, int L,
                                  std::uint64_t seed);

} // namespace mobo::gp
