#include "mobo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mobo/simd.hpp"

namespace mobo::gp {

namespace {

constexpr double kSqrt5 = 2.23606797749979;
constexpr double kNoiseFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;

// theta layout: [log l_1 .. log l_d, log signal_var, log excess_noise]
// with noise_var = kNoiseFloor + exp(theta.back()).

struct Problem {
  const Matrix& X;       // n x d
  const Vector& t;       // centered targets
  std::vector<double> x_rows; // row-major copy for the distance kernel
  // sqdiff[d] is the n x n matrix of (x_id - x_jd)^2.
  std::vector<Matrix> sqdiff;

  explicit Problem(const Matrix& X_, const Vector& t_) : X(X_), t(t_) {
    const auto n = X.rows();
    const auto d = X.cols();
    x_rows.resize(static_cast<std::size_t>(n * d));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        x_rows[static_cast<std::size_t>(i * d + j)] = X(i, j);
    sqdiff.reserve(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Matrix D(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double diff = X(i, k) - X(j, k);
          D(i, j) = diff * diff;
        }
      sqdiff.push_back(std::move(D));
    }
  }
};

Matrix scaled_sqdist_matrix(const std::vector<double>& a_rows, Eigen::Index na,
                            const std::vector<double>& b_rows, Eigen::Index nb,
                            Eigen::Index d, const Vector& lengthscales) {
  Vector inv = lengthscales.cwiseInverse();
  std::vector<double> out(static_cast<std::size_t>(na * nb));
  simd::scaled_sqdist(a_rows.data(), static_cast<std::size_t>(na),
                      b_rows.data(), static_cast<std::size_t>(nb),
                      static_cast<std::size_t>(d), inv.data(), out.data());
  Matrix M(na, nb);
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j)
      M(i, j) = out[static_cast<std::size_t>(i * nb + j)];
  return M;
}

// Matern-5/2 on precomputed squared scaled distances.
Matrix matern52(const Matrix& sq, double signal_var) {
  const Matrix r = sq.cwiseMax(0.0).cwiseSqrt();
  return signal_var *
         ((1.0 + kSqrt5 * r.array() + (5.0 / 3.0) * sq.array()) *
          (-kSqrt5 * r.array()).exp())
             .matrix();
}

struct Factorization {
  Matrix chol; // lower
  bool ok = false;
  double jitter = 0.0;
};

Factorization factor_with_jitter(const Matrix& K) {
  Factorization f;
  Matrix A = K;
  double jitter = 0.0;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() == Eigen::Success) {
      f.chol = llt.matrixL();
      f.ok = true;
      f.jitter = jitter;
      return f;
    }
    jitter = attempt == 0 ? 1e-8 : jitter * 10.0;
    if (jitter > 1e-4 * 1.5) break;
    A = K + jitter * Matrix::Identity(K.rows(), K.cols());
  }
  return f;
}

struct Objective {
  const Problem& prob;

  // Returns negative LML (to minimize) and its gradient; +inf when the
  // Gram factorization fails even with jitter.
  double eval(const Vector& theta, Vector* grad) const {
    const auto n = prob.X.rows();
    const auto d = prob.X.cols();
    Vector lengthscales = theta.head(d).array().exp();
    const double signal_var = std::exp(theta[d]);
    const double excess_noise = std::exp(theta[d + 1]);
    const double noise_var = kNoiseFloor + excess_noise;

    const Matrix sq = scaled_sqdist_matrix(prob.x_rows, n, prob.x_rows, n, d,
                                           lengthscales);
    const Matrix Kf = matern52(sq, signal_var);
    Matrix K = Kf;
    K.diagonal().array() += noise_var;
    const Factorization f = factor_with_jitter(K);
    if (!f.ok) {
      if (grad) grad->setZero();
      return std::numeric_limits<double>::infinity();
    }

    const Vector alpha = f.chol.transpose()
                             .triangularView<Eigen::Upper>()
                             .solve(f.chol.triangularView<Eigen::Lower>()
                                        .solve(prob.t));
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      log_det += 2.0 * std::log(f.chol(i, i));
    const double lml = -0.5 * prob.t.dot(alpha) - 0.5 * log_det -
                       0.5 * n * kLog2Pi;

    if (grad) {
      // dLML/dtheta_k = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta_k)
      Matrix Kinv = Matrix::Identity(n, n);
      f.chol.triangularView<Eigen::Lower>().solveInPlace(Kinv);
      f.chol.transpose().triangularView<Eigen::Upper>().solveInPlace(Kinv);
      const Matrix G = alpha * alpha.transpose() - Kinv;

      const Matrix r = sq.cwiseMax(0.0).cwiseSqrt();
      const Matrix decay =
          ((1.0 + kSqrt5 * r.array()) * (-kSqrt5 * r.array()).exp()).matrix();
      for (Eigen::Index k = 0; k < d; ++k) {
        const double inv_l2 = 1.0 / (lengthscales[k] * lengthscales[k]);
        const Matrix dK = (5.0 / 3.0) * signal_var * inv_l2 *
                          decay.cwiseProduct(prob.sqdiff[k]);
        (*grad)[k] = -0.5 * G.cwiseProduct(dK).sum();
      }
      (*grad)[d] = -0.5 * G.cwiseProduct(Kf).sum();
      (*grad)[d + 1] = -0.5 * excess_noise * G.trace();
    }
    return -lml;
  }
};

void clamp_theta(Vector& theta) {
  const auto d = theta.size() - 2;
  for (Eigen::Index i = 0; i < d; ++i)
    theta[i] = std::clamp(theta[i], -7.0, 7.0);
  theta[d] = std::clamp(theta[d], -9.0, 9.0);
  theta[d + 1] = std::clamp(theta[d + 1], -21.0, 2.0);
}

struct AscentResult {
  Vector theta;
  double neg_lml = std::numeric_limits<double>::infinity();
  std::vector<double> trace; // accepted LML values
};

AscentResult bfgs_ascend(const Objective& objective, Vector theta) {
  const auto p = theta.size();
  clamp_theta(theta);
  Vector grad(p), grad_next(p);
  double f = objective.eval(theta, &grad);
  AscentResult result;
  result.theta = theta;
  result.neg_lml = f;
  if (!std::isfinite(f)) return result;
  result.trace.push_back(-f);

  Matrix H = Matrix::Identity(p, p);
  for (int iter = 0; iter < 200; ++iter) {
    if (grad.norm() < 1e-6) break;
    Vector dir = -(H * grad);
    if (dir.dot(grad) >= 0.0) {
      H = Matrix::Identity(p, p);
      dir = -grad;
    }
    // Armijo backtracking keeps the accepted LML sequence monotone.
    double step = 1.0;
    const double slope = grad.dot(dir);
    Vector theta_next;
    double f_next = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      theta_next = theta + step * dir;
      clamp_theta(theta_next);
      f_next = objective.eval(theta_next, &grad_next);
      if (std::isfinite(f_next) && f_next <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vector s = theta_next - theta;
    const Vector y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const Matrix I = Matrix::Identity(p, p);
      const double rho = 1.0 / sy;
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    theta = theta_next;
    f = f_next;
    grad = grad_next;
    result.trace.push_back(-f);
  }
  result.theta = theta;
  result.neg_lml = f;
  return result;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

} // namespace

GaussianProcessModel GaussianProcessModel::fit(const Dataset& data,
                                               int objective_index,
                                               std::uint64_t seed) {
  require(objective_index >= 0 && objective_index < data.objective_dim(),
          "fit: objective index out of range");
  require(data.size() >= 2, "fit: need at least two observations");

  const Matrix X = data.design_matrix();
  const Matrix Y = data.objective_matrix();
  const auto n = X.rows();
  const auto d = X.cols();

  GaussianProcessModel model;
  const Vector y = Y.col(objective_index);
  const double y_min = y.minCoeff();
  const double y_max = y.maxCoeff();
  double range = y_max - y_min;
  if (range < 1e-12) range = 1.0; // constant targets degrade gracefully
  Vector t_unit = (y.array() - y_min) / range;
  const double center = t_unit.mean();
  model.train_t_ = t_unit.array() - center;
  model.train_x_ = X;
  model.scaler_ = OutputScaler{y_min, range};
  model.target_center_ = center;

  const Problem prob(model.train_x_, model.train_t_);
  const Objective objective{prob};

  // Heuristic start: per-dimension median absolute difference.
  Vector theta0(d + 2);
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        diffs.push_back(std::abs(X(i, k) - X(j, k)));
    const double med = std::max(0.1, median(std::move(diffs)));
    theta0[k] = std::log(med);
  }
  const double var_t =
      std::max(1e-4, model.train_t_.squaredNorm() / std::max<double>(1, n - 1));
  theta0[d] = std::log(var_t);
  theta0[d + 1] = std::log(1e-4);

  std::mt19937_64 rng =
      seeded_rng(seed, 0x6770, static_cast<std::uint64_t>(objective_index));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  AscentResult best;
  for (int restart = 0; restart < 5; ++restart) {
    Vector theta = theta0;
    if (restart > 0) {
      for (Eigen::Index k = 0; k < d; ++k)
        theta[k] = std::log(0.05) + unif(rng) * std::log(3.0 / 0.05);
      theta[d] = std::log(0.01) + unif(rng) * std::log(4.0 / 0.01);
      theta[d + 1] = std::log(1e-6) + unif(rng) * std::log(1e-2 / 1e-6);
    }
    AscentResult res = bfgs_ascend(objective, theta);
    if (res.neg_lml < best.neg_lml) best = std::move(res);
  }
  require(std::isfinite(best.neg_lml),
          "fit: no hyperparameter start produced a usable Gram matrix");

  const Vector& theta = best.theta;
  model.kernel_.lengthscales = theta.head(d).array().exp();
  model.kernel_.signal_variance = std::exp(theta[d]);
  model.noise_variance_ = kNoiseFloor + std::exp(theta[d + 1]);
  model.lml_ = -best.neg_lml;
  model.fit_trace_ = std::move(best.trace);

  const Matrix sq = scaled_sqdist_matrix(prob.x_rows, n, prob.x_rows, n, d,
                                         model.kernel_.lengthscales);
  Matrix K = matern52(sq, model.kernel_.signal_variance);
  K.diagonal().array() += model.noise_variance_;
  const Factorization f = factor_with_jitter(K);
  if (!f.ok) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    const double cond = es.eigenvalues().maxCoeff() /
                        std::max(1e-300, es.eigenvalues().minCoeff());
    throw Error("fit: Gram matrix singular after jitter escalation, "
                "condition number " +
                std::to_string(cond));
  }
  model.chol_ = f.chol;
  model.alpha_ = f.chol.transpose().triangularView<Eigen::Upper>().solve(
      f.chol.triangularView<Eigen::Lower>().solve(model.train_t_));
  return model;
}

void GaussianProcessModel::predict(const Matrix& pool, Vector& mean,
                                   Matrix& cov) const {
  require(pool.cols() == train_x_.cols(), "predict: dimension mismatch");
  require(pool.rows() >= 1, "predict: empty pool");
  const auto n = train_x_.rows();
  const auto d = train_x_.cols();
  const auto p = pool.rows();

  std::vector<double> train_rows(static_cast<std::size_t>(n * d));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      train_rows[static_cast<std::size_t>(i * d + j)] = train_x_(i, j);
  std::vector<double> pool_rows(static_cast<std::size_t>(p * d));
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      pool_rows[static_cast<std::size_t>(i * d + j)] = pool(i, j);

  const Matrix sq_cross = scaled_sqdist_matrix(pool_rows, p, train_rows, n, d,
                                               kernel_.lengthscales);
  const Matrix Ks = matern52(sq_cross, kernel_.signal_variance); // p x n
  const Matrix sq_pool = scaled_sqdist_matrix(pool_rows, p, pool_rows, p, d,
                                              kernel_.lengthscales);
  const Matrix Kss = matern52(sq_pool, kernel_.signal_variance);

  const Vector mean_internal = Ks * alpha_;
  const Matrix V =
      chol_.triangularView<Eigen::Lower>().solve(Ks.transpose()); // n x p
  Matrix cov_internal = Kss - V.transpose() * V;
  cov_internal = 0.5 * (cov_internal + cov_internal.transpose()).eval();

  const double s = scaler_.scale;
  mean = (scaler_.offset +
          s * (mean_internal.array() + target_center_))
             .matrix();
  cov = s * s * cov_internal;
}

std::vector<GaussianProcessModel> fit_all(const Dataset& data,
                                          std::uint64_t seed) {
  std::vector<GaussianProcessModel> models;
  models.reserve(data.objective_dim());
  for (int m = 0; m < data.objective_dim(); ++m)
    models.push_back(GaussianProcessModel::fit(data, m, seed));
  return models;
}

Posterior posterior(const std::vector<GaussianProcessModel>& models,
                    const Matrix& pool) {
  require(!models.empty(), "posterior: no models");
  Posterior post;
  post.mean.resize(models.size());
  post.cov.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m)
    models[m].predict(pool, post.mean[m], post.cov[m]);
  return post;
}

PosteriorSamples sample_posterior(const Posterior& post, int L,
                                  std::uint64_t seed) {
  require(L >= 1, "sample_posterior: L must be positive");
  const auto M = static_cast<int>(post.mean.size());
  require(M >= 1, "sample_posterior: empty posterior");
  const auto N = post.mean[0].size();

  PosteriorSamples samples;
  samples.seed = seed;
  samples.values.assign(L, Matrix(N, M));

  for (int m = 0; m < M; ++m) {
    require(post.mean[m].size() == N && post.cov[m].rows() == N,
            "sample_posterior: inconsistent posterior shapes");
    const Matrix& C = post.cov[m];
    const double top = C.cwiseAbs().maxCoeff();
    std::mt19937_64 rng = seeded_rng(seed, 0x7073, static_cast<std::uint64_t>(m));
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (top < 1e-13) {
      // Degenerate posterior: every draw is the mean.
      for (int j = 0; j < L; ++j) samples.values[j].col(m) = post.mean[m];
      continue;
    }

    Matrix A = C;
    Factorization f;
    double jitter = 1e-12 * top;
    for (int attempt = 0; attempt < 8; ++attempt) {
      f = factor_with_jitter(A);
      if (f.ok) break;
      A = C + jitter * Matrix::Identity(N, N);
      jitter *= 100.0;
    }
    require(f.ok, "sample_posterior: covariance factorization failed");

    Vector z(N);
    for (int j = 0; j < L; ++j) {
      for (Eigen::Index i = 0; i < N; ++i) z[i] = gauss(rng);
      samples.values[j].col(m) =
          post.mean[m] + f.chol.triangularView<Eigen::Lower>() * z;
    }
  }
  return samples;
}

} // namespace mobo::gp
