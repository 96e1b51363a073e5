#include "mobo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mobo/hypervolume.hpp"
#include "mobo/pit.hpp"
#include "mobo/stats.hpp"

namespace mobo::acquisition {

namespace {

constexpr std::uint64_t kCacheTag = 0x62746431; // vine-cache stream

void validate_samples(const gp::PosteriorSamples& samples) {
  require(!samples.values.empty(), "acquisition: no posterior samples");
  const auto rows = samples.values.front().rows();
  const auto cols = samples.values.front().cols();
  require(rows >= 1 && cols >= 2, "acquisition: bad sample shape");
  for (const auto& v : samples.values)
    require(v.rows() == rows && v.cols() == cols,
            "acquisition: ragged posterior samples");
}

void validate_spec(const AcquisitionSpec& spec) {
  require(spec.mc_cdf_samples >= 1000,
          "acquisition: mc_cdf_samples must be at least 1000");
  require(spec.chebyshev_rho >= 0.0,
          "acquisition: chebyshev_rho must be nonnegative");
}

Matrix pool_rows(const gp::PosteriorSamples& samples) {
  const auto l = samples.values.size();
  const auto n = samples.values.front().rows();
  const auto m = samples.values.front().cols();
  Matrix pooled(static_cast<Eigen::Index>(l) * n, m);
  for (std::size_t j = 0; j < l; ++j)
    pooled.middleRows(static_cast<Eigen::Index>(j) * n, n) = samples.values[j];
  return pooled;
}

} // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::botied_v1: return "botied_v1";
    case Kind::botied_v2: return "botied_v2";
    case Kind::nehvi: return "nehvi";
    case Kind::nparego: return "nparego";
    case Kind::random_pick: return "random";
  }
  return "unknown";
}

Kind kind_from_name(const std::string& name) {
  if (name == "botied_v1") return Kind::botied_v1;
  if (name == "botied_v2") return Kind::botied_v2;
  if (name == "nehvi") return Kind::nehvi;
  if (name == "nparego") return Kind::nparego;
  if (name == "random") return Kind::random_pick;
  throw Error("unknown acquisition kind: " + name);
}

AcquisitionScores botied_v1(const gp::PosteriorSamples& samples,
                            std::size_t batch, const AcquisitionSpec& spec) {
  validate_samples(samples);
  validate_spec(spec);
  const auto l = samples.values.size();
  const auto n = static_cast<std::size_t>(samples.values.front().rows());
  require(batch <= n, "acquisition: batch larger than pool");

  const Matrix u = copula::pit_transform(pool_rows(samples)).u;
  const auto vine = copula::VineCopula::fit(
      u, spec.family_policy, spec.mc_cdf_samples,
      mix_seed(spec.seed, kCacheTag));

  AcquisitionScores out;
  out.scores.assign(n, 0.0);
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(j * n + i);
      const Vector q = u.row(row).transpose();
      out.scores[i] += vine.cdf(std::span<const double>(q.data(), q.size()),
                                copula::CdfMethod::auto_policy,
                                spec.mc_cdf_samples,
                                mix_seed(spec.seed, kCacheTag));
    }
  for (auto& s : out.scores) s /= static_cast<double>(l);
  out.selected = indicators::topk_scores(out.scores, batch);
  return out;
}

AcquisitionScores botied_v2(const gp::PosteriorSamples& samples,
                            std::size_t batch, const AcquisitionSpec& spec) {
  validate_samples(samples);
  validate_spec(spec);
  const auto l = samples.values.size();
  const auto n = static_cast<std::size_t>(samples.values.front().rows());
  const auto m = samples.values.front().cols();
  require(batch <= n, "acquisition: batch larger than pool");

  const Matrix u = copula::pit_transform(pool_rows(samples)).u;
  Matrix averaged = Matrix::Zero(static_cast<Eigen::Index>(n), m);
  for (std::size_t j = 0; j < l; ++j)
    averaged += u.middleRows(static_cast<Eigen::Index>(j * n),
                             static_cast<Eigen::Index>(n));
  averaged /= static_cast<double>(l);

  // Pools too small to fit on the averaged rows borrow the sample-level fit;
  // scoring still happens at the averaged rows.
  const auto vine = copula::VineCopula::fit(
      averaged.rows() >= 10 ? averaged : u, spec.family_policy,
      spec.mc_cdf_samples, mix_seed(spec.seed, kCacheTag));

  AcquisitionScores out;
  out.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector q = averaged.row(static_cast<Eigen::Index>(i)).transpose();
    out.scores[i] = vine.cdf(std::span<const double>(q.data(), q.size()),
                             copula::CdfMethod::auto_policy,
                             spec.mc_cdf_samples,
                             mix_seed(spec.seed, kCacheTag));
  }
  out.selected = indicators::topk_scores(out.scores, batch);
  return out;
}

AcquisitionScores nehvi(const gp::PosteriorSamples& pool_samples,
                        const gp::PosteriorSamples& observed_samples,
                        const Vector& ref, std::size_t batch) {
  validate_samples(pool_samples);
  validate_samples(observed_samples);
  const auto l = pool_samples.values.size();
  require(observed_samples.values.size() == l,
          "nehvi: observed and pool sample counts differ");
  const auto n = static_cast<std::size_t>(pool_samples.values.front().rows());
  const auto m = pool_samples.values.front().cols();
  require(observed_samples.values.front().cols() == m,
          "nehvi: objective dimension mismatch");
  require(ref.size() == m, "nehvi: reference point dimension mismatch");
  require(batch <= n, "nehvi: batch larger than pool");

  // Per posterior draw: the sampled objective vectors at observed designs.
  std::vector<std::vector<Vector>> fronts(l);
  for (std::size_t j = 0; j < l; ++j) {
    const Matrix& obs = observed_samples.values[j];
    fronts[j].reserve(obs.rows());
    for (Eigen::Index r = 0; r < obs.rows(); ++r)
      fronts[j].push_back(obs.row(r).transpose());
  }

  auto score_all = [&](std::vector<double>& scores) {
    scores.assign(n, 0.0);
    for (std::size_t j = 0; j < l; ++j) {
      const Matrix& vals = pool_samples.values[j];
      for (std::size_t i = 0; i < n; ++i)
        scores[i] += indicators::hv_improvement(
            fronts[j], vals.row(static_cast<Eigen::Index>(i)).transpose(),
            ref);
    }
    for (auto& s : scores) s /= static_cast<double>(l);
  };

  AcquisitionScores out;
  score_all(out.scores);
  std::vector<double> current = out.scores;
  std::vector<bool> taken(n, false);
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best == n || current[i] > current[best]) best = i;
    }
    out.selected.push_back(best);
    taken[best] = true;
    if (b + 1 == batch) break;
    // Condition every sampled front on the pick and rescore the rest.
    for (std::size_t j = 0; j < l; ++j)
      fronts[j].push_back(pool_samples.values[j]
                              .row(static_cast<Eigen::Index>(best))
                              .transpose());
    score_all(current);
  }
  return out;
}

double chebyshev_scalarization(const Vector& y, const std::vector<double>& w,
                               double rho) {
  require(static_cast<std::size_t>(y.size()) == w.size(),
          "chebyshev: weight dimension mismatch");
  double lo = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (Eigen::Index m = 0; m < y.size(); ++m) {
    const double t = w[static_cast<std::size_t>(m)] * y[m];
    lo = std::min(lo, t);
    sum += t;
  }
  return lo + rho * sum;
}

AcquisitionScores nparego(const gp::PosteriorSamples& pool_samples,
                          const gp::PosteriorSamples& observed_samples,
                          const Matrix& observed_objectives, std::size_t batch,
                          const AcquisitionSpec& spec) {
  validate_samples(pool_samples);
  validate_samples(observed_samples);
  validate_spec(spec);
  const auto l = pool_samples.values.size();
  require(observed_samples.values.size() == l,
          "nparego: observed and pool sample counts differ");
  const auto n = static_cast<std::size_t>(pool_samples.values.front().rows());
  const auto m = pool_samples.values.front().cols();
  require(observed_objectives.rows() >= 1, "nparego: empty observed set");
  require(observed_objectives.cols() == m,
          "nparego: objective dimension mismatch");
  require(batch <= n, "nparego: batch larger than pool");

  // Min-max normalization from the currently observed objective range.
  Vector lo(m), range(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    lo[c] = observed_objectives.col(c).minCoeff();
    range[c] =
        std::max(observed_objectives.col(c).maxCoeff() - lo[c], 1e-12);
  }
  auto normalize = [&](const Vector& y) -> Vector {
    return (y - lo).cwiseQuotient(range);
  };

  AcquisitionScores out;
  std::vector<bool> taken(n, false);
  for (std::size_t b = 0; b < batch; ++b) {
    auto rng = seeded_rng(spec.seed, 0x70676f, b);
    const auto w = stats::simplex_sample(static_cast<int>(m), rng);

    std::vector<double> incumbent(l, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < l; ++j) {
      const Matrix& obs = observed_samples.values[j];
      for (Eigen::Index r = 0; r < obs.rows(); ++r)
        incumbent[j] = std::max(
            incumbent[j],
            chebyshev_scalarization(normalize(obs.row(r).transpose()), w,
                                    spec.chebyshev_rho));
    }

    std::vector<double> scores(n, 0.0);
    for (std::size_t j = 0; j < l; ++j) {
      const Matrix& vals = pool_samples.values[j];
      for (std::size_t i = 0; i < n; ++i) {
        const double s = chebyshev_scalarization(
            normalize(vals.row(static_cast<Eigen::Index>(i)).transpose()), w,
            spec.chebyshev_rho);
        scores[i] += std::max(0.0, s - incumbent[j]);
      }
    }
    for (auto& s : scores) s /= static_cast<double>(l);

    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (best == n || scores[i] > scores[best]) best = i;
    }
    out.selected.push_back(best);
    taken[best] = true;
    if (b == 0) out.scores = scores;
  }
  return out;
}

AcquisitionScores random_select(std::size_t pool_size, std::size_t batch,
                                std::uint64_t seed) {
  require(batch <= pool_size, "random_select: batch larger than pool");
  std::vector<std::size_t> perm(pool_size);
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = seeded_rng(seed, 0x726e64);
  for (std::size_t i = 0; i < batch; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool_size - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  AcquisitionScores out;
  out.scores.assign(pool_size, 0.0);
  out.selected.assign(perm.begin(),
                      perm.begin() + static_cast<std::ptrdiff_t>(batch));
  return out;
}

} // namespace mobo::acquisition
