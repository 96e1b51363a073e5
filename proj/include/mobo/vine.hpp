#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mobo/bivariate.hpp"
#include "mobo/common.hpp"

namespace mobo::copula {

/// One pair copula in the vine. The conditioned pair (a, b) with a < b and
/// the sorted conditioning set identify the edge; `variables` is the bitmask
/// of all of them. An edge in tree t has t-1 conditioning variables.
struct VineEdge {
  int a = 0;
  int b = 0;
  std::vector<int> conditioning;
  std::uint32_t variables = 0;
  double tau = 0.0; // empirical tau of the (conditional) pseudo-observations
  BivariateCopula copula;
};

/// Structure-and-family skeleton of a vine: what to fit, not the fit itself.
/// Loading one fixes the trees and the per-edge family policy while
/// parameters are still estimated from data.
struct VineSpecEdge {
  int a = 0;
  int b = 0;
  std::vector<int> conditioning;
  Family family = Family::gaussian;
};

struct VineSpec {
  int dim = 0;
  std::vector<std::vector<VineSpecEdge>> trees;

  static VineSpec from_json_text(const std::string& text);
  std::string to_json_text() const;
};

/// How VineCopula::cdf evaluates the joint CDF.
///   mc             - count cached samples inside the lower-left box
///   exact_gaussian - multivariate-normal rectangle; requires every edge
///                    gaussian or independence
///   auto_policy    - exact for an all-gaussian vine in two dimensions,
///                    Monte Carlo otherwise
enum class CdfMethod { auto_policy, mc, exact_gaussian };

/// Regular vine fitted on pseudo-observations: maximum-spanning trees on
/// |tau| with conditional pseudo-observations threaded through h-functions.
/// Immutable once fitted; the cached sample set makes scoring many query
/// points against one shared estimator cheap and consistent.
class VineCopula {
public:
  static constexpr int kDefaultCacheSize = 10000;
  static constexpr std::uint64_t kDefaultCacheSeed = 0x76696e65ULL;

  /// u: n x M pseudo-observations in (0,1). One family policy for all edges.
  static VineCopula fit(const Matrix& u, Family policy,
                        int cache_size = kDefaultCacheSize,
                        std::uint64_t cache_seed = kDefaultCacheSeed);

  /// Fit with user-fixed structure and per-edge families.
  static VineCopula fit(const Matrix& u, const VineSpec& spec,
                        int cache_size = kDefaultCacheSize,
                        std::uint64_t cache_seed = kDefaultCacheSeed);

  int dim() const { return dim_; }
  std::size_t fitted_n() const { return fitted_n_; }
  const std::vector<std::vector<VineEdge>>& trees() const { return trees_; }
  bool all_gaussian() const { return all_gaussian_; }
  int cache_size() const { return cache_size_; }
  std::uint64_t cache_seed() const { return cache_seed_; }

  /// n x M draws by top-down conditional inversion. Deterministic in seed.
  Matrix sample(std::size_t n, std::uint64_t seed) const;

  /// P(U_1 <= u_1, ..., U_M <= u_M). Monte-Carlo calls with the default
  /// (mc_size, mc_seed) reuse the cache built at fit time, so every query in
  /// a scoring round shares one estimator.
  double cdf(std::span<const double> u,
             CdfMethod method = CdfMethod::auto_policy,
             int mc_size = kDefaultCacheSize,
             std::uint64_t mc_seed = kDefaultCacheSeed) const;

  /// Correlation matrix implied by an all-gaussian vine (partial
  /// correlations completed tree by tree). Errors otherwise.
  Matrix gaussian_correlation() const;

  VineSpec spec() const;
  std::string to_json_text() const; // structure, families, parameters

private:
  VineCopula() = default;

  struct Workspace;

  static VineCopula fit_impl(const Matrix& u, Family policy,
                             const VineSpec* spec, int cache_size,
                             std::uint64_t cache_seed);
  void build_sampling_plan();
  void build_cache();
  const VineEdge* edge_for(std::uint32_t variables) const;
  bool plan_var(int v, std::uint32_t mask,
                std::vector<std::uint32_t>& chain) const;
  double eval_cond(int v, std::uint32_t mask, const double* x,
                   Workspace& ws) const;
  void sample_into(std::span<double> row, std::mt19937_64& rng,
                   Workspace& ws) const;

  int dim_ = 0;
  std::size_t fitted_n_ = 0;
  std::vector<std::vector<VineEdge>> trees_;
  bool all_gaussian_ = true;

  std::vector<int> sample_order_;
  // Per order entry: the constraint-set masks of the inverse-h chain, from
  // the full conditioning set down to the first tree.
  std::vector<std::vector<std::uint32_t>> descent_;

  int cache_size_ = 0;
  std::uint64_t cache_seed_ = 0;
  std::vector<double> cache_; // dimension-major: cache_[d*k + i]
};

} // namespace mobo::copula
