// Acceptance checks for the toolkit: each criterion prints one PASS/FAIL
// line with a short detail and its runtime.  The process exit code is the
// number of failed criteria.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <mobo/acquisition.hpp>
#include <mobo/bivariate.hpp>
#include <mobo/cdf_indicator.hpp>
#include <mobo/common.hpp>
#include <mobo/gp.hpp>
#include <mobo/harness.hpp>
#include <mobo/hypervolume.hpp>
#include <mobo/pareto.hpp>
#include <mobo/pit.hpp>
#include <mobo/stats.hpp>
#include <mobo/testbed.hpp>
#include <mobo/vine.hpp>

using mobo::Matrix;
using mobo::Vector;
namespace acq = mobo::acquisition;
namespace cop = mobo::copula;
namespace ind = mobo::indicators;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<Vector> rows_of(const Matrix& m) {
  std::vector<Vector> out;
  for (int i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
  return out;
}

Matrix normal_matrix(int n, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out(i, j) = gauss(rng);
  }
  return out;
}

// Criterion 1: set-level dominance consistency of the CDF indicator with the
// shared-cache estimator, 200 generated pairs, zero violations, under 2 min.
bool criterion_dominance_consistency(std::string& detail) {
  const double t0 = now_seconds();
  int done = 0, violations = 0;
  std::uint64_t sub = 0;
  while (done < 200) {
    auto rng = mobo::seeded_rng(101, sub++);
    const int m = 2 + done % 3;
    std::uniform_int_distribution<int> size_dist(1, 10);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Matrix reference = normal_matrix(200, m, rng);
    const int nb = size_dist(rng), na = size_dist(rng);
    const Matrix b_set = normal_matrix(nb, m, rng);
    Matrix a_set(na, m);
    for (int i = 0; i < na; ++i) {
      a_set.row(i) = b_set.row(i % nb);
      for (int j = 0; j < m; ++j) {
        if (unif(rng) < 0.8) a_set(i, j) += 2.0 * unif(rng);
      }
    }
    const auto a_rows = rows_of(a_set);
    const auto b_rows = rows_of(b_set);
    if (!mobo::pareto::set_weakly_dominates(a_rows, b_rows)) continue;
    if (mobo::pareto::set_weakly_dominates(b_rows, a_rows)) continue;
    const ind::CdfEstimator est(reference, cop::Family::gaussian,
                                cop::CdfMethod::mc);
    if (est.indicator(a_set).value < est.indicator(b_set).value) ++violations;
    ++done;
  }
  const double dt = now_seconds() - t0;
  char buf[120];
  std::snprintf(buf, sizeof buf, "200 pairs, %d violations, %.0fs", violations, dt);
  detail = buf;
  return violations == 0 && dt < 120.0;
}

// Criterion 2: monotone rescaling of any one objective column leaves
// pseudo-observations bit-identical and every rank-based selection unchanged.
bool criterion_rescaling_invariance(std::string& detail) {
  const std::vector<std::function<double(double)>> maps = {
      [](double x) { return 1000.0 * x; },
      [](double x) { return std::exp(x); },
      [](double x) { return x * x * x + x; }};
  const int m = 3;
  auto rng = mobo::seeded_rng(202);
  int checks = 0, failures = 0;

  const Matrix raw = normal_matrix(40, m, rng);
  mobo::gp::PosteriorSamples samples;
  samples.seed = 0;
  for (int l = 0; l < 8; ++l) samples.values.push_back(normal_matrix(30, m, rng));
  const Matrix points = normal_matrix(60, m, rng);

  acq::AcquisitionSpec spec;
  spec.seed = 77;
  const auto v1_base = acq::botied_v1(samples, 5, spec).selected;
  const auto v2_base = acq::botied_v2(samples, 5, spec).selected;
  const Matrix u_base = cop::pit_transform(raw).u;
  const ind::CdfEstimator est_base(points, cop::Family::gaussian);
  const auto top5_base = ind::greedy_topk_cdf(est_base, points, 5);

  for (const auto& map : maps) {
    for (int col = 0; col < m; ++col) {
      Matrix raw2 = raw;
      for (int i = 0; i < raw2.rows(); ++i) raw2(i, col) = map(raw2(i, col));
      ++checks;
      if (!(cop::pit_transform(raw2).u.array() == u_base.array()).all()) ++failures;

      mobo::gp::PosteriorSamples warped = samples;
      for (auto& v : warped.values) {
        for (int i = 0; i < v.rows(); ++i) v(i, col) = map(v(i, col));
      }
      ++checks;
      if (acq::botied_v1(warped, 5, spec).selected != v1_base) ++failures;
      ++checks;
      if (acq::botied_v2(warped, 5, spec).selected != v2_base) ++failures;

      Matrix points2 = points;
      for (int i = 0; i < points2.rows(); ++i) points2(i, col) = map(points2(i, col));
      const ind::CdfEstimator est2(points2, cop::Family::gaussian);
      ++checks;
      if (ind::greedy_topk_cdf(est2, points2, 5) != top5_base) ++failures;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d exact-equality checks, %d failures", checks,
                failures);
  detail = buf;
  return failures == 0;
}

// Criterion 3: hypervolume agrees with a million-sample rejection estimate on
// random fronts and with an independent sweep in 2-D, under 5 min.
bool criterion_hypervolume_oracle(std::string& detail) {
  const double t0 = now_seconds();
  int failures = 0;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto rng = mobo::seeded_rng(303, std::uint64_t(trial));
    const int m = 2 + trial % 4;
    std::uniform_int_distribution<int> size_dist(3, 15);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    const int n = size_dist(rng);
    Matrix front(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) front(i, j) = unif(rng);
    }
    const Vector ref = Vector::Constant(m, -0.05);
    const auto front_rows = rows_of(front);
    const double hv = ind::hypervolume(front_rows, ref);

    if (m == 2) {
      // Independent 2-D check: sort by first coordinate descending and sum
      // strips of exclusive height.
      std::vector<std::pair<double, double>> pts;
      for (int i = 0; i < n; ++i) pts.emplace_back(front(i, 0), front(i, 1));
      std::sort(pts.begin(), pts.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      double sweep = 0.0, best_y = ref[1];
      for (const auto& [x, y] : pts) {
        if (y > best_y) {
          sweep += (x - ref[0]) * (y - best_y);
          best_y = y;
        }
      }
      if (std::abs(sweep - hv) > 1e-12 * std::max(1.0, std::abs(sweep))) {
        ++failures;
        continue;
      }
    }

    Vector upper(m);
    for (int j = 0; j < m; ++j) upper[j] = front.col(j).maxCoeff();
    double box = 1.0;
    for (int j = 0; j < m; ++j) box *= upper[j] - ref[j];
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    long hits = 0;
    const long samples = 1000000;
    Vector y(m);
    for (long s = 0; s < samples; ++s) {
      for (int j = 0; j < m; ++j) y[j] = ref[j] + u01(rng) * (upper[j] - ref[j]);
      for (int i = 0; i < n; ++i) {
        bool dom = true;
        for (int j = 0; j < m; ++j) {
          if (front(i, j) < y[j]) {
            dom = false;
            break;
          }
        }
        if (dom) {
          ++hits;
          break;
        }
      }
    }
    const double mc = box * double(hits) / double(samples);
    const double rel = std::abs(mc - hv) / std::max(hv, 1e-12);
    worst_rel = std::max(worst_rel, rel);
    if (rel > 0.01) ++failures;
  }
  const double dt = now_seconds() - t0;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "50 fronts, %d failures, worst relative gap %.4f, %.0fs", failures,
                worst_rel, dt);
  detail = buf;
  return failures == 0 && dt < 300.0;
}

// Criterion 4: parameter recovery for known bivariate families and
// independence detection on independent data.
bool criterion_copula_roundtrip(std::string& detail) {
  const int n = 5000;
  auto sample_pairs = [n](const cop::BivariateCopula& c, std::uint64_t seed) {
    auto rng = mobo::seeded_rng(404, seed);
    std::uniform_real_distribution<double> unif(1e-9, 1.0 - 1e-9);
    Matrix out(n, 2);
    for (int i = 0; i < n; ++i) {
      const double u = unif(rng), w = unif(rng);
      out(i, 0) = u;
      out(i, 1) = c.h1_inv(u, w);
    }
    return out;
  };
  auto fit_on = [](const Matrix& raw, cop::Family policy) {
    const Matrix u = cop::pit_transform(raw).u;
    std::vector<double> u1(u.rows()), u2(u.rows());
    for (int i = 0; i < u.rows(); ++i) {
      u1[std::size_t(i)] = u(i, 0);
      u2[std::size_t(i)] = u(i, 1);
    }
    return cop::BivariateCopula::fit(u1, u2, policy);
  };

  const auto g = fit_on(sample_pairs(cop::BivariateCopula::gaussian(0.7), 1),
                        cop::Family::gaussian);
  const bool g_ok = g.family() == cop::Family::gaussian && g.parameter() >= 0.65 &&
                    g.parameter() <= 0.75;

  const auto c = fit_on(sample_pairs(cop::BivariateCopula::clayton(2.0), 2),
                        cop::Family::clayton);
  const bool c_ok = c.family() == cop::Family::clayton && c.parameter() >= 1.6 &&
                    c.parameter() <= 2.4;

  auto rng = mobo::seeded_rng(404, 3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix indep(n, 2);
  for (int i = 0; i < n; ++i) {
    indep(i, 0) = unif(rng);
    indep(i, 1) = unif(rng);
  }
  const auto i1 = fit_on(indep, cop::Family::gaussian);
  const auto i2 = fit_on(indep, cop::Family::clayton);
  const bool i_ok = i1.family() == cop::Family::independence &&
                    i2.family() == cop::Family::independence;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rho_hat %.3f, theta_hat %.3f, independence %s", g.parameter(),
                c.parameter(), i_ok ? "detected" : "missed");
  detail = buf;
  return g_ok && c_ok && i_ok;
}

// Criterion 5: desk-scale benchmark bands on the two-objective problem,
// five replicate seeds, under 30 min.
bool criterion_benchmark_bands(std::string& detail) {
  const double t0 = now_seconds();
  struct Job {
    acq::Kind kind;
    std::uint64_t seed;
    double hv = 0.0, cdf = 0.0;
    std::string error;
  };
  std::vector<Job> jobs;
  for (const acq::Kind kind : {acq::Kind::botied_v1, acq::Kind::random_pick}) {
    for (std::uint64_t s = 0; s < 5; ++s) jobs.push_back({kind, s, 0.0, 0.0, {}});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      mobo::harness::RunConfig cfg;
      cfg.problem.name = "branin_currin";
      cfg.acquisition.kind = jobs[i].kind;
      cfg.iterations = 30;
      cfg.batch = 4;
      cfg.posterior_samples = 20;
      cfg.seed = jobs[i].seed;
      try {
        const auto rec = mobo::harness::run_bo(cfg);
        jobs[i].hv = rec.final_hypervolume;
        jobs[i].cdf = rec.final_cdf;
      } catch (const std::exception& e) {
        jobs[i].error = e.what();
      }
    }
  };
  const unsigned n_threads =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 10u);
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  double bo_hv = 0.0, bo_cdf = 0.0, rnd_hv = 0.0;
  for (const Job& j : jobs) {
    if (!j.error.empty()) {
      detail = "run failed: " + j.error;
      return false;
    }
    if (j.kind == acq::Kind::botied_v1) {
      bo_hv += j.hv / 5.0;
      bo_cdf += j.cdf / 5.0;
    } else {
      rnd_hv += j.hv / 5.0;
    }
  }
  const double dt = now_seconds() - t0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "cdf mean %.3f in [0.60,0.90], hv mean %.0f in [850,1450], "
                "random hv mean %.0f in [900,1450], %.0fs",
                bo_cdf, bo_hv, rnd_hv, dt);
  detail = buf;
  return bo_cdf >= 0.60 && bo_cdf <= 0.90 && bo_hv >= 850.0 && bo_hv <= 1450.0 &&
         rnd_hv >= 900.0 && rnd_hv <= 1450.0 && dt < 1800.0;
}

// Criterion 6: acquisition timing ordering at six objectives and growth
// ratio from two to six objectives.
bool criterion_timing_ordering(std::string& detail) {
  mobo::harness::TimingConfig tc;
  tc.m_list = {2, 6};
  tc.kinds = {acq::Kind::botied_v1, acq::Kind::nehvi};
  tc.repeats = 7;
  tc.pool_size = 100;
  tc.posterior_samples = 20;
  tc.front_size = 30;
  const auto rows = mobo::harness::timing_benchmark(tc);
  double b2 = 0.0, b6 = 0.0, n2 = 0.0, n6 = 0.0;
  for (const auto& r : rows) {
    if (r.method == "botied_v1" && r.m == 2) b2 = r.median_seconds;
    if (r.method == "botied_v1" && r.m == 6) b6 = r.median_seconds;
    if (r.method == "nehvi" && r.m == 2) n2 = r.median_seconds;
    if (r.method == "nehvi" && r.m == 6) n6 = r.median_seconds;
  }
  const double b_ratio = b6 / std::max(b2, 1e-12);
  const double n_ratio = n6 / std::max(n2, 1e-12);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "m=6 medians %.4fs vs %.4fs, growth ratios %.1fx vs %.1fx", b6, n6,
                b_ratio, n_ratio);
  detail = buf;
  return b6 < n6 && n_ratio > b_ratio;
}

// Criterion 7: a candidate whose samples dominate every other candidate's in
// every draw is picked first by all sample-based acquisitions.
bool criterion_dominant_candidate(std::string& detail) {
  int failures = 0;
  for (int inst = 0; inst < 20; ++inst) {
    auto rng = mobo::seeded_rng(707, std::uint64_t(inst));
    const int m = 2 + inst % 3;
    const int L = 5;
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    Matrix base = normal_matrix(3, m, rng);
    const std::size_t star = std::uint64_t(rng()) % 3;
    for (int j = 0; j < m; ++j) {
      double best = -1e300;
      for (int i = 0; i < 3; ++i) {
        if (std::size_t(i) != star) best = std::max(best, base(i, j));
      }
      base(star, j) = best + 2.0;
    }
    mobo::gp::PosteriorSamples pool_samples, observed_samples;
    pool_samples.seed = observed_samples.seed = 0;
    const Matrix observed = base.colwise().minCoeff().array() - 2.0;
    for (int l = 0; l < L; ++l) {
      Matrix pv = base;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < m; ++j) pv(i, j) += unif(rng);
      }
      Matrix ov(2, m);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < m; ++j) ov(i, j) = observed(0, j) + unif(rng);
      }
      pool_samples.values.push_back(std::move(pv));
      observed_samples.values.push_back(std::move(ov));
    }
    Vector ref(m);
    for (int j = 0; j < m; ++j) ref[j] = observed(0, j) - 1.0;
    acq::AcquisitionSpec spec;
    spec.seed = std::uint64_t(inst);
    if (acq::botied_v1(pool_samples, 1, spec).selected[0] != star) ++failures;
    if (acq::botied_v2(pool_samples, 1, spec).selected[0] != star) ++failures;
    if (acq::nehvi(pool_samples, observed_samples, ref, 1).selected[0] != star) {
      ++failures;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "20 instances x 3 methods, %d wrong first picks",
                failures);
  detail = buf;
  return failures == 0;
}

// Criterion 8: with all tail variables at 0.5 the objective vector lies on
// the unit sphere to 1e-12.
bool criterion_sphere_identity(std::string& detail) {
  double worst = 0.0;
  auto rng = mobo::seeded_rng(808);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int m : {4, 6, 8}) {
    for (int rep = 0; rep < 100; ++rep) {
      Vector x = Vector::Constant(9, 0.5);
      for (int i = 0; i < m - 1; ++i) x[i] = unif(rng);
      const Vector f = mobo::testbed::dtlz2(x, m);
      worst = std::max(worst, std::abs(f.squaredNorm() - 1.0));
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "300 draws, worst |sum f^2 - 1| = %.2e", worst);
  detail = buf;
  return worst <= 1e-12;
}

// Criterion 9: dependent-pool generator tau, range, and bit-exact
// regeneration.
bool criterion_pool_generator(std::string& detail) {
  const auto pool = mobo::testbed::copulabc_generate(5000, 2.0, 7);
  std::span<const double> y1(pool.true_objectives.col(0).data(), 5000);
  std::span<const double> y2(pool.true_objectives.col(1).data(), 5000);
  const double tau = mobo::stats::kendall_tau(y1, y2);
  bool in_range = true;
  for (int i = 0; i < 5000 && in_range; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!(pool.true_objectives(i, j) > 0.0 && pool.true_objectives(i, j) < 1.0)) {
        in_range = false;
      }
    }
  }
  const auto again = mobo::testbed::copulabc_generate(5000, 2.0, 7);
  const bool exact =
      (pool.true_objectives.array() == again.true_objectives.array()).all() &&
      (pool.designs.array() == again.designs.array()).all();
  char buf[140];
  std::snprintf(buf, sizeof buf, "tau %.3f (target 0.5 +/- 0.03), range %s, regen %s",
                tau, in_range ? "ok" : "violated", exact ? "bit-exact" : "drifted");
  detail = buf;
  return std::abs(tau - 0.5) <= 0.03 && in_range && exact;
}

// Criterion 10: repeating a run with the same config and seed reproduces the
// trace exactly once wall times are masked.
bool criterion_run_determinism(std::string& detail) {
  mobo::harness::RunConfig cfg;
  cfg.problem.name = "branin_currin";
  cfg.acquisition.kind = acq::Kind::botied_v1;
  cfg.iterations = 5;
  cfg.batch = 4;
  cfg.pool_size = 200;
  cfg.posterior_samples = 10;
  cfg.seed = 11;
  auto masked_trace = [](const mobo::harness::RunRecord& rec) {
    std::string out;
    for (const auto& row : rec.rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,0,", row.iteration,
                    row.hypervolume, row.cdf_indicator);
      out += buf;
      for (std::size_t i = 0; i < row.selected.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(row.selected[i]);
      }
      out += '\n';
    }
    return out;
  };
  const auto a = mobo::harness::run_bo(cfg);
  const auto b = mobo::harness::run_bo(cfg);
  const bool same = masked_trace(a) == masked_trace(b);
  cfg.acquisition.kind = acq::Kind::nparego;
  const auto c = mobo::harness::run_bo(cfg);
  const auto d = mobo::harness::run_bo(cfg);
  const bool same2 = masked_trace(c) == masked_trace(d);
  detail = std::string("two methods rerun: ") +
           (same && same2 ? "traces identical modulo wall time" : "traces diverged");
  return same && same2;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "indicator dominance consistency", criterion_dominance_consistency},
      {2, "rescaling invariance", criterion_rescaling_invariance},
      {3, "hypervolume oracle equivalence", criterion_hypervolume_oracle},
      {4, "copula parameter recovery", criterion_copula_roundtrip},
      {5, "desk-scale benchmark bands", criterion_benchmark_bands},
      {6, "acquisition timing ordering", criterion_timing_ordering},
      {7, "dominant candidate selected first", criterion_dominant_candidate},
      {8, "sphere identity of the concave testbed", criterion_sphere_identity},
      {9, "dependent-pool generator", criterion_pool_generator},
      {10, "end-to-end run determinism", criterion_run_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const double t0 = now_seconds();
    std::string det;
    bool ok = false;
    try {
      ok = c.fn(det);
    } catch (const std::exception& e) {
      det = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::printf("%s  criterion %2d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", c.id,
                c.name, det.c_str(), now_seconds() - t0);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures,
              criteria.size());
  return failures;
}
