#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mobo/cdf_indicator.hpp"
#include "mobo/pareto.hpp"

using namespace mobo;
using copula::CdfMethod;
using copula::Family;
using indicators::CdfEstimator;

namespace {

Matrix random_reference(std::size_t n, int m, std::uint64_t seed) {
  auto rng = seeded_rng(seed);
  std::normal_distribution<double> gauss;
  Matrix y(n, m);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double shared = gauss(rng);
    for (int j = 0; j < m; ++j) y(i, j) = shared + 0.8 * gauss(rng);
  }
  return y;
}

std::vector<Vector> rows_of(const Matrix& a) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    out.push_back(a.row(i).transpose());
  return out;
}

} // namespace

TEST_CASE("margin map reproduces averaged ranks and interpolates between") {
  Matrix ref(10, 2);
  // Column 0 has order statistics 10..100 with a tie at 40 (ranks 4 and 5).
  ref.col(0) << 30.0, 10.0, 40.0, 70.0, 20.0, 40.0, 90.0, 60.0, 100.0, 80.0;
  ref.col(1) << 0.1, 0.6, 0.2, 0.9, 0.4, 0.3, 0.8, 0.5, 1.0, 0.7;
  const CdfEstimator est(ref, Family::gaussian);
  auto u0 = [&](double y) {
    return est.to_pseudo((Vector(2) << y, 0.5).finished())[0];
  };

  CHECK(u0(10.0) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(u0(30.0) == doctest::Approx(3.0 / 11.0).epsilon(1e-15));
  CHECK(u0(40.0) == doctest::Approx(4.5 / 11.0).epsilon(1e-15)); // tied pair
  CHECK(u0(100.0) == doctest::Approx(10.0 / 11.0).epsilon(1e-15));

  // Halfway between the order statistics 20 and 30.
  CHECK(u0(25.0) == doctest::Approx(2.5 / 11.0).epsilon(1e-12));

  // Outside the observed range: clamped to the edge ranks.
  CHECK(u0(-100.0) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(u0(1e6) == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("margin map is monotone across exact hits and gaps") {
  const Matrix ref = random_reference(40, 2, 5);
  const CdfEstimator est(ref, Family::gaussian);
  auto rng = seeded_rng(6);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = unif(rng), b = unif(rng);
    Vector ya(2), yb(2);
    ya << std::min(a, b), 0.0;
    yb << std::max(a, b), 0.0;
    CHECK(est.to_pseudo(ya)[0] <= est.to_pseudo(yb)[0]);
  }
  // An exact reference value against nearby queries.
  const double v = ref(7, 0);
  Vector lo(2), at(2), hi(2);
  lo << v - 1e-9, 0.0;
  at << v, 0.0;
  hi << v + 1e-9, 0.0;
  CHECK(est.to_pseudo(lo)[0] <= est.to_pseudo(at)[0]);
  CHECK(est.to_pseudo(at)[0] <= est.to_pseudo(hi)[0]);
}

TEST_CASE("indicator is the best score over the set") {
  const Matrix ref = random_reference(80, 3, 11);
  const CdfEstimator est(ref, Family::gaussian);
  const auto all = est.scores(ref);
  const double best = *std::max_element(all.begin(), all.end());
  CHECK(est.indicator(ref).value == best);
  CHECK(est.indicator(ref).kind == indicators::IndicatorKind::cdf);

  // The componentwise maximum is the largest score the estimator can give.
  Matrix cmax(1, 3);
  for (int m = 0; m < 3; ++m) cmax(0, m) = ref.col(m).maxCoeff();
  CHECK(est.indicator(cmax).value >= best);
}

TEST_CASE("dominance ordering of sets is never violated") {
  auto rng = seeded_rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> size_dist(1, 6);
  int checked = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 2 + rep % 2;
    const Matrix ref = random_reference(60, m, 1000 + rep);
    const CdfEstimator est(ref, Family::gaussian, CdfMethod::mc);

    const int nb = size_dist(rng);
    Matrix b(nb, m);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < m; ++j) b(i, j) = 2.0 * unif(rng) - 1.0;
    // Cover every b by a weakly-dominating a, plus an extra stray point.
    Matrix a(nb + 1, m);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = b(i, j) + 0.5 * unif(rng);
    for (int j = 0; j < m; ++j) a(nb, j) = 2.0 * unif(rng) - 1.0;

    const auto ra = rows_of(a);
    const auto rb = rows_of(b);
    if (!pareto::set_weakly_dominates(ra, rb) ||
        pareto::set_weakly_dominates(rb, ra))
      continue;
    ++checked;
    CHECK(est.indicator(a).value >= est.indicator(b).value);
  }
  CHECK(checked >= 30);
}

TEST_CASE("bit-identical under strictly increasing maps of both sides") {
  const Matrix ref = random_reference(60, 3, 23);
  Matrix a(7, 3);
  for (int i = 0; i < 7; ++i) a.row(i) = ref.row(5 * i + 2);

  Matrix tref = ref, ta = a;
  auto warp = [](Matrix& y) {
    y.col(0) *= 1000.0;
    y.col(1) = y.col(1).array().exp().matrix();
    y.col(2) = (y.col(2).array().cube() + y.col(2).array()).matrix();
  };
  warp(tref);
  warp(ta);

  const CdfEstimator est(ref, Family::gaussian, CdfMethod::mc);
  const CdfEstimator test(tref, Family::gaussian, CdfMethod::mc);
  CHECK(est.indicator(a).value == test.indicator(ta).value);

  const auto top = indicators::greedy_topk_cdf(est, ref, 5);
  const auto ttop = indicators::greedy_topk_cdf(test, tref, 5);
  CHECK(top == ttop);
}

TEST_CASE("only the pareto front matters") {
  const Matrix ref = random_reference(70, 2, 31);
  Matrix a(15, 2);
  auto rng = seeded_rng(32);
  std::normal_distribution<double> gauss;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = gauss(rng);
  const CdfEstimator est(ref, Family::gaussian, CdfMethod::mc);

  const auto front = pareto::pareto_front(rows_of(a));
  Matrix fm(front.members.size(), 2);
  for (std::size_t i = 0; i < front.members.size(); ++i)
    fm.row(i) = front.members[i].transpose();
  CHECK(est.indicator(a).value == est.indicator(fm).value);
}

TEST_CASE("validation errors") {
  const Matrix ref = random_reference(40, 2, 41);
  const CdfEstimator est(ref, Family::gaussian);
  CHECK_THROWS_AS(est.indicator(Matrix(0, 2)), Error);
  CHECK_THROWS_AS(est.score(Vector::Constant(3, 0.5).eval()), Error);
  CHECK_THROWS_AS(CdfEstimator(random_reference(5, 2, 42), Family::gaussian),
                  Error);
}
