#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "mobo/pareto.hpp"

using namespace mobo;

namespace {

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

std::vector<Vector> random_points(std::mt19937_64& rng, std::size_t n, int m) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Vector> pts(n);
  for (auto& p : pts) {
    p.resize(m);
    for (int d = 0; d < m; ++d) p[d] = unif(rng);
  }
  return pts;
}

} // namespace

TEST_CASE("strict dominance") {
  CHECK(pareto::dominates(vec({1, 2}), vec({0, 1})));
  CHECK_FALSE(pareto::dominates(vec({1, 1}), vec({1, 1})));
  CHECK_FALSE(pareto::dominates(vec({1, 0}), vec({0, 1})));
  CHECK(pareto::dominates(vec({1, 1}), vec({1, 0})));
  CHECK_THROWS_AS(pareto::dominates(vec({1, 2}), vec({1, 2, 3})), Error);
}

TEST_CASE("weak dominance") {
  CHECK(pareto::weakly_dominates(vec({1, 1}), vec({1, 1})));
  CHECK(pareto::weakly_dominates(vec({2, 3}), vec({2, 2})));
  CHECK_FALSE(pareto::weakly_dominates(vec({1, 0}), vec({0, 1})));
}

TEST_CASE("dominance is antisymmetric and transitive on random triples") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 500; ++rep) {
    auto pts = random_points(rng, 3, 3);
    const auto &a = pts[0], &b = pts[1], &c = pts[2];
    const bool both = pareto::dominates(a, b) && pareto::dominates(b, a);
    CHECK_FALSE(both);
    if (pareto::dominates(a, b) && pareto::dominates(b, c))
      CHECK(pareto::dominates(a, c));
  }
}

TEST_CASE("pareto front on small hand cases") {
  auto front = pareto::pareto_front({vec({1, 2}), vec({2, 1}), vec({0, 0})});
  REQUIRE(front.members.size() == 2);
  CHECK(front.members[0] == vec({1, 2}));
  CHECK(front.members[1] == vec({2, 1}));
  CHECK(front.indices == std::vector<std::size_t>{0, 1});

  auto single = pareto::pareto_front({vec({1, 1})});
  REQUIRE(single.members.size() == 1);
  CHECK(single.members[0] == vec({1, 1}));

  CHECK_THROWS_AS(pareto::pareto_front({}), Error);
}

TEST_CASE("duplicate non-dominated values are kept once, first index wins") {
  auto front = pareto::pareto_front(
      {vec({0, 3}), vec({2, 2}), vec({2, 2}), vec({3, 0})});
  REQUIRE(front.members.size() == 3);
  CHECK(front.indices == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("pareto front equals brute-force filter on random 3-D points") {
  std::mt19937_64 rng(29);
  auto pts = random_points(rng, 50, 3);
  auto front = pareto::pareto_front(pts);

  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i && pareto::dominates(pts[j], pts[i])) keep = false;
    if (keep) expected.push_back(i);
  }
  CHECK(front.indices == expected);
}

TEST_CASE("pareto front is idempotent and weakly dominates its input") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto pts = random_points(rng, 40, 2 + rep % 3);
    auto front = pareto::pareto_front(pts);
    auto again = pareto::pareto_front(front.members);
    CHECK(again.members == front.members);
    CHECK(pareto::set_weakly_dominates(front.members, pts));
  }
}

TEST_CASE("set weak dominance matches exhaustive check") {
  CHECK(pareto::set_weakly_dominates({vec({2, 2})},
                                     {vec({1, 1}), vec({0, 2})}));
  CHECK_FALSE(pareto::set_weakly_dominates({vec({1, 0})}, {vec({0, 1})}));
  CHECK_THROWS_AS(pareto::set_weakly_dominates({}, {vec({0, 1})}), Error);

  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    auto A = random_points(rng, 4, 2);
    auto B = random_points(rng, 5, 2);
    bool expected = true;
    for (const auto& b : B) {
      bool covered = false;
      for (const auto& a : A)
        if (pareto::weakly_dominates(a, b)) covered = true;
      expected = expected && covered;
    }
    CHECK(pareto::set_weakly_dominates(A, B) == expected);
  }
}

TEST_CASE("dataset enforces shape and exposes matrices") {
  Dataset data(2, 2);
  data.add({vec({0.1, 0.2})}, vec({1.0, 2.0}), 0);
  data.add({vec({0.3, 0.4})}, vec({3.0, 4.0}), 1);
  CHECK(data.size() == 2);
  CHECK(data.design_matrix()(1, 0) == doctest::Approx(0.3));
  CHECK(data.objective_matrix()(0, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(data.add({vec({0.1})}, vec({1.0, 2.0}), 2), Error);
  CHECK_THROWS_AS(data.add({vec({0.1, 0.2})}, vec({1.0}), 2), Error);
  Vector bad = vec({0.1, 0.2});
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(data.add({bad}, vec({1.0, 2.0}), 2), Error);
}
