#include "mobo/pareto.hpp"

#include <cmath>

namespace mobo {

namespace {

void check_finite(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    require(std::isfinite(v[i]), std::string(what) + ": non-finite entry");
}

} // namespace

Dataset::Dataset(int input_dim, int objective_dim)
    : input_dim_(input_dim), objective_dim_(objective_dim) {
  require(input_dim >= 1, "Dataset: input dimension must be at least 1");
  require(objective_dim >= 2,
          "Dataset: objective dimension must be at least 2");
}

void Dataset::add(DesignPoint design, Vector objectives, int iteration) {
  require(design.x.size() == input_dim_, "Dataset::add: design dimension");
  require(objectives.size() == objective_dim_,
          "Dataset::add: objective dimension");
  require(iteration >= 0, "Dataset::add: negative iteration");
  check_finite(design.x, "Dataset::add design");
  check_finite(objectives, "Dataset::add objectives");
  observations_.push_back(
      Observation{std::move(design), std::move(objectives), iteration});
}

Matrix Dataset::design_matrix() const {
  Matrix X(observations_.size(), input_dim_);
  for (std::size_t i = 0; i < observations_.size(); ++i)
    X.row(i) = observations_[i].design.x.transpose();
  return X;
}

Matrix Dataset::objective_matrix() const {
  Matrix Y(observations_.size(), objective_dim_);
  for (std::size_t i = 0; i < observations_.size(); ++i)
    Y.row(i) = observations_[i].objectives.transpose();
  return Y;
}

namespace pareto {

bool dominates(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "dominates: dimension mismatch");
  bool strict = false;
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    if (a[m] < b[m]) return false;
    if (a[m] > b[m]) strict = true;
  }
  return strict;
}

bool weakly_dominates(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "weakly_dominates: dimension mismatch");
  for (Eigen::Index m = 0; m < a.size(); ++m)
    if (a[m] < b[m]) return false;
  return true;
}

ParetoFront pareto_front(const std::vector<Vector>& points) {
  require(!points.empty(), "pareto_front: empty input");
  const std::size_t n = points.size();
  ParetoFront front;
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < n && keep; ++j) {
      if (j == i) continue;
      if (dominates(points[j], points[i])) keep = false;
      // Among equal vectors only the first index survives.
      if (j < i && points[j] == points[i]) keep = false;
    }
    if (keep) {
      front.members.push_back(points[i]);
      front.indices.push_back(i);
    }
  }
  return front;
}

bool set_weakly_dominates(const std::vector<Vector>& A,
                          const std::vector<Vector>& B) {
  require(!A.empty() && !B.empty(), "set_weakly_dominates: empty set");
  for (const Vector& b : B) {
    bool covered = false;
    for (const Vector& a : A) {
      if (weakly_dominates(a, b)) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

} // namespace pareto

} // namespace mobo
