#pragma once

#include <cstddef>
#include <vector>

#include "mobo/common.hpp"

namespace mobo {

/// Inputs scaled to the unit cube.
struct DesignPoint {
  Vector x;
};

/// One evaluated design. Objectives follow the maximization convention;
/// minimization problems are negated at ingestion.
struct Observation {
  DesignPoint design;
  Vector objectives;
  int iteration = 0;
};

/// Ordered history of observations sharing input and objective dimensions.
class Dataset {
public:
  Dataset(int input_dim, int objective_dim);

  void add(DesignPoint design, Vector objectives, int iteration);

  int input_dim() const { return input_dim_; }
  int objective_dim() const { return objective_dim_; }
  std::size_t size() const { return observations_.size(); }
  const std::vector<Observation>& observations() const {
    return observations_;
  }

  /// size() x d matrix of designs, one row per observation.
  Matrix design_matrix() const;
  /// size() x M matrix of objective values, one row per observation.
  Matrix objective_matrix() const;

private:
  int input_dim_;
  int objective_dim_;
  std::vector<Observation> observations_;
};

/// Mutually non-dominated objective vectors. `indices` holds, per member,
/// the earliest input position carrying that value.
struct ParetoFront {
  std::vector<Vector> members;
  std::vector<std::size_t> indices;
};

namespace pareto {

/// a strictly dominates b: no coordinate worse, at least one better.
bool dominates(const Vector& a, const Vector& b);

/// No coordinate of a is worse than b's.
bool weakly_dominates(const Vector& a, const Vector& b);

/// Non-dominated subset; duplicate values collapse to their first index.
ParetoFront pareto_front(const std::vector<Vector>& points);

/// Every element of B is weakly dominated by some element of A.
bool set_weakly_dominates(const std::vector<Vector>& A,
                          const std::vector<Vector>& B);

} // namespace pareto

} // namespace mobo
