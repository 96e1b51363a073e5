#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <mobo/common.hpp>

namespace mobo::testbed {

// A synthetic objective to maximize.  `evaluate` is pure and deterministic:
// it maps a design in the unit cube [0,1]^input_dim to `objective_dim` values
// and throws Error outside the domain.  `noise_sigma`, when non-empty, holds a
// per-objective observation-noise scale; problems themselves never add noise.
struct Problem {
  std::string name;
  int input_dim = 0;
  int objective_dim = 0;
  std::function<Vector(const Vector&)> evaluate;
  Vector noise_sigma;
};

// A finite candidate pool: row i of `designs` (unit cube) maps to row i of
// `true_objectives`.  `input_lo`/`input_hi` record the per-column affine map
// back to the original design units (raw = lo + x * (hi - lo)).
struct PoolDataset {
  Matrix designs;
  Matrix true_objectives;
  Vector input_lo;
  Vector input_hi;
};

// Two-objective test function on [0,1]^2.  The first output is the negated
// Branin surface evaluated on its classic domain via (15*x1 - 5, 15*x2); the
// second is the negated Currin-exponential surface on the raw unit square.
Vector branin_currin(const Vector& x);

// Concave-front test function on [0,1]^d with m objectives (d >= m >= 2),
// negated so larger is better.  With the d-m+1 trailing coordinates at 0.5
// the outputs lie exactly on the unit sphere.
Vector dtlz2(const Vector& x, int m);

Problem branin_currin_problem();
Problem dtlz2_problem(int d, int m);

// Quantile of the Beta(2,2) distribution, in closed form.
double beta22_quantile(double p);

// Generates a pool with dependent objectives: objective pairs are drawn from
// an upper-tail-dependent (180-degree rotated) Clayton copula with the given
// theta > 0, pushed through Beta(2,2) margins; designs are the Branin-Currin
// image of the objectives, min-max normalized into [0,1]^2 using bounds taken
// from a fixed 317x317 grid over the domain.  Deterministic in (n, theta,
// seed): repeated calls return bit-identical pools.  Kendall's tau between
// the two objective columns is theta / (theta + 2).
PoolDataset copulabc_generate(std::size_t n, double theta, std::uint64_t seed);

// Reads a candidate pool from CSV.  The header names input columns with an
// "x_" prefix and objective columns with a "y_" prefix (any order, at least
// one of each); other columns are ignored.  Row order is preserved, inputs
// are min-max scaled to the unit cube with the scaler recorded, and malformed
// input names the offending 1-based data row.
PoolDataset load_csv_pool(const std::string& path);

// Writes a pool in the same CSV format, designs restored to original units
// via the recorded scaler.  load(write(load(f))) reproduces the pool exactly
// up to float formatting.
void write_csv_pool(const PoolDataset& pool, const std::string& path);

}  // namespace mobo::testbed
