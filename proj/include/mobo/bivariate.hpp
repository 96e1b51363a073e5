#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mobo/common.hpp"

namespace mobo::copula {

enum class Family { independence, gaussian, clayton, gumbel, kde };

/// Quarter-turn rotations in the CDF convention
///   C_90(u,v)  = v - C(1-u, v)
///   C_180(u,v) = u + v - 1 + C(1-u, 1-v)
///   C_270(u,v) = u - C(u, 1-v)
enum class Rotation { r0 = 0, r90 = 90, r180 = 180, r270 = 270 };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Binned kernel density on the unit square with mirror-reflected
/// boundaries, plus row/column conditional CDF tables for h-functions.
struct KdeGrid {
  int size = 0;
  std::vector<double> density; // size*size, density[iu*size + iv], mean 1
  double bandwidth = 0.0;
};

/// One pair copula. h1(u,v) = P(V<=v | U=u), h2(u,v) = P(U<=u | V=v);
/// h1_inv/h2_inv invert those in their final argument.
class BivariateCopula {
public:
  BivariateCopula(); // independence

  static BivariateCopula independence();
  static BivariateCopula gaussian(double rho);
  static BivariateCopula clayton(double theta, Rotation rot = Rotation::r0);
  static BivariateCopula gumbel(double theta, Rotation rot = Rotation::r0);

  /// Tau-inversion fit with the requested preferred family; |tau| < 0.05
  /// falls back to independence. Rotation for clayton/gumbel is chosen by
  /// the sign of tau and empirical corner mass.
  static BivariateCopula fit(std::span<const double> u1,
                             std::span<const double> u2, Family policy);

  double cdf(double u, double v) const;
  double h1(double u, double v) const;
  double h2(double u, double v) const;
  double h1_inv(double u, double w) const;
  double h2_inv(double w, double v) const;

  Family family() const { return family_; }
  double parameter() const { return parameter_; }
  Rotation rotation() const { return rotation_; }
  const KdeGrid* kde() const { return kde_.get(); }

private:
  Family family_ = Family::independence;
  double parameter_ = 0.0;
  Rotation rotation_ = Rotation::r0;
  std::shared_ptr<const KdeGrid> kde_;
};

/// Kendall's tau of the sample, then tau-inverted parameters:
/// gaussian rho = sin(pi tau / 2), clayton theta = 2|tau|/(1-|tau|),
/// gumbel theta = 1/(1-|tau|).
double tau_to_gaussian_rho(double tau);
double tau_to_clayton_theta(double tau);
double tau_to_gumbel_theta(double tau);

} // namespace mobo::copula
