#include "mobo/bivariate.hpp"

#include <algorithm>
#include <cmath>

#include "mobo/stats.hpp"

namespace mobo::copula {

namespace {

constexpr double kEps = 1e-12;
constexpr double kRhoMax = 0.99999;
constexpr double kClaytonMax = 28.0;
constexpr double kGumbelMax = 50.0;
constexpr double kIndepTau = 0.05;

double clamp01(double x) { return std::clamp(x, kEps, 1.0 - kEps); }

// log(u^-t + v^-t - 1) without overflow for large t.
double clayton_log_a(double u, double v, double t) {
  const double lu = -t * std::log(u);
  const double lv = -t * std::log(v);
  const double m = std::max(lu, lv);
  return m + std::log(std::exp(lu - m) + std::exp(lv - m) - std::exp(-m));
}

double clayton_cdf(double u, double v, double t) {
  return std::exp(-clayton_log_a(u, v, t) / t);
}

// dC/du for clayton.
double clayton_h1(double u, double v, double t) {
  const double log_a = clayton_log_a(u, v, t);
  return std::exp(-(t + 1.0) * std::log(u) - (1.0 + t) / t * log_a);
}

double clayton_h1_inv(double u, double w, double t) {
  // v = [ (w^(-t/(1+t)) - 1) u^-t + 1 ]^(-1/t), in logs where it matters.
  const double log_q = -t / (1.0 + t) * std::log(w);
  const double log_u_mt = -t * std::log(u);
  // term = (e^log_q - 1) * e^log_u_mt + 1
  const double big = log_q + log_u_mt;
  double log_term;
  if (big > 40.0) {
    // e^big dominates both the -u^-t and +1 corrections.
    log_term = big + std::log1p(-std::exp(-log_q) +
                                std::exp(-big));
  } else {
    log_term = std::log((std::exp(log_q) - 1.0) * std::exp(log_u_mt) + 1.0);
  }
  return std::exp(-log_term / t);
}

double gumbel_cdf(double u, double v, double t) {
  const double a = std::pow(-std::log(u), t);
  const double b = std::pow(-std::log(v), t);
  return std::exp(-std::pow(a + b, 1.0 / t));
}

double gumbel_h1(double u, double v, double t) {
  const double lu = -std::log(u);
  const double a = std::pow(lu, t);
  const double b = std::pow(-std::log(v), t);
  const double s = a + b;
  return gumbel_cdf(u, v, t) * std::pow(s, 1.0 / t - 1.0) *
         std::pow(lu, t - 1.0) / u;
}

double gumbel_h1_inv(double u, double w, double t) {
  double lo = kEps, hi = 1.0 - kEps;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gumbel_h1(u, mid, t) < w)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double gaussian_cdf2(double u, double v, double rho) {
  return stats::bivariate_normal_cdf(stats::normal_quantile(u),
                                     stats::normal_quantile(v), rho);
}

double gaussian_h1(double u, double v, double rho) {
  const double x = stats::normal_quantile(u);
  const double y = stats::normal_quantile(v);
  return stats::normal_cdf((y - rho * x) / std::sqrt(1.0 - rho * rho));
}

double gaussian_h1_inv(double u, double w, double rho) {
  const double x = stats::normal_quantile(u);
  const double z = stats::normal_quantile(w);
  return stats::normal_cdf(z * std::sqrt(1.0 - rho * rho) + rho * x);
}

// --- binned mirror-reflection KDE ---------------------------------------

constexpr int kKdeSize = 128;

std::shared_ptr<KdeGrid> kde_fit(std::span<const double> u1,
                                 std::span<const double> u2) {
  const auto n = u1.size();
  auto grid = std::make_shared<KdeGrid>();
  const int B = kKdeSize;
  grid->size = B;

  double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s1 += u1[i];
    s2 += u2[i];
    q1 += u1[i] * u1[i];
    q2 += u2[i] * u2[i];
  }
  const double var1 = std::max(0.0, q1 / n - (s1 / n) * (s1 / n));
  const double var2 = std::max(0.0, q2 / n - (s2 / n) * (s2 / n));
  const double spread = std::sqrt(0.5 * (var1 + var2));
  const double bw =
      std::max(0.01, spread * std::pow(static_cast<double>(n), -1.0 / 6.0) *
                         0.5);
  grid->bandwidth = bw;

  std::vector<double> counts(static_cast<std::size_t>(B) * B, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = std::clamp(static_cast<int>(u1[i] * B), 0, B - 1);
    const int b = std::clamp(static_cast<int>(u2[i] * B), 0, B - 1);
    counts[static_cast<std::size_t>(a) * B + b] += 1.0;
  }

  // Separable Gaussian blur; reflection padding mirrors mass at the borders.
  const double sigma_bins = bw * B;
  const int radius = std::min(B - 1, static_cast<int>(std::ceil(4.0 * sigma_bins)));
  std::vector<double> kernel(2 * radius + 1);
  double ksum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * (k / sigma_bins) * (k / sigma_bins));
    ksum += kernel[k + radius];
  }
  for (auto& k : kernel) k /= ksum;

  auto reflect = [B](int idx) {
    if (idx < 0) idx = -idx - 1;
    if (idx >= B) idx = 2 * B - idx - 1;
    return idx;
  };
  std::vector<double> tmp(counts.size(), 0.0);
  for (int a = 0; a < B; ++a)
    for (int b = 0; b < B; ++b) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] *
               counts[static_cast<std::size_t>(reflect(a + k)) * B + b];
      tmp[static_cast<std::size_t>(a) * B + b] = acc;
    }
  std::vector<double>& dens = counts;
  for (int a = 0; a < B; ++a)
    for (int b = 0; b < B; ++b) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] *
               tmp[static_cast<std::size_t>(a) * B + reflect(b + k)];
      dens[static_cast<std::size_t>(a) * B + b] = acc;
    }

  double total = 0.0;
  for (double d : dens) total += d;
  require(total > 0.0, "kde fit: empty density");
  const double scale = static_cast<double>(B) * B / total; // mean density 1
  for (auto& d : dens) d *= scale;
  grid->density = std::move(dens);
  return grid;
}

double kde_cdf(const KdeGrid& g, double u, double v) {
  const int B = g.size;
  // Integrate the piecewise-constant density over [0,u] x [0,v].
  const double x = u * B, y = v * B;
  const int ix = std::min(B, static_cast<int>(x));
  const int iy = std::min(B, static_cast<int>(y));
  double acc = 0.0;
  for (int a = 0; a < ix; ++a) {
    const double* row = g.density.data() + static_cast<std::size_t>(a) * B;
    double rowacc = 0.0;
    for (int b = 0; b < iy; ++b) rowacc += row[b];
    if (iy < B) rowacc += row[iy] * (y - iy);
    acc += rowacc;
  }
  if (ix < B) {
    const double* row = g.density.data() + static_cast<std::size_t>(ix) * B;
    double rowacc = 0.0;
    for (int b = 0; b < iy; ++b) rowacc += row[b];
    if (iy < B) rowacc += row[iy] * (y - iy);
    acc += rowacc * (x - ix);
  }
  return std::clamp(acc / (static_cast<double>(B) * B), 0.0, 1.0);
}

double kde_h1(const KdeGrid& g, double u, double v) {
  const int B = g.size;
  const int iu = std::clamp(static_cast<int>(u * B), 0, B - 1);
  const double* row = g.density.data() + static_cast<std::size_t>(iu) * B;
  const double y = v * B;
  const int iy = std::min(B, static_cast<int>(y));
  double part = 0.0, total = 0.0;
  for (int b = 0; b < B; ++b) total += row[b];
  for (int b = 0; b < iy; ++b) part += row[b];
  if (iy < B) part += row[iy] * (y - iy);
  return total > 0.0 ? std::clamp(part / total, 0.0, 1.0) : v;
}

double kde_h1_inv(const KdeGrid& g, double u, double w) {
  const int B = g.size;
  const int iu = std::clamp(static_cast<int>(u * B), 0, B - 1);
  const double* row = g.density.data() + static_cast<std::size_t>(iu) * B;
  double total = 0.0;
  for (int b = 0; b < B; ++b) total += row[b];
  if (total <= 0.0) return w;
  const double target = w * total;
  double acc = 0.0;
  for (int b = 0; b < B; ++b) {
    if (acc + row[b] >= target) {
      const double frac = row[b] > 0.0 ? (target - acc) / row[b] : 0.0;
      return std::clamp((b + frac) / B, kEps, 1.0 - kEps);
    }
    acc += row[b];
  }
  return 1.0 - kEps;
}

double kde_h2(const KdeGrid& g, double u, double v) {
  const int B = g.size;
  const int iv = std::clamp(static_cast<int>(v * B), 0, B - 1);
  const double x = u * B;
  const int ix = std::min(B, static_cast<int>(x));
  double part = 0.0, total = 0.0;
  for (int a = 0; a < B; ++a)
    total += g.density[static_cast<std::size_t>(a) * B + iv];
  for (int a = 0; a < ix; ++a)
    part += g.density[static_cast<std::size_t>(a) * B + iv];
  if (ix < B)
    part += g.density[static_cast<std::size_t>(ix) * B + iv] * (x - ix);
  return total > 0.0 ? std::clamp(part / total, 0.0, 1.0) : u;
}

double kde_h2_inv(const KdeGrid& g, double w, double v) {
  const int B = g.size;
  const int iv = std::clamp(static_cast<int>(v * B), 0, B - 1);
  double total = 0.0;
  for (int a = 0; a < B; ++a)
    total += g.density[static_cast<std::size_t>(a) * B + iv];
  if (total <= 0.0) return w;
  const double target = w * total;
  double acc = 0.0;
  for (int a = 0; a < B; ++a) {
    const double cell = g.density[static_cast<std::size_t>(a) * B + iv];
    if (acc + cell >= target) {
      const double frac = cell > 0.0 ? (target - acc) / cell : 0.0;
      return std::clamp((a + frac) / B, kEps, 1.0 - kEps);
    }
    acc += cell;
  }
  return 1.0 - kEps;
}

} // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::independence: return "independence";
    case Family::gaussian: return "gaussian";
    case Family::clayton: return "clayton";
    case Family::gumbel: return "gumbel";
    case Family::kde: return "kde";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "independence") return Family::independence;
  if (name == "gaussian") return Family::gaussian;
  if (name == "clayton") return Family::clayton;
  if (name == "gumbel") return Family::gumbel;
  if (name == "kde") return Family::kde;
  throw Error("unknown copula family: " + name);
}

double tau_to_gaussian_rho(double tau) {
  const double rho = std::sin(1.5707963267948966 * tau);
  return std::clamp(rho, -kRhoMax, kRhoMax);
}

double tau_to_clayton_theta(double tau) {
  const double t = std::abs(tau);
  require(t < 1.0 + 1e-12, "clayton theta: |tau| must be < 1");
  const double theta = 2.0 * t / std::max(1e-12, 1.0 - t);
  return std::clamp(theta, 1e-4, kClaytonMax);
}

double tau_to_gumbel_theta(double tau) {
  const double t = std::abs(tau);
  const double theta = 1.0 / std::max(1e-12, 1.0 - t);
  return std::clamp(theta, 1.0, kGumbelMax);
}

BivariateCopula::BivariateCopula() = default;

BivariateCopula BivariateCopula::independence() { return BivariateCopula(); }

BivariateCopula BivariateCopula::gaussian(double rho) {
  require(std::abs(rho) < 1.0, "gaussian copula: |rho| must be < 1");
  BivariateCopula c;
  c.family_ = Family::gaussian;
  c.parameter_ = std::clamp(rho, -kRhoMax, kRhoMax);
  return c;
}

BivariateCopula BivariateCopula::clayton(double theta, Rotation rot) {
  require(theta > 0.0, "clayton copula: theta must be positive");
  BivariateCopula c;
  c.family_ = Family::clayton;
  c.parameter_ = std::min(theta, kClaytonMax);
  c.rotation_ = rot;
  return c;
}

BivariateCopula BivariateCopula::gumbel(double theta, Rotation rot) {
  require(theta >= 1.0, "gumbel copula: theta must be at least 1");
  BivariateCopula c;
  c.family_ = Family::gumbel;
  c.parameter_ = std::min(theta, kGumbelMax);
  c.rotation_ = rot;
  return c;
}

BivariateCopula BivariateCopula::fit(std::span<const double> u1,
                                     std::span<const double> u2,
                                     Family policy) {
  require(u1.size() == u2.size(), "fit: length mismatch");
  require(u1.size() >= 10, "fit: need at least 10 paired observations");
  const double tau = stats::kendall_tau(u1, u2);

  if (policy == Family::independence || std::abs(tau) < kIndepTau)
    return independence();

  switch (policy) {
    case Family::gaussian:
      return gaussian(tau_to_gaussian_rho(tau));
    case Family::kde: {
      BivariateCopula c;
      c.family_ = Family::kde;
      c.kde_ = kde_fit(u1, u2);
      return c;
    }
    case Family::clayton:
    case Family::gumbel: {
      // Mirror negative dependence onto the positive quadrant, pick the
      // tail by corner mass, then compose the mirror back as a rotation.
      std::vector<double> a(u1.begin(), u1.end());
      const std::vector<double> b(u2.begin(), u2.end());
      if (tau < 0.0)
        for (auto& x : a) x = 1.0 - x;
      std::size_t lower = 0, upper = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.25 && b[i] < 0.25) ++lower;
        if (a[i] > 0.75 && b[i] > 0.75) ++upper;
      }
      Rotation rot;
      if (policy == Family::clayton)
        rot = lower >= upper ? Rotation::r0 : Rotation::r180;
      else
        rot = upper >= lower ? Rotation::r0 : Rotation::r180;
      if (tau < 0.0)
        rot = rot == Rotation::r0 ? Rotation::r90 : Rotation::r270;
      return policy == Family::clayton
                 ? clayton(tau_to_clayton_theta(tau), rot)
                 : gumbel(tau_to_gumbel_theta(tau), rot);
    }
    default:
      throw Error("fit: unsupported family policy");
  }
}

namespace {

double base_cdf(const BivariateCopula& c, double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  if (u >= 1.0) return std::min(1.0, v);
  if (v >= 1.0) return u;
  switch (c.family()) {
    case Family::independence: return u * v;
    case Family::gaussian: return gaussian_cdf2(u, v, c.parameter());
    case Family::clayton: return clayton_cdf(u, v, c.parameter());
    case Family::gumbel: return gumbel_cdf(u, v, c.parameter());
    case Family::kde: return kde_cdf(*c.kde(), u, v);
  }
  return 0.0;
}

double base_h1(const BivariateCopula& c, double u, double v) {
  u = clamp01(u);
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  switch (c.family()) {
    case Family::independence: return v;
    case Family::gaussian: return gaussian_h1(u, v, c.parameter());
    case Family::clayton: return clayton_h1(u, v, c.parameter());
    case Family::gumbel: return gumbel_h1(u, v, c.parameter());
    case Family::kde: return kde_h1(*c.kde(), u, v);
  }
  return v;
}

double base_h2(const BivariateCopula& c, double u, double v) {
  // All parametric base families here are exchangeable.
  if (c.family() == Family::kde) {
    v = clamp01(v);
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return kde_h2(*c.kde(), u, v);
  }
  return base_h1(c, v, u);
}

double base_h1_inv(const BivariateCopula& c, double u, double w) {
  u = clamp01(u);
  w = clamp01(w);
  switch (c.family()) {
    case Family::independence: return w;
    case Family::gaussian: return gaussian_h1_inv(u, w, c.parameter());
    case Family::clayton: return clayton_h1_inv(u, w, c.parameter());
    case Family::gumbel: return gumbel_h1_inv(u, w, c.parameter());
    case Family::kde: return kde_h1_inv(*c.kde(), u, w);
  }
  return w;
}

double base_h2_inv(const BivariateCopula& c, double w, double v) {
  if (c.family() == Family::kde) {
    v = clamp01(v);
    w = clamp01(w);
    return kde_h2_inv(*c.kde(), w, v);
  }
  return base_h1_inv(c, v, w);
}

} // namespace

double BivariateCopula::cdf(double u, double v) const {
  require(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0,
          "bivariate cdf: inputs outside [0,1]");
  double value;
  switch (rotation_) {
    case Rotation::r0: value = base_cdf(*this, u, v); break;
    case Rotation::r90: value = v - base_cdf(*this, 1.0 - u, v); break;
    case Rotation::r180:
      value = u + v - 1.0 + base_cdf(*this, 1.0 - u, 1.0 - v);
      break;
    case Rotation::r270: value = u - base_cdf(*this, u, 1.0 - v); break;
    default: value = u * v;
  }
  return std::clamp(value, 0.0, 1.0);
}

double BivariateCopula::h1(double u, double v) const {
  switch (rotation_) {
    case Rotation::r0: return base_h1(*this, u, v);
    case Rotation::r90: return base_h1(*this, 1.0 - u, v);
    case Rotation::r180: return 1.0 - base_h1(*this, 1.0 - u, 1.0 - v);
    case Rotation::r270: return 1.0 - base_h1(*this, u, 1.0 - v);
  }
  return v;
}

double BivariateCopula::h2(double u, double v) const {
  switch (rotation_) {
    case Rotation::r0: return base_h2(*this, u, v);
    case Rotation::r90: return 1.0 - base_h2(*this, 1.0 - u, v);
    case Rotation::r180: return 1.0 - base_h2(*this, 1.0 - u, 1.0 - v);
    case Rotation::r270: return base_h2(*this, u, 1.0 - v);
  }
  return u;
}

double BivariateCopula::h1_inv(double u, double w) const {
  switch (rotation_) {
    case Rotation::r0: return base_h1_inv(*this, u, w);
    case Rotation::r90: return base_h1_inv(*this, 1.0 - u, w);
    case Rotation::r180:
      return 1.0 - base_h1_inv(*this, 1.0 - u, 1.0 - w);
    case Rotation::r270: return 1.0 - base_h1_inv(*this, u, 1.0 - w);
  }
  return w;
}

double BivariateCopula::h2_inv(double w, double v) const {
  switch (rotation_) {
    case Rotation::r0: return base_h2_inv(*this, w, v);
    case Rotation::r90: return 1.0 - base_h2_inv(*this, 1.0 - w, v);
    case Rotation::r180:
      return 1.0 - base_h2_inv(*this, 1.0 - w, 1.0 - v);
    case Rotation::r270: return base_h2_inv(*this, w, 1.0 - v);
  }
  return w;
}

} // namespace mobo::copula
