#include "mobo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mobo::stats {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kTwoPi = 6.283185307179586;

// Wichura's AS 241 rational approximations, then one Newton step so the
// result round-trips through normal_cdf at machine precision.
double quantile_initial(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) *
                      r +
                  4.5921953931549871457e4) *
                     r +
                 1.3731693765509461125e4) *
                    r +
                1.9715909503065514427e3) *
                   r +
               1.3314166789178437745e2) *
                  r +
              3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) *
                 r +
             2.1213794301586595867e4) *
                r +
            5.3941960214247511077e3) *
               r +
           6.8718700749205790830e2) *
              r +
          4.2313330701600911252e1) *
             r +
         1.0);
    return num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e0) *
                r +
            3.64784832476320460504e0) *
               r +
           5.76949722146069140550e0) *
              r +
          4.63033784615654529590e0) *
             r +
         1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e0) *
              r +
          2.05319162663775882187e0) *
             r +
         1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e0) *
              r +
          5.46378491116411436990e0) *
             r +
         6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) *
                  r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    x = num / den;
  }
  return q < 0.0 ? -x : x;
}

} // namespace

double normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double p) {
  require(p >= 0.0 && p <= 1.0, "normal_quantile: p outside [0,1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  double x = quantile_initial(p);
  // One Newton step; skipped in the far tails where the pdf underflows.
  if (std::abs(x) < 37.0) {
    const double err = normal_cdf(x) - p;
    x -= err / normal_pdf(x);
  }
  return x;
}

double bivariate_normal_cdf(double h, double k, double rho) {
  require(std::abs(rho) <= 1.0, "bivariate_normal_cdf: |rho| > 1");
  if (rho >= 1.0) return normal_cdf(std::min(h, k));
  if (rho <= -1.0) {
    const double s = normal_cdf(h) + normal_cdf(k) - 1.0;
    return std::max(0.0, s);
  }
  if (std::isinf(h) || std::isinf(k)) {
    if (h == -std::numeric_limits<double>::infinity() ||
        k == -std::numeric_limits<double>::infinity())
      return 0.0;
    if (std::isinf(h)) return normal_cdf(k);
    return normal_cdf(h);
  }

  // P(X<=h, Y<=k) = Phi(h)Phi(k)
  //   + (1/2pi) * int_0^{asin rho} exp(-(h^2+k^2-2hk sin t)/(2 cos^2 t)) dt.
  // 20-point Gauss-Legendre per panel; the panel count grows as |rho| -> 1
  // where the integrand steepens near t = pi/2.
  static constexpr double gx[10] = {
      0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
      0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
      0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
      0.9931285991850949};
  static constexpr double gw[10] = {
      0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
      0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
      0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
      0.0176140071391521};

  const double asr = std::asin(rho);
  const double hs = 0.5 * (h * h + k * k);
  const double hk = h * k;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(asr) / 0.1)));
  double integral = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = asr * p / panels;
    const double b = asr * (p + 1) / panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (const double sgn : {-1.0, 1.0}) {
        const double t = mid + sgn * half * gx[i];
        const double c = std::cos(t);
        const double e = (std::sin(t) * hk - hs) / (c * c);
        if (e > -700.0) acc += gw[i] * std::exp(e);
      }
    }
    integral += acc * half;
  }
  double v = normal_cdf(h) * normal_cdf(k) + integral / kTwoPi;
  return std::clamp(v, 0.0, 1.0);
}

namespace {

// First 16 primes; sqrt(prime) generates the Richtmyer lattice.
constexpr int kPrimes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                             23, 29, 31, 37, 41, 43, 47, 53};

} // namespace

double mvn_rectangle(const Vector& b, const Matrix& R, int points_per_shift,
                     int shifts, std::uint64_t seed) {
  const int m = static_cast<int>(b.size());
  require(R.rows() == m && R.cols() == m, "mvn_rectangle: shape mismatch");
  require(m >= 1 && m <= 16, "mvn_rectangle: dimension out of range");
  if (m == 1) return normal_cdf(b[0]);
  if (m == 2) return bivariate_normal_cdf(b[0], b[1], R(0, 1));

  // Cholesky with a small jitter ladder; R comes from fitted parameters and
  // can be near-singular.
  Matrix L;
  {
    Matrix A = R;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      Eigen::LLT<Matrix> llt(A);
      if (llt.info() == Eigen::Success) {
        L = llt.matrixL();
        break;
      }
      jitter = jitter == 0.0 ? 1e-12 : jitter * 100.0;
      A = R + jitter * Matrix::Identity(m, m);
      require(attempt < 5, "mvn_rectangle: correlation matrix not PSD");
    }
  }

  std::vector<double> lattice(m - 1);
  for (int d = 0; d < m - 1; ++d)
    lattice[d] = std::sqrt(static_cast<double>(kPrimes[d]));

  const double clamp_lo = 1e-15, clamp_hi = 1.0 - 1e-15;
  double total = 0.0;
  std::mt19937_64 rng = seeded_rng(seed, static_cast<std::uint64_t>(m));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(m - 1), y(m - 1);
  for (int s = 0; s < shifts; ++s) {
    for (auto& v : shift) v = unif(rng);
    double acc = 0.0;
    for (int i = 1; i <= points_per_shift; ++i) {
      double e = normal_cdf(b[0] / L(0, 0));
      double prod = e;
      for (int d = 1; d < m; ++d) {
        double u = i * lattice[d - 1] + shift[d - 1];
        u -= std::floor(u);
        // Baker's fold keeps the shifted lattice evenly distributed.
        u = std::abs(2.0 * u - 1.0);
        const double w = std::clamp(u * e, clamp_lo, clamp_hi);
        y[d - 1] = normal_quantile(w);
        double num = b[d];
        for (int j = 0; j < d; ++j) num -= L(d, j) * y[j];
        e = normal_cdf(num / L(d, d));
        prod *= e;
        if (prod == 0.0) break;
      }
      acc += (prod - acc) / i;
    }
    total += acc;
  }
  return std::clamp(total / shifts, 0.0, 1.0);
}

namespace {

// Counts inversions by merge sort; ys is reordered in place.
std::uint64_t merge_count(std::vector<double>& ys, std::vector<double>& buf,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps =
      merge_count(ys, buf, lo, mid) + merge_count(ys, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (ys[j] < ys[i]) {
      swaps += mid - i;
      buf[k++] = ys[j++];
    } else {
      buf[k++] = ys[i++];
    }
  }
  while (i < mid) buf[k++] = ys[i++];
  while (j < hi) buf[k++] = ys[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, ys.begin() + lo);
  return swaps;
}

std::uint64_t tie_pairs(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::uint64_t total = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const std::uint64_t run = j - i;
    total += run * (run - 1) / 2;
    i = j;
  }
  return total;
}

} // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  require(n == y.size(), "kendall_tau: length mismatch");
  require(n >= 2, "kendall_tau: need at least two points");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  // Joint ties: pairs equal in both coordinates.
  std::uint64_t n3 = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j < n && x[order[j]] == x[order[i]] && y[order[j]] == y[order[i]])
        ++j;
      const std::uint64_t run = j - i;
      n3 += run * (run - 1) / 2;
      i = j;
    }
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const std::uint64_t swaps = merge_count(ys, buf, 0, n);

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tie_pairs(std::vector<double>(x.begin(), x.end()));
  const std::uint64_t n2 = tie_pairs(std::vector<double>(y.begin(), y.end()));

  const double concordant_minus_discordant =
      static_cast<double>(n0) - static_cast<double>(n1) -
      static_cast<double>(n2) + static_cast<double>(n3) -
      2.0 * static_cast<double>(swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0.0) return 0.0;
  return concordant_minus_discordant / denom;
}

double ks_uniform_statistic(std::vector<double> sample) {
  const std::size_t n = sample.size();
  require(n > 0, "ks_uniform_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::clamp(sample[i], 0.0, 1.0);
    d = std::max(d, (i + 1.0) / n - u);
    d = std::max(d, u - static_cast<double>(i) / n);
  }
  return std::sqrt(static_cast<double>(n)) * d;
}

double ks_critical_value(double alpha) {
  if (alpha == 0.01) return 1.628;
  if (alpha == 0.05) return 1.358;
  if (alpha == 0.10) return 1.224;
  throw Error("ks_critical_value: unsupported alpha");
}

std::vector<double> simplex_sample(int m, std::mt19937_64& rng) {
  require(m >= 1, "simplex_sample: m must be positive");
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& v : w) {
    v = ex(rng);
    total += v;
  }
  for (auto& v : w) v /= total;
  return w;
}

} // namespace mobo::stats
