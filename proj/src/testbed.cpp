#include <mobo/testbed.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include <mobo/bivariate.hpp>

namespace mobo::testbed {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBcGridSide = 317;  // 317^2 ~ 1e5 domain samples

void check_unit_cube(const Vector& x, int d, const char* name) {
  require(x.size() == d, std::string(name) + ": expected " +
                             std::to_string(d) + " inputs, got " +
                             std::to_string(x.size()));
  for (int i = 0; i < d; ++i) {
    require(std::isfinite(x[i]) && x[i] >= 0.0 && x[i] <= 1.0,
            std::string(name) + ": input " + std::to_string(i) +
                " outside [0,1]");
  }
}

// Per-objective min/max of branin_currin over a fixed grid on [0,1]^2, used
// to normalize generated designs.  Computed once.
struct BcBounds {
  double lo[2], hi[2];
};

const BcBounds& bc_grid_bounds() {
  static const BcBounds bounds = [] {
    BcBounds b;
    b.lo[0] = b.lo[1] = std::numeric_limits<double>::infinity();
    b.hi[0] = b.hi[1] = -std::numeric_limits<double>::infinity();
    Vector x(2);
    for (int i = 0; i < kBcGridSide; ++i) {
      x[0] = double(i) / (kBcGridSide - 1);
      for (int j = 0; j < kBcGridSide; ++j) {
        x[1] = double(j) / (kBcGridSide - 1);
        const Vector f = branin_currin(x);
        for (int m = 0; m < 2; ++m) {
          b.lo[m] = std::min(b.lo[m], f[m]);
          b.hi[m] = std::max(b.hi[m], f[m]);
        }
      }
    }
    return b;
  }();
  return bounds;
}

}  // namespace

Vector branin_currin(const Vector& x) {
  check_unit_cube(x, 2, "branin_currin");
  Vector f(2);
  // Negated Branin on its classic domain [-5,10] x [0,15].
  const double a = 15.0 * x[0] - 5.0;
  const double b = 15.0 * x[1];
  const double t = b - 5.1 / (4.0 * kPi * kPi) * a * a + 5.0 / kPi * a - 6.0;
  f[0] = -(t * t) + 10.0 * (1.0 - 1.0 / (8.0 * kPi)) * std::cos(a) + 10.0;
  // Negated Currin exponential on the raw unit square; at x2 = 0 the
  // attenuation factor exp(-1/(2*x2)) underflows to 0, which is the limit.
  const double x1 = x[0], x2 = x[1];
  const double num = 2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
  const double den = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
  f[1] = -(1.0 - std::exp(-1.0 / (2.0 * x2))) * num / den;
  return f;
}

Vector dtlz2(const Vector& x, int m) {
  require(m >= 2, "dtlz2: need at least 2 objectives");
  const int d = int(x.size());
  require(d >= m, "dtlz2: need at least as many inputs as objectives");
  check_unit_cube(x, d, "dtlz2");
  double g = 0.0;
  for (int i = m - 1; i < d; ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
  Vector f(m);
  for (int j = 0; j < m; ++j) {
    double v = 1.0 + g;
    for (int i = 0; i < m - 1 - j; ++i) v *= std::cos(x[i] * kPi / 2.0);
    if (j > 0) v *= std::sin(x[m - 1 - j] * kPi / 2.0);
    f[j] = -v;
  }
  return f;
}

Problem branin_currin_problem() {
  Problem p;
  p.name = "branin_currin";
  p.input_dim = 2;
  p.objective_dim = 2;
  p.evaluate = [](const Vector& x) { return branin_currin(x); };
  return p;
}

Problem dtlz2_problem(int d, int m) {
  require(m >= 2 && d >= m, "dtlz2_problem: need d >= m >= 2");
  Problem p;
  p.name = "dtlz2";
  p.input_dim = d;
  p.objective_dim = m;
  p.evaluate = [m](const Vector& x) { return dtlz2(x, m); };
  return p;
}

double beta22_quantile(double p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
          "beta22_quantile: p outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  // Beta(2,2) has cdf 3x^2 - 2x^3; the inverse is the middle root of the
  // depressed cubic, written with the trigonometric formula.
  const double c = std::clamp(1.0 - 2.0 * p, -1.0, 1.0);
  const double x = 0.5 + std::cos(std::acos(c) / 3.0 + 4.0 * kPi / 3.0);
  return std::clamp(x, 0.0, 1.0);
}

PoolDataset copulabc_generate(std::size_t n, double theta, std::uint64_t seed) {
  require(std::isfinite(theta) && theta > 0.0,
          "copulabc_generate: theta must be positive");
  require(n >= 1, "copulabc_generate: need at least one sample");
  const copula::BivariateCopula cop =
      copula::BivariateCopula::clayton(theta, copula::Rotation::r180);
  auto rng = seeded_rng(seed, 0x63626331ULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr double kEps = 1e-12;
  PoolDataset pool;
  pool.designs.resize(n, 2);
  pool.true_objectives.resize(n, 2);
  const BcBounds& bounds = bc_grid_bounds();
  Vector y(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = std::clamp(unif(rng), kEps, 1.0 - kEps);
    const double w = std::clamp(unif(rng), kEps, 1.0 - kEps);
    const double v = std::clamp(cop.h1_inv(u, w), kEps, 1.0 - kEps);
    y[0] = beta22_quantile(u);
    y[1] = beta22_quantile(v);
    const Vector f = branin_currin(y);
    for (int m = 0; m < 2; ++m) {
      pool.true_objectives(i, m) = y[m];
      const double span = bounds.hi[m] - bounds.lo[m];
      pool.designs(i, m) = std::clamp((f[m] - bounds.lo[m]) / span, 0.0, 1.0);
    }
  }
  pool.input_lo = Vector(2);
  pool.input_hi = Vector(2);
  for (int m = 0; m < 2; ++m) {
    pool.input_lo[m] = bounds.lo[m];
    pool.input_hi[m] = bounds.hi[m];
  }
  return pool;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t row, std::string_view col) {
  const std::string_view t = trim(cell);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(value)) {
    throw Error("load_csv_pool: row " + std::to_string(row) + ", column '" +
                std::string(col) + "': bad numeric value '" + std::string(t) +
                "'");
  }
  return value;
}

}  // namespace

PoolDataset load_csv_pool(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_csv_pool: cannot open '" + path + "'");
  std::string line;
  require(bool(std::getline(in, line)), "load_csv_pool: empty file");
  const auto header_cells = split_csv(line);
  std::vector<std::string> names;
  std::vector<std::size_t> x_cols, y_cols;
  for (std::size_t c = 0; c < header_cells.size(); ++c) {
    const std::string_view name = trim(header_cells[c]);
    names.emplace_back(name);
    if (name.starts_with("x_")) x_cols.push_back(c);
    if (name.starts_with("y_")) y_cols.push_back(c);
  }
  require(!x_cols.empty(), "load_csv_pool: no 'x_'-prefixed input columns");
  require(!y_cols.empty(), "load_csv_pool: no 'y_'-prefixed objective columns");

  std::vector<std::vector<double>> xs, ys;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != names.size()) {
      throw Error("load_csv_pool: row " + std::to_string(row) + ": expected " +
                  std::to_string(names.size()) + " fields, got " +
                  std::to_string(cells.size()));
    }
    auto& xr = xs.emplace_back();
    auto& yr = ys.emplace_back();
    for (std::size_t c : x_cols) xr.push_back(parse_cell(cells[c], row, names[c]));
    for (std::size_t c : y_cols) yr.push_back(parse_cell(cells[c], row, names[c]));
  }
  require(row >= 1, "load_csv_pool: no data rows");

  const std::size_t n = xs.size(), d = x_cols.size(), m = y_cols.size();
  PoolDataset pool;
  pool.designs.resize(n, d);
  pool.true_objectives.resize(n, m);
  pool.input_lo = Vector(d);
  pool.input_hi = Vector(d);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = xs[0][j], hi = xs[0][j];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, xs[i][j]);
      hi = std::max(hi, xs[i][j]);
    }
    pool.input_lo[j] = lo;
    pool.input_hi[j] = hi;
    const double span = hi - lo;
    for (std::size_t i = 0; i < n; ++i) {
      // A constant column has no scale; park it mid-cube.
      pool.designs(i, j) = span > 0.0 ? (xs[i][j] - lo) / span : 0.5;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) pool.true_objectives(i, j) = ys[i][j];
  }
  return pool;
}

void write_csv_pool(const PoolDataset& pool, const std::string& path) {
  const auto n = pool.designs.rows();
  const auto d = pool.designs.cols();
  const auto m = pool.true_objectives.cols();
  require(pool.true_objectives.rows() == n,
          "write_csv_pool: design/objective row mismatch");
  require(pool.input_lo.size() == d && pool.input_hi.size() == d,
          "write_csv_pool: scaler size mismatch");
  std::ofstream out(path);
  require(out.good(), "write_csv_pool: cannot open '" + path + "'");
  for (Eigen::Index j = 0; j < d; ++j) out << (j ? ",x_" : "x_") << j;
  for (Eigen::Index j = 0; j < m; ++j) out << ",y_" << j;
  out << "\n";
  char buf[40];
  auto emit = [&](double v, bool lead) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!lead) out << ',';
    out << buf;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double raw =
          pool.input_lo[j] + pool.designs(i, j) * (pool.input_hi[j] - pool.input_lo[j]);
      emit(raw, j == 0);
    }
    for (Eigen::Index j = 0; j < m; ++j) emit(pool.true_objectives(i, j), false);
    out << "\n";
  }
  require(out.good(), "write_csv_pool: write failed for '" + path + "'");
}

}  // namespace mobo::testbed
