#include <mobo/harness.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include <mobo/cdf_indicator.hpp>
#include <mobo/gp.hpp>
#include <mobo/hypervolume.hpp>
#include <mobo/pareto.hpp>

namespace mobo::harness {

namespace {

// Independent RNG stream tags hung off the run seed; pools are additionally
// keyed by iteration so metric references never depend on the acquisition.
constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kPoolTag = 0x706f6f6cULL;
constexpr std::uint64_t kNoiseTag = 0x6e6f6973ULL;
constexpr std::uint64_t kGpFitTag = 0x67706674ULL;
constexpr std::uint64_t kGpSampleTag = 0x67707361ULL;
constexpr std::uint64_t kAcqTag = 0x61637173ULL;
constexpr std::uint64_t kTimingTag = 0x74696d65ULL;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && p == s.data() + s.size(),
          where + ": bad numeric value '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

struct ResolvedProblem {
  testbed::Problem problem;
  bool lookup = false;
  testbed::PoolDataset dataset;
};

ResolvedProblem build_problem(const ProblemConfig& pc) {
  ResolvedProblem rp;
  if (pc.name == "branin_currin") {
    rp.problem = testbed::branin_currin_problem();
  } else if (pc.name == "dtlz2") {
    rp.problem = testbed::dtlz2_problem(pc.d, pc.m);
  } else if (pc.name == "copulabc") {
    require(pc.pool_n > 0, "run config: copulabc pool_n must be positive");
    rp.lookup = true;
    rp.dataset = testbed::copulabc_generate(std::size_t(pc.pool_n), pc.theta,
                                            pc.pool_seed);
    rp.problem.name = "copulabc";
  } else if (pc.name == "csv") {
    require(!pc.path.empty(), "run config: csv problem needs a path");
    rp.lookup = true;
    rp.dataset = testbed::load_csv_pool(pc.path);
    rp.problem.name = "csv:" + pc.path;
  } else {
    throw Error("run config: unknown problem '" + pc.name + "'");
  }
  if (rp.lookup) {
    rp.problem.input_dim = int(rp.dataset.designs.cols());
    rp.problem.objective_dim = int(rp.dataset.true_objectives.cols());
  }
  return rp;
}

struct PoolDraw {
  Matrix designs;   // n x d, unit cube
  Matrix true_obj;  // n x M
  std::vector<int> rows;  // lookup dataset rows, empty for functional pools
};

// First `k` entries of a seeded random permutation of ids.
void partial_shuffle(std::vector<int>& ids, std::size_t k,
                     std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, ids.size() - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
}

}  // namespace

RunRecord run_bo(const RunConfig& config_in) {
  RunConfig cfg = config_in;
  ResolvedProblem rp = build_problem(cfg.problem);
  const int d = rp.problem.input_dim;
  const int M = rp.problem.objective_dim;
  if (cfg.initial <= 0) cfg.initial = 2 * (d + 1);
  if (cfg.pool_size <= 0) cfg.pool_size = 100 * cfg.batch;
  require(cfg.iterations >= 1, "run_bo: iterations must be >= 1");
  require(cfg.batch >= 1, "run_bo: batch must be >= 1");
  require(cfg.initial >= 2, "run_bo: initial design size must be >= 2");
  require(cfg.pool_size >= cfg.batch, "run_bo: pool smaller than batch");
  require(cfg.posterior_samples >= 1, "run_bo: need posterior samples");
  const int T = cfg.iterations, B = cfg.batch, N0 = cfg.initial;
  const int N = cfg.pool_size, L = cfg.posterior_samples;
  const std::size_t total = std::size_t(N0) + std::size_t(T) * B;
  if (rp.lookup) {
    require(std::size_t(rp.dataset.designs.rows()) >= total,
            "run_bo: lookup pool has fewer rows than the run evaluates");
  }

  std::vector<char> used(rp.lookup ? rp.dataset.designs.rows() : 0, 0);
  auto draw_pool = [&](int t) {
    auto rng = seeded_rng(cfg.seed, kPoolTag, std::uint64_t(t));
    PoolDraw pool;
    if (!rp.lookup) {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      pool.designs.resize(N, d);
      pool.true_obj.resize(N, M);
      Vector x(d);
      for (int i = 0; i < N; ++i) {
        for (int j = 0; j < d; ++j) x[j] = unif(rng);
        pool.designs.row(i) = x.transpose();
        pool.true_obj.row(i) = rp.problem.evaluate(x).transpose();
      }
    } else {
      std::vector<int> ids;
      for (int r = 0; r < int(used.size()); ++r) {
        if (!used[r]) ids.push_back(r);
      }
      require(int(ids.size()) >= B, "run_bo: iteration " + std::to_string(t) +
                                        ": candidate pool exhausted");
      const std::size_t n = std::min<std::size_t>(ids.size(), std::size_t(N));
      partial_shuffle(ids, n, rng);
      pool.designs.resize(n, d);
      pool.true_obj.resize(n, M);
      pool.rows.assign(ids.begin(), ids.begin() + n);
      for (std::size_t i = 0; i < n; ++i) {
        pool.designs.row(i) = rp.dataset.designs.row(pool.rows[i]);
        pool.true_obj.row(i) = rp.dataset.true_objectives.row(pool.rows[i]);
      }
    }
    return pool;
  };

  // Observation-noise scale: configured, or 1% of each objective's range
  // over an acquisition-independent sample (the full lookup dataset, or the
  // first iteration's candidate pool).
  Matrix range_source =
      rp.lookup ? rp.dataset.true_objectives : draw_pool(1).true_obj;
  if (cfg.noise_sigma.empty()) {
    for (int m = 0; m < M; ++m) {
      cfg.noise_sigma.push_back(
          0.01 * (range_source.col(m).maxCoeff() - range_source.col(m).minCoeff()));
    }
  }
  require(int(cfg.noise_sigma.size()) == M,
          "run_bo: noise_sigma length does not match objectives");
  for (double s : cfg.noise_sigma) {
    require(std::isfinite(s) && s >= 0.0, "run_bo: noise_sigma must be >= 0");
  }

  RunRecord record;
  record.evaluated_designs.resize(total, d);
  record.evaluated_true_objectives.resize(total, M);
  record.evaluated_observations.resize(total, M);
  Dataset data(d, M);
  auto noise_rng = seeded_rng(cfg.seed, kNoiseTag);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto observe = [&](const Vector& x, const Vector& y_true, int iteration) {
    Vector y_noisy(M);
    for (int m = 0; m < M; ++m) {
      y_noisy[m] = y_true[m] + cfg.noise_sigma[std::size_t(m)] * gauss(noise_rng);
    }
    const std::size_t row = data.size();
    record.evaluated_designs.row(row) = x.transpose();
    record.evaluated_true_objectives.row(row) = y_true.transpose();
    record.evaluated_observations.row(row) = y_noisy.transpose();
    data.add(DesignPoint{x}, std::move(y_noisy), iteration);
  };

  {
    auto init_rng = seeded_rng(cfg.seed, kInitTag);
    if (!rp.lookup) {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Vector x(d);
      for (int i = 0; i < N0; ++i) {
        for (int j = 0; j < d; ++j) x[j] = unif(init_rng);
        observe(x, rp.problem.evaluate(x), 0);
      }
    } else {
      std::vector<int> ids(used.size());
      for (int r = 0; r < int(ids.size()); ++r) ids[r] = r;
      partial_shuffle(ids, std::size_t(N0), init_rng);
      for (int i = 0; i < N0; ++i) {
        const int r = ids[std::size_t(i)];
        used[r] = 1;
        observe(rp.dataset.designs.row(r).transpose(),
                rp.dataset.true_objectives.row(r).transpose(), 0);
      }
    }
  }

  // Hypervolume reference: componentwise minimum of the initial observations,
  // pushed 1% of their span further down; frozen before the loop starts.
  record.hv_ref = Vector(M);
  for (int m = 0; m < M; ++m) {
    const double lo = record.evaluated_observations.col(m).head(N0).minCoeff();
    const double hi = record.evaluated_observations.col(m).head(N0).maxCoeff();
    record.hv_ref[m] = lo - 0.01 * std::max(hi - lo, 1e-9);
  }

  std::vector<Vector> evaluated_true;
  evaluated_true.reserve(total);
  for (int i = 0; i < N0; ++i) {
    evaluated_true.push_back(record.evaluated_true_objectives.row(i).transpose());
  }

  PoolDraw pool;
  for (int t = 1; t <= T; ++t) {
    if (cfg.resample_pool || t == 1) pool = draw_pool(t);
    const std::size_t pool_n = std::size_t(pool.designs.rows());
    require(pool_n >= std::size_t(B), "run_bo: iteration " + std::to_string(t) +
                                          ": candidate pool exhausted");

    gp::PosteriorSamples pool_samples, observed_samples;
    {
      std::vector<gp::GaussianProcessModel> models;
      try {
        models = gp::fit_all(data, mix_seed(cfg.seed, kGpFitTag, std::uint64_t(t)));
      } catch (const std::exception& e) {
        throw Error("run_bo: iteration " + std::to_string(t) +
                    ": surrogate fit failed: " + e.what());
      }
      Matrix query(pool_n + data.size(), d);
      query.topRows(pool_n) = pool.designs;
      query.bottomRows(data.size()) = data.design_matrix();
      const gp::Posterior post = gp::posterior(models, query);
      const gp::PosteriorSamples joint = gp::sample_posterior(
          post, L, mix_seed(cfg.seed, kGpSampleTag, std::uint64_t(t)));
      pool_samples.seed = observed_samples.seed = joint.seed;
      for (const Matrix& v : joint.values) {
        pool_samples.values.push_back(v.topRows(pool_n));
        observed_samples.values.push_back(v.bottomRows(data.size()));
      }
    }

    acquisition::AcquisitionSpec aspec = cfg.acquisition;
    aspec.seed = mix_seed(cfg.seed, kAcqTag, std::uint64_t(t));
    acquisition::AcquisitionScores acq;
    const auto t0 = std::chrono::steady_clock::now();
    switch (aspec.kind) {
      case acquisition::Kind::botied_v1:
        acq = acquisition::botied_v1(pool_samples, std::size_t(B), aspec);
        break;
      case acquisition::Kind::botied_v2:
        acq = acquisition::botied_v2(pool_samples, std::size_t(B), aspec);
        break;
      case acquisition::Kind::nehvi:
        acq = acquisition::nehvi(pool_samples, observed_samples, record.hv_ref,
                                 std::size_t(B));
        break;
      case acquisition::Kind::nparego:
        acq = acquisition::nparego(pool_samples, observed_samples,
                                   data.objective_matrix(), std::size_t(B), aspec);
        break;
      case acquisition::Kind::random_pick:
        acq = acquisition::random_select(pool_n, std::size_t(B), aspec.seed);
        break;
    }
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - t0;

    IterationRow row;
    row.iteration = t;
    row.acq_wall_seconds = std::max(elapsed.count(), 1e-9);
    row.selected = acq.selected;
    for (std::size_t idx : acq.selected) {
      observe(pool.designs.row(idx).transpose(), pool.true_obj.row(idx).transpose(), t);
      evaluated_true.push_back(pool.true_obj.row(idx).transpose());
      if (rp.lookup) used[std::size_t(pool.rows[idx])] = 1;
    }
    row.hypervolume = indicators::hypervolume(evaluated_true, record.hv_ref);
    record.rows.push_back(std::move(row));
  }

  // CDF-indicator trace, computed against one estimator per run: margins and
  // vine fitted on the final candidate pool's true objectives plus every
  // evaluated point, so runs differing only in acquisition share the pool
  // part of the reference exactly.
  {
    Matrix reference(pool.true_obj.rows() + Eigen::Index(total), M);
    reference.topRows(pool.true_obj.rows()) = pool.true_obj;
    reference.bottomRows(Eigen::Index(total)) = record.evaluated_true_objectives;
    const indicators::CdfEstimator estimator(reference, copula::Family::gaussian);
    const std::vector<double> scores = estimator.scores(record.evaluated_true_objectives);
    double best = -1.0;
    std::size_t consumed = std::size_t(N0);
    for (std::size_t i = 0; i < consumed; ++i) best = std::max(best, scores[i]);
    for (auto& row : record.rows) {
      for (std::size_t i = 0; i < std::size_t(B); ++i) {
        best = std::max(best, scores[consumed++]);
      }
      row.cdf_indicator = best;
    }
  }

  record.config = cfg;
  record.final_hypervolume = record.rows.back().hypervolume;
  record.final_cdf = record.rows.back().cdf_indicator;

  if (!cfg.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    require(!ec, "run_bo: cannot create output directory '" + cfg.output_dir + "'");
    const auto dir = std::filesystem::path(cfg.output_dir);
    std::ofstream trace(dir / "trace.csv");
    trace << record.trace_csv();
    require(trace.good(), "run_bo: failed writing trace.csv");
    std::ofstream rc(dir / "resolved_config.json");
    rc << record.resolved_config_json() << "\n";
    require(rc.good(), "run_bo: failed writing resolved_config.json");
  }
  return record;
}

std::string RunRecord::trace_csv() const {
  std::string out = "iteration,hypervolume,cdf_indicator,acq_wall_seconds,selected_indices\n";
  for (const auto& row : rows) {
    out += std::to_string(row.iteration);
    out += ',';
    out += fmt12(row.hypervolume);
    out += ',';
    out += fmt12(row.cdf_indicator);
    out += ',';
    out += fmt12(row.acq_wall_seconds);
    out += ',';
    for (std::size_t i = 0; i < row.selected.size(); ++i) {
      if (i) out += ';';
      out += std::to_string(row.selected[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["problem"] = {{"name", cfg.problem.name}, {"d", cfg.problem.d},
                  {"m", cfg.problem.m},       {"theta", cfg.problem.theta},
                  {"pool_n", cfg.problem.pool_n},
                  {"pool_seed", cfg.problem.pool_seed},
                  {"path", cfg.problem.path}};
  j["acquisition"] = {
      {"kind", acquisition::kind_name(cfg.acquisition.kind)},
      {"family", copula::family_name(cfg.acquisition.family_policy)},
      {"mc_cdf_samples", cfg.acquisition.mc_cdf_samples},
      {"chebyshev_rho", cfg.acquisition.chebyshev_rho}};
  j["iterations"] = cfg.iterations;
  j["batch"] = cfg.batch;
  j["initial"] = cfg.initial;
  j["pool_size"] = cfg.pool_size;
  j["posterior_samples"] = cfg.posterior_samples;
  j["seed"] = cfg.seed;
  j["noise_sigma"] = cfg.noise_sigma;
  j["resample_pool"] = cfg.resample_pool;
  j["output_dir"] = cfg.output_dir;
  return j;
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
  throw Error("run config: unknown key '" + key + "' in " + section);
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "problem") {
      for (const auto& [k, v] : value.items()) {
        if (k == "name") cfg.problem.name = v.get<std::string>();
        else if (k == "d") cfg.problem.d = v.get<int>();
        else if (k == "m") cfg.problem.m = v.get<int>();
        else if (k == "theta") cfg.problem.theta = v.get<double>();
        else if (k == "pool_n") cfg.problem.pool_n = v.get<int>();
        else if (k == "pool_seed") cfg.problem.pool_seed = v.get<std::uint64_t>();
        else if (k == "path") cfg.problem.path = v.get<std::string>();
        else bad_key("problem", k);
      }
    } else if (key == "acquisition") {
      for (const auto& [k, v] : value.items()) {
        if (k == "kind") {
          cfg.acquisition.kind = acquisition::kind_from_name(v.get<std::string>());
        } else if (k == "family") {
          cfg.acquisition.family_policy = copula::family_from_name(v.get<std::string>());
        } else if (k == "mc_cdf_samples") {
          cfg.acquisition.mc_cdf_samples = v.get<int>();
        } else if (k == "chebyshev_rho") {
          cfg.acquisition.chebyshev_rho = v.get<double>();
        } else {
          bad_key("acquisition", k);
        }
      }
    } else if (key == "iterations") cfg.iterations = value.get<int>();
    else if (key == "batch") cfg.batch = value.get<int>();
    else if (key == "initial") cfg.initial = value.get<int>();
    else if (key == "pool_size") cfg.pool_size = value.get<int>();
    else if (key == "posterior_samples") cfg.posterior_samples = value.get<int>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "noise_sigma") cfg.noise_sigma = value.get<std::vector<double>>();
    else if (key == "resample_pool") cfg.resample_pool = value.get<bool>();
    else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
    else if (key == "hv_reference") {}  // informational, recomputed on rerun
    else bad_key("run config", key);
  }
  return cfg;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  try {
    return config_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("run config: ") + e.what());
  }
}

std::string RunConfig::to_json_text() const {
  return config_to_json(*this).dump(2);
}

std::string RunRecord::resolved_config_json() const {
  nlohmann::json j = config_to_json(config);
  j["hv_reference"] = std::vector<double>(hv_ref.data(), hv_ref.data() + hv_ref.size());
  return j.dump(2);
}

RunRecord load_run_record(const std::string& dir) {
  const auto path = std::filesystem::path(dir);
  std::ifstream rc(path / "resolved_config.json");
  require(rc.good(), "load_run_record: missing resolved_config.json in '" + dir + "'");
  std::stringstream rcbuf;
  rcbuf << rc.rdbuf();
  RunRecord record;
  record.config = RunConfig::from_json_text(rcbuf.str());
  try {
    const auto j = nlohmann::json::parse(rcbuf.str());
    if (j.contains("hv_reference")) {
      const auto v = j["hv_reference"].get<std::vector<double>>();
      record.hv_ref = Eigen::Map<const Vector>(v.data(), Eigen::Index(v.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("load_run_record: ") + e.what());
  }

  std::ifstream trace(path / "trace.csv");
  require(trace.good(), "load_run_record: missing trace.csv in '" + dir + "'");
  std::string line;
  require(bool(std::getline(trace, line)), "load_run_record: empty trace.csv");
  std::size_t lineno = 0;
  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    ++lineno;
    const auto cells = split(line, ',');
    require(cells.size() == 5, "load_run_record: trace row " +
                                   std::to_string(lineno) + ": expected 5 fields");
    const std::string where = "load_run_record: trace row " + std::to_string(lineno);
    IterationRow row;
    row.iteration = int(parse_double(cells[0], where));
    row.hypervolume = parse_double(cells[1], where);
    row.cdf_indicator = parse_double(cells[2], where);
    row.acq_wall_seconds = parse_double(cells[3], where);
    for (std::string_view tok : split(cells[4], ';')) {
      if (!tok.empty()) row.selected.push_back(std::size_t(parse_double(tok, where)));
    }
    record.rows.push_back(std::move(row));
  }
  require(!record.rows.empty(), "load_run_record: trace.csv has no rows");
  record.final_hypervolume = record.rows.back().hypervolume;
  record.final_cdf = record.rows.back().cdf_indicator;
  return record;
}

AggregateResult aggregate(const std::vector<RunRecord>& records) {
  require(!records.empty(), "aggregate: need at least one record");
  auto comparable = [](const RunRecord& r) {
    RunConfig c = r.config;
    c.seed = 0;
    c.acquisition = acquisition::AcquisitionSpec{};
    c.output_dir.clear();
    c.noise_sigma.clear();  // seed-derived when resolved from the pool range
    return c.to_json_text();
  };
  const std::string key = comparable(records.front());
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    require(comparable(r) == key,
            "aggregate: records disagree on the run configuration");
    groups[acquisition::kind_name(r.config.acquisition.kind)].push_back(&r);
  }
  auto mean_std = [](const std::vector<double>& xs) {
    const double n = double(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double std_ = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return std::pair<double, double>(mean, std_);
  };
  AggregateResult result;
  for (const auto& [method, rs] : groups) {
    std::vector<double> hv, cdf;
    for (const RunRecord* r : rs) {
      hv.push_back(r->final_hypervolume);
      cdf.push_back(r->final_cdf);
    }
    const auto [hm, hs] = mean_std(hv);
    const auto [cm, cs] = mean_std(cdf);
    result.methods.push_back({method, int(rs.size()), hm, hs, cm, cs});
  }
  return result;
}

std::string AggregateResult::summary_csv() const {
  std::string out = "method,replicates,hv_mean,hv_std,cdf_mean,cdf_std\n";
  for (const auto& m : methods) {
    out += m.method + ',' + std::to_string(m.replicates) + ',' + fmt12(m.hv_mean) +
           ',' + fmt12(m.hv_std) + ',' + fmt12(m.cdf_mean) + ',' + fmt12(m.cdf_std) +
           '\n';
  }
  return out;
}

std::string AggregateResult::table_text() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %4s %14s %12s %10s %10s\n", "method",
                "runs", "hv_mean", "hv_std", "cdf_mean", "cdf_std");
  std::string out = buf;
  for (const auto& m : methods) {
    std::snprintf(buf, sizeof buf, "%-12s %4d %14.4f %12.4f %10.4f %10.4f\n",
                  m.method.c_str(), m.replicates, m.hv_mean, m.hv_std, m.cdf_mean,
                  m.cdf_std);
    out += buf;
  }
  return out;
}

std::string curves_csv(const std::vector<RunRecord>& records) {
  std::string out = "method,seed,iteration,hypervolume,cdf_indicator\n";
  for (const RunRecord& r : records) {
    const std::string prefix = std::string(acquisition::kind_name(r.config.acquisition.kind)) +
                               ',' + std::to_string(r.config.seed) + ',';
    for (const auto& row : r.rows) {
      out += prefix + std::to_string(row.iteration) + ',' + fmt12(row.hypervolume) +
             ',' + fmt12(row.cdf_indicator) + '\n';
    }
  }
  return out;
}

std::vector<TimingRow> timing_benchmark(const TimingConfig& config) {
  require(config.repeats >= 1, "timing: repeats must be >= 1");
  require(config.pool_size >= 1 && config.posterior_samples >= 1 &&
              config.front_size >= 1,
          "timing: sizes must be positive");
  std::vector<TimingRow> out;
  for (const int m : config.m_list) {
    require(m >= 2, "timing: need at least 2 objectives");
    auto rng = seeded_rng(config.seed, kTimingTag, std::uint64_t(m));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Observed front: points on the positive unit shell are mutually
    // non-dominated, giving a front of exactly front_size points.
    Matrix observed(config.front_size, m);
    for (int i = 0; i < config.front_size; ++i) {
      Vector v(m);
      for (int j = 0; j < m; ++j) v[j] = std::abs(gauss(rng)) + 1e-3;
      observed.row(i) = (v / v.norm()).transpose();
    }
    Matrix pool(config.pool_size, m);
    for (int i = 0; i < config.pool_size; ++i) {
      for (int j = 0; j < m; ++j) pool(i, j) = unif(rng);
    }
    gp::PosteriorSamples pool_samples, observed_samples;
    pool_samples.seed = observed_samples.seed = config.seed;
    for (int l = 0; l < config.posterior_samples; ++l) {
      Matrix pv = pool, ov = observed;
      for (int i = 0; i < pv.rows(); ++i) {
        for (int j = 0; j < m; ++j) pv(i, j) += 0.05 * gauss(rng);
      }
      for (int i = 0; i < ov.rows(); ++i) {
        for (int j = 0; j < m; ++j) ov(i, j) += 0.05 * gauss(rng);
      }
      pool_samples.values.push_back(std::move(pv));
      observed_samples.values.push_back(std::move(ov));
    }
    const Vector ref = Vector::Constant(m, -0.1);

    for (const acquisition::Kind kind : config.kinds) {
      TimingRow row{acquisition::kind_name(kind), m, config.repeats, 0.0, false};
      if (kind == acquisition::Kind::nehvi && m > config.nehvi_m_cap) {
        row.skipped = true;
        out.push_back(row);
        continue;
      }
      acquisition::AcquisitionSpec aspec;
      aspec.kind = kind;
      aspec.seed = mix_seed(config.seed, kTimingTag, std::uint64_t(m));
      auto call = [&] {
        switch (kind) {
          case acquisition::Kind::botied_v1:
            (void)acquisition::botied_v1(pool_samples, 1, aspec);
            break;
          case acquisition::Kind::botied_v2:
            (void)acquisition::botied_v2(pool_samples, 1, aspec);
            break;
          case acquisition::Kind::nehvi:
            (void)acquisition::nehvi(pool_samples, observed_samples, ref, 1);
            break;
          case acquisition::Kind::nparego:
            (void)acquisition::nparego(pool_samples, observed_samples, observed, 1, aspec);
            break;
          case acquisition::Kind::random_pick:
            (void)acquisition::random_select(std::size_t(config.pool_size), 1, aspec.seed);
            break;
        }
      };
      call();  // warm caches and allocators before timing
      std::vector<double> times;
      for (int r = 0; r < config.repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        call();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        times.push_back(std::max(dt.count(), 1e-9));
      }
      std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
      row.median_seconds = times[times.size() / 2];
      out.push_back(row);
    }
  }
  return out;
}

std::string timing_csv(const std::vector<TimingRow>& rows) {
  std::string out = "method,m,repeats,median_seconds,skipped\n";
  for (const auto& r : rows) {
    out += r.method + ',' + std::to_string(r.m) + ',' + std::to_string(r.repeats) +
           ',' + (r.skipped ? "" : fmt12(r.median_seconds)) + ',' +
           (r.skipped ? "1" : "0") + '\n';
  }
  return out;
}

std::string timing_table(const std::vector<TimingRow>& rows) {
  char buf[120];
  std::snprintf(buf, sizeof buf, "%-12s %3s %8s %16s\n", "method", "m", "repeats",
                "median_sec");
  std::string out = buf;
  for (const auto& r : rows) {
    if (r.skipped) {
      std::snprintf(buf, sizeof buf, "%-12s %3d %8d %16s\n", r.method.c_str(), r.m,
                    r.repeats, "--");
    } else {
      std::snprintf(buf, sizeof buf, "%-12s %3d %8d %16.6f\n", r.method.c_str(), r.m,
                    r.repeats, r.median_seconds);
    }
    out += buf;
  }
  return out;
}

}  // namespace mobo::harness
