#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <mobo/acquisition.hpp>
#include <mobo/common.hpp>
#include <mobo/testbed.hpp>

namespace mobo::harness {

// Which synthetic problem a run optimizes.  `name` selects the family:
// "branin_currin" (d, m fixed at 2), "dtlz2" (uses d and m), "copulabc"
// (lookup pool of pool_n rows generated with theta and pool_seed), or "csv"
// (lookup pool loaded from path).
struct ProblemConfig {
  std::string name = "branin_currin";
  int d = 2;
  int m = 2;
  double theta = 2.0;
  int pool_n = 10000;
  std::uint64_t pool_seed = 0;
  std::string path;
};

// Full description of one BO run.  Zeros mean "use the default": initial = 0
// resolves to 2*(d+1) and pool_size = 0 to 100*batch.  An empty noise_sigma
// resolves to 1% of each objective's candidate-pool range.  The acquisition
// seed field is ignored; per-iteration seeds derive from `seed`.
struct RunConfig {
  ProblemConfig problem;
  acquisition::AcquisitionSpec acquisition;
  int iterations = 30;
  int batch = 4;
  int initial = 0;
  int pool_size = 0;
  int posterior_samples = 20;
  std::uint64_t seed = 0;
  std::vector<double> noise_sigma;
  bool resample_pool = true;
  std::string output_dir;

  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct IterationRow {
  int iteration = 0;  // 1-based
  double hypervolume = 0.0;
  double cdf_indicator = 0.0;
  double acq_wall_seconds = 0.0;
  std::vector<std::size_t> selected;  // positions in that iteration's pool
};

// Everything a finished run produced.  `config` has all defaults resolved, so
// re-running it reproduces the record except for wall times.
struct RunRecord {
  RunConfig config;
  Vector hv_ref;
  std::vector<IterationRow> rows;
  Matrix evaluated_designs;          // (N0 + T*B) x d, evaluation order
  Matrix evaluated_true_objectives;  // same rows, noiseless values
  Matrix evaluated_observations;     // same rows, noisy values seen by the GP
  double final_hypervolume = 0.0;
  double final_cdf = 0.0;

  std::string trace_csv() const;
  std::string resolved_config_json() const;
};

// Runs the batched BO loop: seed N0 initial designs, then for each iteration
// draw a candidate pool, fit one GP per objective, draw L joint posterior
// samples over pool and evaluated designs, score with the configured
// acquisition, evaluate the chosen batch with observation noise, and record
// cumulative hypervolume, the CDF indicator, and the acquisition wall time.
// Metrics use true objective values; the hypervolume reference point and the
// CDF reference sample are derived from acquisition-independent streams so
// runs differing only in acquisition stay comparable.  Deterministic given
// the config; writes trace.csv and resolved_config.json into output_dir when
// it is set.
RunRecord run_bo(const RunConfig& config);

// Reads a record back from a directory holding trace.csv and
// resolved_config.json.  Evaluated-point matrices are not reloaded.
RunRecord load_run_record(const std::string& dir);

struct MethodSummary {
  std::string method;
  int replicates = 0;
  double hv_mean = 0.0, hv_std = 0.0;
  double cdf_mean = 0.0, cdf_std = 0.0;
};

struct AggregateResult {
  std::vector<MethodSummary> methods;  // sorted by method name

  std::string summary_csv() const;
  std::string table_text() const;
};

// Groups records by acquisition, averaging final-iteration hypervolume and
// CDF indicator; std is the sample standard deviation over replicate seeds.
// Records must agree on everything except seed and acquisition.
AggregateResult aggregate(const std::vector<RunRecord>& records);

// One row per (method, seed, iteration), for plotting metric-vs-iteration
// curves.
std::string curves_csv(const std::vector<RunRecord>& records);

struct TimingConfig {
  std::vector<int> m_list{2, 6};
  std::vector<acquisition::Kind> kinds{acquisition::Kind::botied_v1,
                                       acquisition::Kind::nehvi};
  int repeats = 7;
  int pool_size = 100;
  int posterior_samples = 20;
  int front_size = 30;
  int nehvi_m_cap = 8;  // NEHVI rows above this m are marked skipped
  std::uint64_t seed = 0;
};

struct TimingRow {
  std::string method;
  int m = 0;
  int repeats = 0;
  double median_seconds = 0.0;
  bool skipped = false;
};

// Medians of repeated single acquisition calls on a synthetic posterior-
// sample instance (non-dominated observed front of front_size points, pool of
// pool_size candidates, L sample draws).  Calls run one at a time.
std::vector<TimingRow> timing_benchmark(const TimingConfig& config);

std::string timing_csv(const std::vector<TimingRow>& rows);
std::string timing_table(const std::vector<TimingRow>& rows);

}  // namespace mobo::harness
