#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <mobo/harness.hpp>
#include <mobo/testbed.hpp>

namespace {

namespace fs = std::filesystem;
namespace hn = mobo::harness;
namespace acq = mobo::acquisition;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  mobo::require(in.good(), "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  mobo::require(out.good(), "failed writing '" + path.string() + "'");
}

std::vector<acq::Kind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<acq::Kind> kinds;
  for (const auto& n : names) kinds.push_back(acq::kind_from_name(n));
  return kinds;
}

// Directories holding a trace.csv under any of the given roots, sorted.
std::vector<std::string> find_run_dirs(const std::vector<std::string>& roots) {
  std::vector<std::string> dirs;
  for (const auto& root : roots) {
    mobo::require(fs::exists(root), "no such path '" + root + "'");
    if (fs::exists(fs::path(root) / "trace.csv")) {
      dirs.push_back(root);
      continue;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().filename() == "trace.csv") {
        dirs.push_back(entry.path().parent_path().string());
      }
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::int64_t seed, const std::string& method) {
  hn::RunConfig cfg = hn::RunConfig::from_json_text(read_file(config_path));
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed >= 0) cfg.seed = std::uint64_t(seed);
  if (!method.empty()) cfg.acquisition.kind = acq::kind_from_name(method);
  const hn::RunRecord rec = hn::run_bo(cfg);
  std::cout << "method " << acq::kind_name(rec.config.acquisition.kind)
            << "  seed " << rec.config.seed << "  iterations "
            << rec.config.iterations << "\n"
            << "final hypervolume " << rec.final_hypervolume
            << "  final cdf indicator " << rec.final_cdf << "\n";
  if (!cfg.output_dir.empty()) {
    std::cout << "wrote " << cfg.output_dir << "/trace.csv\n";
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int seeds, const std::vector<std::string>& methods, int threads) {
  const hn::RunConfig base = hn::RunConfig::from_json_text(read_file(config_path));
  const std::vector<acq::Kind> kinds = parse_kinds(methods);
  mobo::require(seeds >= 1, "sweep: need at least one seed");
  mobo::require(!kinds.empty(), "sweep: need at least one method");

  struct Job {
    hn::RunConfig cfg;
    std::string dir;
  };
  std::vector<Job> jobs;
  for (const acq::Kind kind : kinds) {
    for (int s = 0; s < seeds; ++s) {
      hn::RunConfig cfg = base;
      cfg.acquisition.kind = kind;
      cfg.seed = std::uint64_t(s);
      cfg.output_dir = (fs::path(out_dir) / acq::kind_name(kind) /
                        ("seed" + std::to_string(s)))
                           .string();
      jobs.push_back({std::move(cfg), {}});
      jobs.back().dir = jobs.back().cfg.output_dir;
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex io;
  std::vector<std::string> failures;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const hn::RunRecord rec = hn::run_bo(jobs[i].cfg);
        const std::scoped_lock lock(io);
        std::cout << "done " << jobs[i].dir << "  hv " << rec.final_hypervolume
                  << "  cdf " << rec.final_cdf << std::endl;
      } catch (const std::exception& e) {
        const std::scoped_lock lock(io);
        failures.push_back(jobs[i].dir + ": " + e.what());
        std::cout << "FAILED " << jobs[i].dir << ": " << e.what() << std::endl;
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, int(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!failures.empty()) {
    std::cerr << failures.size() << " of " << jobs.size() << " runs failed\n";
    return 1;
  }

  std::vector<hn::RunRecord> records;
  for (const auto& dir : find_run_dirs({out_dir})) {
    records.push_back(hn::load_run_record(dir));
  }
  const hn::AggregateResult agg = hn::aggregate(records);
  write_file(fs::path(out_dir) / "summary.csv", agg.summary_csv());
  write_file(fs::path(out_dir) / "curves.csv", hn::curves_csv(records));
  std::cout << "\n" << agg.table_text();
  std::cout << "wrote " << out_dir << "/summary.csv and curves.csv\n";
  return 0;
}

int cmd_aggregate(const std::vector<std::string>& paths, const std::string& out_dir) {
  std::vector<hn::RunRecord> records;
  for (const auto& dir : find_run_dirs(paths)) {
    records.push_back(hn::load_run_record(dir));
  }
  mobo::require(!records.empty(), "aggregate: no run directories found");
  const hn::AggregateResult agg = hn::aggregate(records);
  std::cout << agg.table_text();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "summary.csv", agg.summary_csv());
    write_file(fs::path(out_dir) / "curves.csv", hn::curves_csv(records));
    std::cout << "wrote " << out_dir << "/summary.csv and curves.csv\n";
  }
  return 0;
}

int cmd_timing(const hn::TimingConfig& tc, const std::string& out_dir) {
  const auto rows = hn::timing_benchmark(tc);
  std::cout << hn::timing_table(rows);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "timing.csv", hn::timing_csv(rows));
    std::cout << "wrote " << out_dir << "/timing.csv\n";
  }
  return 0;
}

int cmd_gen_copulabc(int n, double theta, std::uint64_t seed,
                     const std::string& out) {
  const mobo::testbed::PoolDataset pool =
      mobo::testbed::copulabc_generate(std::size_t(n), theta, seed);
  mobo::testbed::write_csv_pool(pool, out);
  std::cout << "wrote " << out << " (" << n << " rows, theta " << theta
            << ", seed " << seed << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-objective Bayesian optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, method;
  std::int64_t seed_override = -1;
  auto* run = app.add_subcommand("run", "Execute one BO run from a JSON config");
  run->add_option("--config", config_path, "Run config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--seed", seed_override, "Seed override");
  run->add_option("--method", method,
                  "Acquisition override: botied_v1|botied_v2|nehvi|nparego|random");

  std::vector<std::string> methods{"botied_v1", "botied_v2", "nehvi", "nparego",
                                   "random"};
  int seeds = 5, threads = int(std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand(
      "sweep", "Run a config across methods and seeds 0..seeds-1, then aggregate");
  sweep->add_option("--config", config_path, "Run config JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output root directory")->required();
  sweep->add_option("--seeds", seeds, "Number of replicate seeds (default 5)");
  sweep->add_option("--methods", methods, "Acquisitions to compare")->delimiter(',');
  sweep->add_option("--threads", threads, "Parallel replicate workers");

  std::vector<std::string> agg_paths;
  auto* aggregate =
      app.add_subcommand("aggregate", "Summarize run directories into a table");
  aggregate->add_option("paths", agg_paths, "Run or sweep directories")->required();
  aggregate->add_option("--out", out_dir, "Directory for summary.csv/curves.csv");

  hn::TimingConfig tc;
  std::vector<std::string> timing_methods{"botied_v1", "botied_v2", "nehvi"};
  auto* timing =
      app.add_subcommand("timing", "Median per-call acquisition wall times");
  timing->add_option("--m", tc.m_list, "Objective counts")->delimiter(',');
  timing->add_option("--methods", timing_methods, "Acquisitions")->delimiter(',');
  timing->add_option("--repeats", tc.repeats, "Calls per cell (default 7)");
  timing->add_option("--pool", tc.pool_size, "Candidate pool size (default 100)");
  timing->add_option("--samples", tc.posterior_samples,
                     "Posterior sample count (default 20)");
  timing->add_option("--front", tc.front_size, "Observed front size (default 30)");
  timing->add_option("--nehvi-cap", tc.nehvi_m_cap,
                     "Mark NEHVI skipped above this m (default 8)");
  std::int64_t timing_seed = 0;
  timing->add_option("--seed", timing_seed, "Instance seed");
  timing->add_option("--out", out_dir, "Directory for timing.csv");

  int gen_n = 10000;
  double gen_theta = 2.0;
  std::int64_t gen_seed = 0;
  std::string gen_out = "copulabc.csv";
  auto* gen = app.add_subcommand("gen-copulabc",
                                 "Generate the dependent-objective lookup pool");
  gen->add_option("--n", gen_n, "Number of rows (default 10000)");
  gen->add_option("--theta", gen_theta, "Dependence parameter (default 2.0)");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output CSV path");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seed_override, method);
    if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seeds, methods, threads);
    if (aggregate->parsed()) return cmd_aggregate(agg_paths, out_dir);
    if (timing->parsed()) {
      tc.kinds = parse_kinds(timing_methods);
      tc.seed = std::uint64_t(timing_seed);
      return cmd_timing(tc, out_dir);
    }
    if (gen->parsed()) return cmd_gen_copulabc(gen_n, gen_theta, std::uint64_t(gen_seed), gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
