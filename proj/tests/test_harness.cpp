#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <mobo/harness.hpp>

using mobo::Matrix;
using mobo::Vector;
namespace hn = mobo::harness;
namespace acq = mobo::acquisition;

namespace {

hn::RunConfig small_config() {
  hn::RunConfig cfg;
  cfg.problem.name = "branin_currin";
  cfg.acquisition.kind = acq::Kind::random_pick;
  cfg.iterations = 2;
  cfg.batch = 2;
  cfg.pool_size = 40;
  cfg.posterior_samples = 4;
  cfg.seed = 5;
  return cfg;
}

bool rows_equal_modulo_wall(const hn::RunRecord& a, const hn::RunRecord& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.iteration != y.iteration || x.hypervolume != y.hypervolume ||
        x.cdf_indicator != y.cdf_indicator || x.selected != y.selected) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("a run grows the dataset by batch points per iteration") {
  hn::RunConfig cfg = small_config();
  cfg.iterations = 1;
  cfg.batch = 1;
  const hn::RunRecord rec = hn::run_bo(cfg);
  const int n0 = 2 * (2 + 1);
  CHECK(rec.config.initial == n0);
  CHECK(rec.evaluated_designs.rows() == n0 + 1);
  CHECK(rec.rows.size() == 1);
  CHECK(rec.rows[0].selected.size() == 1);
  CHECK(rec.rows[0].acq_wall_seconds > 0.0);
  CHECK(rec.final_hypervolume > 0.0);
  CHECK(rec.final_cdf > 0.0);
  CHECK(rec.final_cdf <= 1.0);
}

TEST_CASE("defaults resolve to the documented experiment settings") {
  const hn::RunConfig cfg = hn::RunConfig::from_json_text(
      "{\"problem\": {\"name\": \"branin_currin\"}, \"seed\": 3}");
  CHECK(cfg.iterations == 30);
  CHECK(cfg.batch == 4);
  CHECK(cfg.pool_size == 0);
  CHECK(cfg.posterior_samples == 20);
  CHECK(cfg.initial == 0);
  CHECK(cfg.seed == 3);
  CHECK(cfg.resample_pool);
  CHECK(cfg.acquisition.kind == acq::Kind::botied_v1);
  // Zeros resolve once a run record comes back.
  hn::RunConfig run = cfg;
  run.iterations = 1;
  run.posterior_samples = 2;
  const hn::RunRecord rec = hn::run_bo(run);
  CHECK(rec.config.pool_size == 400);
  CHECK(rec.config.initial == 6);
  CHECK(rec.config.noise_sigma.size() == 2);
  CHECK(rec.config.noise_sigma[0] > 0.0);
  CHECK(rec.hv_ref.size() == 2);
}

TEST_CASE("identical config and seed reproduce the record modulo wall time") {
  const hn::RunConfig cfg = small_config();
  const hn::RunRecord a = hn::run_bo(cfg);
  const hn::RunRecord b = hn::run_bo(cfg);
  CHECK(rows_equal_modulo_wall(a, b));
  CHECK((a.evaluated_observations.array() == b.evaluated_observations.array()).all());
  CHECK((a.hv_ref.array() == b.hv_ref.array()).all());
  hn::RunConfig other = cfg;
  other.seed = 6;
  const hn::RunRecord c = hn::run_bo(other);
  CHECK(!rows_equal_modulo_wall(a, c));
}

TEST_CASE("re-running the embedded resolved config reproduces the record") {
  hn::RunConfig cfg = small_config();
  cfg.acquisition.kind = acq::Kind::botied_v1;
  cfg.posterior_samples = 3;
  const hn::RunRecord a = hn::run_bo(cfg);
  const hn::RunConfig embedded = hn::RunConfig::from_json_text(a.resolved_config_json());
  CHECK(embedded.pool_size == 40);
  CHECK(embedded.noise_sigma.size() == 2);
  const hn::RunRecord b = hn::run_bo(embedded);
  CHECK(rows_equal_modulo_wall(a, b));
  CHECK((a.hv_ref.array() == b.hv_ref.array()).all());
}

TEST_CASE("the hypervolume trace never decreases") {
  hn::RunConfig cfg = small_config();
  cfg.iterations = 4;
  for (auto kind : {acq::Kind::random_pick, acq::Kind::nparego}) {
    cfg.acquisition.kind = kind;
    const hn::RunRecord rec = hn::run_bo(cfg);
    for (std::size_t i = 1; i < rec.rows.size(); ++i) {
      CHECK(rec.rows[i].hypervolume >= rec.rows[i - 1].hypervolume);
      CHECK(rec.rows[i].cdf_indicator >= rec.rows[i - 1].cdf_indicator);
    }
  }
}

TEST_CASE("lookup pools are drawn without replacement and can exhaust") {
  hn::RunConfig cfg = small_config();
  cfg.problem.name = "copulabc";
  cfg.problem.pool_n = 60;
  cfg.problem.theta = 2.0;
  cfg.iterations = 2;
  cfg.batch = 2;
  cfg.pool_size = 30;
  const hn::RunRecord rec = hn::run_bo(cfg);
  // Evaluated designs are distinct dataset rows.
  for (int i = 0; i < rec.evaluated_designs.rows(); ++i) {
    for (int j = 0; j < i; ++j) {
      CHECK((rec.evaluated_designs.row(i) - rec.evaluated_designs.row(j)).norm() > 0.0);
    }
  }
  hn::RunConfig tiny = cfg;
  tiny.problem.pool_n = 9;
  CHECK_THROWS_AS((void)hn::run_bo(tiny), mobo::Error);
}

TEST_CASE("run outputs round-trip through the output directory") {
  const std::string dir = "harness_run_out";
  std::filesystem::remove_all(dir);
  hn::RunConfig cfg = small_config();
  cfg.output_dir = dir;
  const hn::RunRecord rec = hn::run_bo(cfg);
  CHECK(std::filesystem::exists(dir + "/trace.csv"));
  CHECK(std::filesystem::exists(dir + "/resolved_config.json"));
  const hn::RunRecord loaded = hn::load_run_record(dir);
  REQUIRE(loaded.rows.size() == rec.rows.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    CHECK(loaded.rows[i].iteration == rec.rows[i].iteration);
    CHECK(loaded.rows[i].selected == rec.rows[i].selected);
    CHECK(loaded.rows[i].hypervolume == doctest::Approx(rec.rows[i].hypervolume).epsilon(1e-9));
    CHECK(loaded.rows[i].cdf_indicator == doctest::Approx(rec.rows[i].cdf_indicator).epsilon(1e-9));
    CHECK(loaded.rows[i].acq_wall_seconds == doctest::Approx(rec.rows[i].acq_wall_seconds).epsilon(1e-9));
  }
  CHECK(loaded.config.seed == cfg.seed);
  CHECK((loaded.hv_ref - rec.hv_ref).cwiseAbs().maxCoeff() < 1e-12);
  const std::string trace = rec.trace_csv();
  CHECK(trace.rfind("iteration,hypervolume,cdf_indicator,acq_wall_seconds,selected_indices\n", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("aggregate reports per-method mean and sample deviation") {
  auto record_with = [](acq::Kind kind, std::uint64_t seed, double hv, double cdf) {
    hn::RunRecord r;
    r.config = small_config();
    r.config.acquisition.kind = kind;
    r.config.seed = seed;
    r.final_hypervolume = hv;
    r.final_cdf = cdf;
    hn::IterationRow row;
    row.iteration = 1;
    row.hypervolume = hv;
    row.cdf_indicator = cdf;
    row.acq_wall_seconds = 1e-3;
    row.selected = {0};
    r.rows.push_back(row);
    return r;
  };
  const auto a = record_with(acq::Kind::botied_v1, 0, 1.0, 0.5);
  const auto b = record_with(acq::Kind::botied_v1, 1, 3.0, 0.7);
  const auto c = record_with(acq::Kind::random_pick, 0, 2.0, 0.4);

  const hn::AggregateResult single = hn::aggregate({a});
  REQUIRE(single.methods.size() == 1);
  CHECK(single.methods[0].hv_std == 0.0);

  const hn::AggregateResult two = hn::aggregate({a, b, c});
  REQUIRE(two.methods.size() == 2);
  CHECK(two.methods[0].method == "botied_v1");
  CHECK(two.methods[0].replicates == 2);
  CHECK(two.methods[0].hv_mean == doctest::Approx(2.0));
  CHECK(two.methods[0].hv_std == doctest::Approx(std::sqrt(2.0)));
  CHECK(two.methods[1].method == "random");

  const hn::AggregateResult permuted = hn::aggregate({c, b, a});
  CHECK(permuted.summary_csv() == two.summary_csv());

  hn::RunRecord odd = record_with(acq::Kind::botied_v1, 2, 1.0, 0.5);
  odd.config.iterations = 99;
  CHECK_THROWS_AS((void)hn::aggregate({a, odd}), mobo::Error);
  CHECK_THROWS_AS((void)hn::aggregate({}), mobo::Error);

  const std::string curves = hn::curves_csv({a, c});
  CHECK(curves.find("method,seed,iteration,hypervolume,cdf_indicator\n") == 0);
  CHECK(curves.find("botied_v1,0,1,1,0.5\n") != std::string::npos);
  CHECK(curves.find("random,0,1,2,0.4\n") != std::string::npos);
}

TEST_CASE("config parsing rejects unknown keys and bad json") {
  CHECK_THROWS_AS((void)hn::RunConfig::from_json_text("{\"bogus\": 1}"), mobo::Error);
  CHECK_THROWS_AS((void)hn::RunConfig::from_json_text("{\"problem\": {\"q\": 1}}"), mobo::Error);
  CHECK_THROWS_AS((void)hn::RunConfig::from_json_text("not json"), mobo::Error);
  CHECK_THROWS_AS((void)hn::run_bo(hn::RunConfig::from_json_text(
                      "{\"problem\": {\"name\": \"nope\"}}")),
                  mobo::Error);
}

TEST_CASE("timing benchmark produces one row per method and m") {
  hn::TimingConfig tc;
  tc.m_list = {2, 3};
  tc.kinds = {acq::Kind::botied_v1, acq::Kind::nehvi, acq::Kind::random_pick};
  tc.repeats = 1;
  tc.pool_size = 40;
  tc.posterior_samples = 5;
  tc.front_size = 10;
  tc.nehvi_m_cap = 2;
  const auto rows = hn::timing_benchmark(tc);
  REQUIRE(rows.size() == 6);
  int skipped = 0;
  for (const auto& r : rows) {
    if (r.skipped) {
      ++skipped;
      CHECK(r.method == "nehvi");
      CHECK(r.m == 3);
    } else {
      CHECK(r.median_seconds > 0.0);
    }
    CHECK(r.repeats == 1);
  }
  CHECK(skipped == 1);
  const std::string csv = hn::timing_csv(rows);
  CHECK(csv.find("method,m,repeats,median_seconds,skipped\n") == 0);
  CHECK(csv.find("nehvi,3,1,,1\n") != std::string::npos);
  CHECK(hn::timing_table(rows).find("--") != std::string::npos);
}

TEST_CASE("candidate-doubling keeps botied timing sub-combinatorial") {
  hn::TimingConfig tc;
  tc.m_list = {3};
  tc.kinds = {acq::Kind::botied_v1};
  tc.repeats = 5;
  tc.pool_size = 100;
  tc.posterior_samples = 10;
  tc.front_size = 10;
  const double t1 = hn::timing_benchmark(tc)[0].median_seconds;
  tc.pool_size = 200;
  const double t2 = hn::timing_benchmark(tc)[0].median_seconds;
  CHECK(t2 < 8.0 * std::max(t1, 1e-4));
}
