#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "expresponse/experiments.hpp"
#include "expresponse/io.hpp"

using namespace expresponse;

namespace {

SweepOptions tiny() {
  SweepOptions o;
  o.batch_sizes = {10};
  o.agent_counts = {3};
  o.budgets = {3};
  o.horizon = 2000;
  o.seeds = 3;
  return o;
}

}  // namespace

TEST_CASE("worker pool runs every job once and propagates failures") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t k) {
                    if (k == 5) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("worker count honours the environment") {
  setenv("EXPRESPONSE_WORKERS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("EXPRESPONSE_WORKERS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("EXPRESPONSE_WORKERS");
}

TEST_CASE("seed derivation is deterministic and separates streams") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  const Eigen::VectorXd l = draw_lambdas(7, 0, 1000);
  CHECK(l.minCoeff() >= 0.05);
  CHECK(l.maxCoeff() < 1.0);
  CHECK(l == draw_lambdas(7, 0, 1000));
}

TEST_CASE("sweep results do not depend on the worker count") {
  SweepOptions a = tiny(), b = tiny();
  a.workers = 1;
  b.workers = 3;
  const auto ra = run_regret_sweep(a), rb = run_regret_sweep(b);
  REQUIRE(ra.size() == 1);
  CHECK(ra[0].mean_cumulative_regret == rb[0].mean_cumulative_regret);
  CHECK(ra[0].head_regret == rb[0].head_regret);
  CHECK(ra[0].t.size() == 200);
}

TEST_CASE("single-agent cells reach the optimum exactly") {
  SweepOptions o = tiny();
  o.agent_counts = {1};
  o.budgets = {2, 5};
  for (const auto& c : run_regret_sweep(o)) CHECK(c.tail_ratio == 1.0);
}

TEST_CASE("exp1 and exp2 write their files") {
  const std::string dir = std::string(TEST_SCRATCH) + "/sweeps";
  std::filesystem::remove_all(dir);
  SweepOptions o = tiny();
  o.horizon = 100;
  o.seeds = 1;
  o.batch_sizes = {5, 50};
  run_exp1(o, dir);
  CHECK(std::filesystem::exists(dir + "/exp1_bs5_n3.csv"));
  std::ifstream in(dir + "/exp1_bs5_n3.csv");
  const CsvTable t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"t", "regret_cum", "regret_round"});
  CHECK(t.rows.size() == 20);
  const auto summary = nlohmann::json::parse(read_file(dir + "/exp1_summary.json"));
  CHECK(summary["cells"].size() == 2);

  o.budgets = {2, 3};
  o.batch_sizes = {10};
  run_exp2(o, dir);
  std::ifstream in2(dir + "/exp2_cells.csv");
  const CsvTable cells = read_csv(in2);
  CHECK(cells.rows.size() == 2);
  for (const auto& row : cells.rows) CHECK(std::stod(row[cells.column("ratio")]) <= 1.0 + 1e-12);
}

TEST_CASE("sweep option validation") {
  SweepOptions o = tiny();
  o.seeds = 0;
  CHECK_THROWS_AS(run_regret_sweep(o), ArgumentError);
  o = tiny();
  o.batch_sizes = {5000};
  CHECK_THROWS_AS(run_regret_sweep(o), ArgumentError);
}

TEST_CASE("grid sweep aggregates seeds and writes the report") {
  GridConfig cfg = GridConfig::defaults();
  cfg.weeks = 4;
  const GridSweep s = run_grid_sweep(cfg, 2, 5, 2);
  CHECK(s.runs.size() == 2);
  CHECK(s.mean.size() == 4);
  CHECK(s.mean_of("baseline").peak1_daily ==
        doctest::Approx(0.5 * (s.runs[0][1].peak1_daily + s.runs[1][1].peak1_daily)));
  CHECK(s.reduction_vs_baseline("baseline") == doctest::Approx(1.0));
  const std::string dir = std::string(TEST_SCRATCH) + "/grid";
  write_grid_sweep(s, cfg, dir);
  for (const char* f : {"gridsim_no-discount.csv", "gridsim_baseline.csv", "gridsim_learner-w.csv",
                        "gridsim_learner-uw.csv", "gridsim_comparison.csv", "gridsim_summary.json"})
    CHECK(std::filesystem::exists(dir + "/" + f));
}
