#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "expresponse/io.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(EXPRESPONSE_CLI) + " " + args + " 2>&1";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe.get())) out += buf.data();
  const int raw = pclose(pipe.release());
  return {WEXITSTATUS(raw), out};
}

std::string scratch(const std::string& name) {
  const std::string dir = std::string(TEST_SCRATCH) + "/" + name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("allocate prints the allocation and objective") {
  const Run r = run("allocate --lambdas 0.5,0.1 --budget 3");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("c = [3, 0], objective = 0.776870\n", 0) == 0);
  CHECK(r.out.find("agent,lambda") != std::string::npos);
}

TEST_CASE("allocate degenerate and invalid input") {
  const Run zero = run("allocate --lambdas 0,0 --budget 2");
  CHECK(zero.status == 0);
  CHECK(zero.out.rfind("c = [2, 0], objective = 0.0", 0) == 0);
  CHECK(run("allocate --lambdas 0.5 --budget 0").status != 0);
  CHECK(run("allocate --lambdas 0.5,x --budget 2").status != 0);
  CHECK(run("allocate --lambdas -1 --budget 2").status != 0);
  CHECK(run("allocate --budget 2").status != 0);
  CHECK(run("frobnicate").status != 0);
}

TEST_CASE("allocate with weighted groups") {
  const Run r = run("allocate --lambdas 0.3,0.3,0.3,0.3 --weights 4,2,1,1 --usages 50,25,12,12 --budget 15 --weighted");
  CHECK(r.status == 0);
  CHECK(r.out.rfind("c = [8, 4, 2, 1], objective = 71.458689", 0) == 0);
}

TEST_CASE("gridsim rejects a malformed config naming the key") {
  const std::string dir = scratch("badcfg");
  std::filesystem::create_directories(dir);
  expresponse::write_file(dir + "/cfg.json", R"({"groups":[{"name":"a","usage_share":0.5,"true_lambda":"fast","weight":1}]})");
  const Run r = run("gridsim --config " + dir + "/cfg.json --out " + dir);
  CHECK(r.status != 0);
  CHECK(r.out.find("groups[0].true_lambda") != std::string::npos);
}

TEST_CASE("exp1 smoke run with tiny horizon") {
  const std::string dir = scratch("exp1");
  const Run r = run("exp1 --horizon 100 --seeds 1 --out " + dir);
  CHECK(r.status == 0);
  int csvs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 9);
  std::ifstream in(dir + "/exp1_bs50_n4.csv");
  CHECK(expresponse::read_csv(in).rows.size() == 2);
}

TEST_CASE("bandit run writes trace, summary and history") {
  const std::string dir = scratch("bandit");
  const Run r = run("bandit --lambdas 0.8,0.2,0.4 --budget 4 --batch-size 20 --horizon 2000 --out " + dir);
  CHECK(r.status == 0);
  std::ifstream in(dir + "/bandit_trace.csv");
  const auto t = expresponse::read_csv(in);
  CHECK(t.rows.size() == 100);
  CHECK(t.header.back() == "c_3");
  const auto h = expresponse::history_from_json(expresponse::read_file(dir + "/bandit_history.json"));
  CHECK(h.rounds_elapsed == 2000);
}

TEST_CASE("every emitted CSV parses under its documented header") {
  const std::string dir = scratch("grid");
  const Run r = run("gridsim --weeks 3 --seeds 2 --out " + dir);
  CHECK(r.status == 0);
  CHECK(r.out.find("learner-uw") != std::string::npos);
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    std::ifstream in(e.path());
    const auto t = expresponse::read_csv(in);
    CHECK_FALSE(t.rows.empty());
    if (e.path().filename() != "gridsim_comparison.csv") CHECK(t.header == expresponse::kWindowCsvColumns);
  }
}
