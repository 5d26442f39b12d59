// Copyright 2026 The graphfb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "graphfb/errors.hpp"
#include "graphfb/experiment.hpp"
#include "graphfb/rng.hpp"

using namespace graphfb;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphfb_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallConfig = R"(# small sweep
[graph]
kind = full_info
K = 2

[learner]
name = exp3g

[adversary]
kind = switching-bernoulli
means = 0.45, 0.55

[sweep]
horizons = 2^6..2^8
seeds = 4
master_seed = 99
)";

}  // namespace

TEST_CASE("exact power laws fit exactly") {
  const ScalingFit a = fit_exponent({{100, 20}, {1000, 2 * std::sqrt(1000.0)}, {10000, 200}});
  CHECK(a.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(a.slope_stderr == doctest::Approx(0.0).epsilon(1e-9));
  const ScalingFit b = fit_exponent({{10, 10}, {20, 20}, {40, 40}, {80, 80}});
  CHECK(b.slope == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noisy power law recovers its exponent") {
  const CounterRng rng(4, streams::kLearner);
  std::vector<std::pair<double, double>> points;
  std::uint64_t c = 0;
  for (int e = 10; e <= 16; ++e) {
    const double t = std::ldexp(1.0, e);
    points.push_back({t, 3 * std::pow(t, 2.0 / 3.0) * std::exp(0.1 * rng.normal(c++))});
  }
  const ScalingFit f = fit_exponent(points);
  CHECK(f.slope >= 0.63);
  CHECK(f.slope <= 0.70);
  CHECK(f.slope_stderr > 0.0);
}

TEST_CASE("fits need three positive points") {
  CHECK_THROWS_AS(fit_exponent({{10, 1}, {100, 2}}), ParameterError);
  const ScalingFit f = fit_exponent({{10, 1}, {100, 0}, {1000, 4}, {10000, 8}});
  CHECK(f.points.size() == 3);
  CHECK(f.excluded == std::vector<double>{100});
  CHECK_THROWS_AS(fit_exponent({{10, 1}, {100, -1}, {1000, 4}}), ParameterError);
}

TEST_CASE("configs parse") {
  std::istringstream in(kSmallConfig);
  const ExperimentConfig c = parse_config(in);
  CHECK(c.graph.kind == "full_info");
  CHECK(c.graph.num_nodes == 2);
  CHECK(c.learner.name == "exp3g");
  CHECK(c.adversary.kind == "switching-bernoulli");
  CHECK(c.adversary.means == std::vector<double>{0.45, 0.55});
  CHECK(c.horizons == std::vector<std::size_t>{64, 128, 256});
  CHECK(c.seeds == 4);
  CHECK(c.master_seed == 99);
  std::istringstream list("[graph]\nkind=bandit\nK=3\n[learner]\nname=minibatch-exp3g\ntau=4\n"
                          "[sweep]\nhorizons = 100, 2^8, 1000\nout = res\n");
  const ExperimentConfig d = parse_config(list, "/base");
  CHECK(d.horizons == std::vector<std::size_t>{100, 256, 1000});
  CHECK(d.learner.params.at("tau") == 4.0);
  CHECK(d.out_dir == "/base/res");
}

TEST_CASE("config errors name the line and key") {
  CHECK(config_error("[graph]\nkind = bandit\nK = 2\n[sweep]\nhorizons = 100\nhorizons = 200\n")
            .find("line 6") != std::string::npos);
  CHECK(config_error("[graph]\nkind = bandit\nbogus = 1\n").find("graph.bogus") != std::string::npos);
  CHECK(config_error("[nowhere]\n").find("line 1") != std::string::npos);
  CHECK(config_error("kind = x\n").find("line 1") != std::string::npos);
  CHECK(config_error("[graph]\nK = two\n").find("line 2") != std::string::npos);
  CHECK(config_error("[graph]\nkind=bandit\nK=2\n[sweep]\nhorizons = 200, 100\n").find("increasing") !=
        std::string::npos);
  CHECK(config_error("[graph]\nkind=bandit\nK=2\n[sweep]\nhorizons = 1\n").find(">= 2") != std::string::npos);
  CHECK(config_error("[graph]\nkind=bandit\nK=2\n[sweep]\nhorizons = 10\nseeds = 0\n").find("seeds") !=
        std::string::npos);
  CHECK(config_error("[graph]\nkind=bandit\nK=2\n[sweep]\nhorizons = 2^9..2^3\n").size() > 0);
}

TEST_CASE("unknown names are config errors") {
  ExperimentConfig c;
  c.graph = {"bandit", 2, ""};
  c.horizons = {10, 20, 40};
  c.learner.name = "mystery";
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
  c.learner.name = "exp3g";
  c.adversary.kind = "mystery";
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
  c.adversary.kind = "bernoulli";
  c.graph.kind = "mystery";
  CHECK_THROWS(run_sweep(c));
  c.graph = {"full_info", 3, ""};
  c.adversary.kind = "mrw";
  CHECK_THROWS_AS(run_sweep(c), ConfigError);
}

TEST_CASE("single horizon sweeps omit the fit") {
  ExperimentConfig c;
  c.graph = {"bandit", 2, ""};
  c.learner.name = "uniform-random";
  c.adversary = {"bernoulli", {0.4, 0.6}, ""};
  c.horizons = {1024};
  const SweepResult r = run_sweep(c);
  CHECK(r.rows.size() == 1);
  CHECK_FALSE(r.fit);
  REQUIRE(r.notices.size() == 1);
  CHECK(r.notices[0].find("fit omitted") != std::string::npos);
}

TEST_CASE("sweep cells use documented seeds and write all outputs") {
  std::istringstream in(kSmallConfig);
  ExperimentConfig c = parse_config(in);
  const fs::path dir = scratch("sweep");
  c.out_dir = dir.string();
  const SweepResult r = run_sweep(c);
  REQUIRE(r.rows.size() == 12);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].horizon == c.horizons[i / 4]);
    CHECK(r.rows[i].seed == derive_seed(99, c.horizons[i / 4], i % 4));
  }
  REQUIRE(r.fit);
  for (const char* f : {"results.csv", "summary.csv", "fit.csv", "regret.dat", "regret.svg"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "results.csv").rfind("T,seed,policy_regret,M_T,best_fixed\n", 0) == 0);
  CHECK(slurp(dir / "summary.csv").rfind("T,mean,stderr,n\n", 0) == 0);
  CHECK(slurp(dir / "regret.svg").find("<svg") != std::string::npos);

  std::ifstream results(dir / "results.csv");
  const auto rows = parse_results_csv(results);
  const auto refit = fit_summary(summarize(rows));
  REQUIRE(refit);
  CHECK(*refit == *r.fit);

  const fs::path again = scratch("sweep_again");
  c.out_dir = again.string();
  c.workers = 3;
  run_sweep(c);
  for (const char* f : {"results.csv", "summary.csv", "fit.csv", "regret.dat", "regret.svg"})
    CHECK(slurp(dir / f) == slurp(again / f));
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("walk adversary sweeps play one extra round") {
  CHECK(game_horizon(AdversarySpec{"mrw", {}, ""}, 100) == 101);
  CHECK(game_horizon(AdversarySpec{"bernoulli", {0.5, 0.5}, ""}, 100) == 100);
  const Adversary a = make_adversary_factory(AdversarySpec{"mrw", {}, ""}, 2, 100)(5);
  CHECK(a.horizon() == 101);
  CHECK(a.memory() == 1);
}

TEST_CASE("loss files drive csv adversaries") {
  const fs::path dir = scratch("csv");
  {
    std::ofstream f(dir / "losses.csv");
    f << "t,loss_0,loss_1\n";
    for (int t = 1; t <= 50; ++t) f << t << ',' << (t % 2) << ",0.5\n";
  }
  const Adversary a = make_adversary_factory(AdversarySpec{"switching-csv", {}, (dir / "losses.csv").string()}, 2, 40)(1);
  CHECK(a.memory() == 1);
  const Node tail[] = {0, 0};
  CHECK(a.evaluate(3, tail) == 1.0);
  CHECK_THROWS_AS(make_adversary_factory(AdversarySpec{"csv", {}, (dir / "losses.csv").string()}, 2, 60),
                  ConfigError);
  CHECK_THROWS_AS(make_adversary_factory(AdversarySpec{"csv", {}, (dir / "losses.csv").string()}, 3, 10),
                  ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("results csv parsing") {
  std::istringstream good("T,seed,policy_regret,M_T,best_fixed\n10,5,1.5,2,0\n10,6,2.5,1,1\n");
  const auto rows = parse_results_csv(good);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].policy_regret == 2.5);
  const auto s = summarize(rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean == 2.0);
  CHECK(s[0].n == 2);
  std::istringstream bad("T,seed,policy_regret,M_T,best_fixed\n10,5,1.5\n");
  CHECK_THROWS_AS(parse_results_csv(bad), ConfigError);
  std::ostringstream out;
  write_results_csv(out, rows);
  std::istringstream back(out.str());
  const auto again = parse_results_csv(back);
  CHECK(again.size() == 2);
  CHECK(again[0].seed == 5);
}
