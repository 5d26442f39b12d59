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

#include <bit>
#include <cmath>
#include <sstream>

#include "graphfb/adversary.hpp"
#include "graphfb/errors.hpp"
#include "graphfb/mrw.hpp"
#include "graphfb/rng.hpp"
#include "oracles.hpp"

using namespace graphfb;

namespace {

ObliviousSequence zeros(std::size_t horizon, std::size_t k) {
  return ObliviousSequence(horizon, k, std::vector<double>(horizon * k, 0.0));
}

std::vector<double> play(const Adversary& a, const std::vector<Node>& actions) {
  std::vector<double> out;
  for (std::size_t t = 1; t <= actions.size(); ++t) {
    const std::size_t n = a.tail_length(t);
    out.push_back(a.evaluate(t, std::span<const Node>(actions.data() + t - n, n)));
  }
  return out;
}

}  // namespace

TEST_CASE("walk parameters") {
  CHECK(mrw_epsilon(1000) == doctest::Approx(1.4047186e-3).epsilon(1e-6));
  CHECK(mrw_sigma(1000) == doctest::Approx(1.11492591e-2).epsilon(1e-7));
  CHECK_THROWS_AS(generate_mrw(1, 0), ParameterError);
}

TEST_CASE("walk parent map") {
  CHECK(mrw_parent(12) == 8);
  CHECK(mrw_delta(12) == 2);
  CHECK(mrw_parent(3) == 2);
  CHECK(mrw_parent(8) == 0);
  CHECK(mrw_parent(1) == 0);
}

TEST_CASE("walk matches the reference construction bit for bit") {
  const MrwSequence s = generate_mrw(16, 42);
  const oracle::Mrw ref = oracle::mrw(16, 42);
  CHECK(s.walk == ref.w);
  CHECK(s.clipped[0] == ref.l1);
  CHECK(s.clipped[1] == ref.l2);
  CHECK(s.walk.front() == doctest::Approx(0.019227329369962416).epsilon(1e-15));
  CHECK(s.walk.back() == doctest::Approx(-0.005965065215305947).epsilon(1e-15));
  CHECK(s.clipped[1][15] == doctest::Approx(0.48014604589580517).epsilon(1e-15));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MrwSequence a = generate_mrw(300, seed);
    const oracle::Mrw b = oracle::mrw(300, seed);
    CHECK(a.clipped[0] == b.l1);
    CHECK(a.clipped[1] == b.l2);
  }
}

TEST_CASE("walk losses are clipped and keep the exact gap") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const MrwSequence s = generate_mrw(4096, seed);
    CHECK((s.sign == 1 || s.sign == -1));
    std::vector<double> w(s.horizon + 1, 0.0);
    for (std::size_t t = 1; t <= s.horizon; ++t) {
      const std::size_t i = t - 1;
      REQUIRE(s.clipped[0][i] >= 0.0);
      REQUIRE(s.clipped[0][i] <= 1.0);
      REQUIRE(s.clipped[1][i] >= 0.0);
      REQUIRE(s.clipped[1][i] <= 1.0);
      REQUIRE(s.unclipped[1][i] - s.unclipped[0][i] ==
              doctest::Approx(s.sign * s.epsilon).epsilon(1e-12));
      REQUIRE(s.clipped[0][i] == clip_unit(s.unclipped[0][i]));
      const bool clipped = s.unclipped[0][i] != s.clipped[0][i] || s.unclipped[1][i] != s.clipped[1][i];
      if (!clipped) REQUIRE(std::fabs(s.clipped[1][i] - s.clipped[0][i]) <= s.epsilon * (1 + 1e-12));
    }
  }
}

TEST_CASE("walk signs are balanced across seeds") {
  int plus = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) plus += generate_mrw(2, seed).sign == 1;
  CHECK(plus > 150);
  CHECK(plus < 250);
}

TEST_CASE("tree statistics") {
  const MrwTreeStats t16 = mrw_tree_stats(16);
  CHECK(t16.width == 5);
  CHECK(t16.depth == 4);
  CHECK(t16.parent[12] == 8);
  const MrwTreeStats t8 = mrw_tree_stats(8);
  CHECK(t8.width <= 4);
  CHECK(t8.depth <= 4);
  for (std::size_t e = 4; e <= 14; ++e) {
    const std::size_t horizon = std::size_t{1} << e;
    const MrwTreeStats s = mrw_tree_stats(horizon);
    CAPTURE(horizon);
    CHECK(s.width <= e + 1);
    CHECK(s.depth <= e + 1);
    if (e <= 10) {
      CHECK(s.width == oracle::width(horizon));
      CHECK(s.depth == oracle::depth(horizon));
    }
  }
  for (std::size_t horizon = 1; horizon <= 70; ++horizon) {
    const MrwTreeStats s = mrw_tree_stats(horizon);
    CHECK(s.width == oracle::width(horizon));
    CHECK(s.depth == oracle::depth(horizon));
  }
}

TEST_CASE("walk stays inside its high-probability envelope") {
  const std::size_t horizon = 1024;
  const double fail = 0.1;
  const double d = static_cast<double>(mrw_tree_stats(horizon).depth);
  const double bound = mrw_sigma(horizon) * std::sqrt(2 * d * std::log(horizon / fail));
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MrwSequence s = generate_mrw(horizon, seed);
    double peak = 0.0;
    for (double w : s.walk) peak = std::max(peak, std::fabs(w));
    inside += peak <= bound;
  }
  CHECK(inside >= 170);
}

TEST_CASE("walk csv export") {
  std::ostringstream out;
  write_mrw_csv(out, generate_mrw(4, 1));
  std::istringstream in(out.str());
  std::string header, columns, row;
  std::getline(in, header);
  std::getline(in, columns);
  CHECK(header.rfind("# T=4,seed=1,epsilon=", 0) == 0);
  CHECK(header.find(",Z=") != std::string::npos);
  CHECK(columns == "t,W,Lp1,Lp2,L1,L2");
  int rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("oblivious sequences validate their entries") {
  CHECK_THROWS_AS(ObliviousSequence(2, 2, {0.0, 0.5, 1.5, 0.0}), ParameterError);
  CHECK_THROWS_AS(ObliviousSequence(2, 2, {0.0, 0.5}), ParameterError);
  const ObliviousSequence s(2, 2, {0.3, 0.7, 0.2, 0.9});
  CHECK(s.loss(2, 1) == 0.9);
  CHECK(s.round(1)[0] == 0.3);
}

TEST_CASE("bernoulli sequences are drawn from their own stream") {
  const std::vector<double> means{0.2, 0.8};
  const ObliviousSequence s = ObliviousSequence::bernoulli(means, 5, 11);
  std::uint64_t c = 0;
  for (std::size_t t = 1; t <= 5; ++t)
    for (Node i = 0; i < 2; ++i)
      CHECK(s.loss(t, i) == (oracle::uniform(11, streams::kBernoulliLosses, c++) < means[i] ? 1.0 : 0.0));
}

TEST_CASE("loss csv round trip and errors") {
  const ObliviousSequence s(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 1.0});
  std::ostringstream out;
  write_oblivious_csv(out, s);
  CHECK(out.str().rfind("t,loss_0,loss_1,loss_2\n", 0) == 0);
  std::istringstream in(out.str());
  const ObliviousSequence back = parse_oblivious_csv(in);
  CHECK(back.horizon() == 2);
  for (std::size_t t = 1; t <= 2; ++t)
    for (Node i = 0; i < 3; ++i) CHECK(back.loss(t, i) == s.loss(t, i));
  std::istringstream bad("t,loss_0\n1,0.5\n2,abc\n");
  try {
    parse_oblivious_csv(bad);
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("switching cost examples") {
  const Adversary a = make_switching_cost(zeros(3, 2));
  CHECK(a.memory() == 1);
  CHECK(a.max_loss() == 2.0);
  CHECK(play(a, {0, 0, 0}) == std::vector<double>{0, 0, 0});
  CHECK(play(a, {0, 1, 0}) == std::vector<double>{0, 1, 1});
  const Adversary b = make_switching_cost(ObliviousSequence(2, 2, {0.3, 0.7, 0.2, 0.9}));
  const auto f = play(b, {1, 0});
  CHECK(f[0] == doctest::Approx(0.7));
  CHECK(f[1] == doctest::Approx(1.2));
  const Node same[] = {1, 1};
  CHECK(b.evaluate(2, same) == 0.9);
}

TEST_CASE("oblivious evaluation depends only on the final action") {
  const Adversary a = make_oblivious(ObliviousSequence(2, 2, {0.3, 0.7, 0.2, 0.9}));
  CHECK(a.memory() == 0);
  CHECK(a.tail_length(2) == 1);
  const Node x[] = {1};
  CHECK(a.evaluate(2, x) == 0.9);
}

TEST_CASE("memory-one walk adversary") {
  const std::size_t horizon = 64;
  const Adversary a = make_memory1_mrw(horizon, 5);
  const MrwSequence s = generate_mrw(horizon, 5);
  CHECK(a.horizon() == horizon + 1);
  CHECK(a.memory() == 1);
  CHECK(a.num_actions() == 2);
  const Node first[] = {1};
  CHECK(a.evaluate(1, first) == 0.0);
  for (std::size_t t = 2; t <= horizon + 1; ++t) {
    for (Node p = 0; p < 2; ++p) {
      for (Node x = 0; x < 2; ++x) {
        const Node tail[] = {p, x};
        const double expected = s.clipped[p][t - 2] + (p != x ? 1.0 : 0.0);
        REQUIRE(a.evaluate(t, tail) == expected);
      }
    }
  }
}

TEST_CASE("evaluate rejects bad rounds, tails and actions") {
  const Adversary a = make_switching_cost(zeros(3, 2));
  const Node one[] = {0};
  const Node two[] = {0, 1};
  const Node bad[] = {0, 2};
  CHECK_THROWS_AS(a.evaluate(0, one), RangeError);
  CHECK_THROWS_AS(a.evaluate(4, two), RangeError);
  CHECK_THROWS_AS(a.evaluate(2, one), ParameterError);
  CHECK_THROWS_AS(a.evaluate(1, two), ParameterError);
  CHECK_THROWS_AS(a.evaluate(2, bad), RangeError);
}

TEST_CASE("evaluate is a pure function") {
  const Adversary a = make_memory1_mrw(512, 3);
  const Adversary b = make_switching_cost(ObliviousSequence::bernoulli(std::vector<double>{0.4, 0.6}, 513, 2));
  RngStream rng(1, streams::kLearner);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t t = 1 + static_cast<std::size_t>(rng.uniform() * 513);
    std::vector<Node> tail(a.tail_length(t));
    for (auto& x : tail) x = rng.uniform() < 0.5 ? 0 : 1;
    const double x1 = a.evaluate(t, tail), x2 = a.evaluate(t, tail);
    const double y1 = b.evaluate(t, tail), y2 = b.evaluate(t, tail);
    REQUIRE(std::bit_cast<std::uint64_t>(x1) == std::bit_cast<std::uint64_t>(x2));
    REQUIRE(std::bit_cast<std::uint64_t>(y1) == std::bit_cast<std::uint64_t>(y2));
  }
}

TEST_CASE("switching cost equals base loss plus a recounted switch indicator") {
  const ObliviousSequence base = ObliviousSequence::bernoulli(std::vector<double>{0.3, 0.5, 0.7}, 200, 4);
  const Adversary a = make_switching_cost(base);
  RngStream rng(2, streams::kLearner);
  for (int run = 0; run < 20; ++run) {
    std::vector<Node> actions;
    for (int t = 0; t < 200; ++t) actions.push_back(static_cast<Node>(rng.uniform() * 3));
    const auto f = play(a, actions);
    double total = 0.0, base_total = 0.0;
    std::size_t switches = 0;
    for (std::size_t t = 0; t < actions.size(); ++t) {
      total += f[t];
      base_total += base.loss(t + 1, actions[t]);
      if (t > 0 && actions[t] != actions[t - 1]) ++switches;
    }
    CHECK(total == doctest::Approx(base_total + static_cast<double>(switches)));
  }
}

TEST_CASE("custom adversaries enforce memory and range") {
  auto two_back = [](std::size_t t, std::span<const Node> h) {
    return t >= 3 ? static_cast<double>(h[t - 3]) : 0.0;
  };
  CHECK_THROWS_AS(make_custom(2, 50, 1, 1.0, two_back), ParameterError);
  const Adversary ok = make_custom(2, 50, 2, 1.0, two_back);
  const Node tail[] = {1, 0, 0};
  CHECK(ok.evaluate(10, tail) == 1.0);
  const Adversary wild = make_custom(2, 5, 0, 1.0, [](std::size_t, std::span<const Node> h) {
    return h.back() == 1 ? 3.0 : 0.0;
  });
  const Node one[] = {1};
  CHECK_THROWS_AS(wild.evaluate(1, one), InvariantError);
}
