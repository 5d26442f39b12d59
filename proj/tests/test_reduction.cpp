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

#include <memory>

#include "fixtures.hpp"
#include "graphfb/adversary.hpp"
#include "graphfb/errors.hpp"
#include "graphfb/graph.hpp"
#include "graphfb/reduction.hpp"
#include "graphfb/rng.hpp"
#include "oracles.hpp"

using namespace graphfb;

namespace {

// Memory-one losses in [0, 1]: half the oblivious loss plus half a switch indicator.
Adversary bounded_memory_one(std::size_t horizon, std::uint64_t seed) {
  auto base = std::make_shared<ObliviousSequence>(
      ObliviousSequence::bernoulli(std::vector<double>{0.3, 0.7}, horizon, seed));
  return make_custom(2, horizon, 1, 1.0, [base](std::size_t t, std::span<const Node> h) {
    const double switched = t >= 2 && h[t - 1] != h[t - 2] ? 0.5 : 0.0;
    return 0.5 * base->loss(t, h[t - 1]) + switched;
  });
}

}  // namespace

TEST_CASE("certification") {
  const FeedbackGraph counter(3, {{1, 1}, {2, 0}, {2, 2}, {0, 1}});
  CHECK_THROWS_AS(ReductionWitness::certify(counter, {0, 1}), ContractError);
  const FeedbackGraph a = load_graph(fixtures::path("pair_a.graph"));
  const ReductionWitness w = ReductionWitness::certify(a, {2, 1, 2});
  CHECK(w.v1() == NodeSet{1, 2});
  CHECK(w.observing_map() == std::map<Node, Node>{{0, 1}});
  CHECK(w.g(0) == 1);
  CHECK(w.g(2) == 2);
  CHECK(w.contains(1));
  CHECK_FALSE(w.contains(0));
  CHECK(w.local_index(2) == 1);
  CHECK_THROWS_AS(w.local_index(0), RangeError);
}

TEST_CASE("projection") {
  const FeedbackGraph f = load_graph(fixtures::path("pair_f.graph"));
  const ReductionWitness w = ReductionWitness::certify(f, {1, 2});
  CHECK(project_strategy(w, std::vector<Node>{1, 2, 2, 1}) == std::vector<Node>{1, 2, 2, 1});
  CHECK(project_strategy(w, std::vector<Node>{3}) == std::vector<Node>{1});
  // Four nodes, V1 = {1, 2}: node 0 observes {0, 2} so its observing node is 2; node 3 observes
  // nothing inside V1 so it maps to the lowest V1 node.
  const FeedbackGraph hand(4, {{0, 0}, {0, 2}, {1, 1}, {2, 2}, {3, 3}, {1, 0}, {1, 3}});
  const ReductionWitness h = ReductionWitness::certify(hand, {1, 2});
  CHECK(h.observing_map() == std::map<Node, Node>{{0, 2}, {3, 1}});
  CHECK(project_strategy(h, std::vector<Node>{0, 1, 3, 2, 0, 3}) == std::vector<Node>{2, 1, 1, 2, 2, 1});
  CHECK_THROWS_AS(project_strategy(h, std::vector<Node>{4}), RangeError);
}

TEST_CASE("lifted losses") {
  const FeedbackGraph a = load_graph(fixtures::path("pair_a.graph"));
  const ReductionWitness w = ReductionWitness::certify(a, {1, 2});
  const ObliviousSequence base(3, 2, {0.2, 0.6, 0.4, 0.1, 0.9, 0.3});
  const Adversary sub = make_switching_cost(base);
  const Adversary lifted = lift_losses(w, sub);
  CHECK(lifted.num_actions() == 3);
  CHECK(lifted.memory() == 1);
  CHECK(lifted.horizon() == 3);
  const Node outside[] = {1, 0};
  CHECK(lifted.evaluate(2, outside) == 1.0);
  const Node inside[] = {1, 2};
  const Node local[] = {0, 1};
  CHECK(lifted.evaluate(2, inside) == sub.evaluate(2, local));
  const Node from_outside[] = {0, 2};
  CHECK(lifted.evaluate(2, from_outside) == sub.evaluate(2, local));
  for (Node i : {Node{1}, Node{2}}) {
    double full = 0.0, small = 0.0;
    for (std::size_t t = 1; t <= 3; ++t) {
      full += lifted.evaluate(t, std::vector<Node>(lifted.tail_length(t), i));
      small += sub.evaluate(t, std::vector<Node>(sub.tail_length(t), w.local_index(i)));
    }
    CHECK(full == small);
  }
  const Adversary wrong = make_oblivious(ObliviousSequence(3, 3, std::vector<double>(9, 0.0)));
  CHECK_THROWS_AS(lift_losses(w, wrong), ContractError);
}

TEST_CASE("verification margins") {
  const FeedbackGraph a = load_graph(fixtures::path("pair_a.graph"));
  const ReductionWitness w = ReductionWitness::certify(a, {1, 2});
  const Adversary sub = make_oblivious(ObliviousSequence(3, 2, {0.2, 0.6, 0.4, 0.1, 0.9, 0.3}));
  const ReductionCheck inside = verify_reduction(w, sub, std::vector<Node>{1, 2, 2});
  CHECK(inside.holds);
  CHECK(inside.margins == std::vector<double>{0.0, 0.0, 0.0});
  const ReductionCheck mixed = verify_reduction(w, sub, std::vector<Node>{0, 2, 0});
  CHECK(mixed.holds);
  CHECK(mixed.margins[0] == doctest::Approx(0.8));
  CHECK(mixed.margins[2] == doctest::Approx(0.1));
  // Switching costs push subgame losses above 1, beyond the unit range the inequality assumes.
  const Adversary costly = make_switching_cost(ObliviousSequence(2, 2, {0.5, 0.5, 0.5, 0.5}));
  const ReductionCheck broken = verify_reduction(w, costly, std::vector<Node>{2, 0});
  CHECK_FALSE(broken.holds);
  REQUIRE(broken.first_violation);
  CHECK(*broken.first_violation == 2);
}

TEST_CASE("fuzzed reductions hold and keep the benchmark") {
  RngStream rng(31, streams::kLearner);
  for (const auto& name : fixtures::pair_graphs()) {
    CAPTURE(name);
    const FeedbackGraph g = load_graph(fixtures::path(name));
    const ReductionWitness w = ReductionWitness::certify(g, {1, 2});
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
      const std::size_t horizon = 5 + trial % 20;
      const Adversary sub = trial % 2 ? bounded_memory_one(horizon, trial)
                                      : make_oblivious(ObliviousSequence::bernoulli(
                                            std::vector<double>{0.4, 0.6}, horizon, trial));
      std::vector<Node> strategy(horizon);
      for (auto& x : strategy) x = static_cast<Node>(rng.uniform() * static_cast<double>(g.num_nodes()));
      const ReductionCheck c = verify_reduction(w, sub, strategy);
      CHECK(c.holds);
      for (Node x : project_strategy(w, strategy)) CHECK((x == 1 || x == 2));

      const Adversary lifted = lift_losses(w, sub);
      std::vector<double> full(g.num_nodes(), 0.0), small(2, 0.0);
      for (std::size_t t = 1; t <= horizon; ++t) {
        for (Node y = 0; y < g.num_nodes(); ++y)
          full[y] += lifted.evaluate(t, std::vector<Node>(lifted.tail_length(t), y));
        for (Node y = 0; y < 2; ++y) small[y] += sub.evaluate(t, std::vector<Node>(sub.tail_length(t), y));
      }
      CHECK(*std::min_element(full.begin(), full.end()) == *std::min_element(small.begin(), small.end()));
      for (Node y = 0; y < g.num_nodes(); ++y)
        if (!w.contains(y)) CHECK(full[y] == static_cast<double>(horizon));
    }
  }
}
