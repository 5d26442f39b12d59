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

#include "graphfb/reduction.hpp"

#include <algorithm>
#include <memory>

#include "graphfb/errors.hpp"

namespace graphfb {

ReductionWitness ReductionWitness::certify(const FeedbackGraph& g, NodeSet v1) {
  std::sort(v1.begin(), v1.end());
  v1.erase(std::unique(v1.begin(), v1.end()), v1.end());
  auto map = preserves_observability(g, v1);
  if (!map) throw ContractError("subgraph does not preserve the observability of the graph");

  ReductionWitness w;
  w.v1_ = std::move(v1);
  w.observing_ = std::move(*map);
  w.local_.assign(g.num_nodes(), g.num_nodes());
  for (std::size_t i = 0; i < w.v1_.size(); ++i) w.local_[w.v1_[i]] = i;
  w.g_map_.resize(g.num_nodes());
  for (Node v = 0; v < g.num_nodes(); ++v) {
    w.g_map_[v] = w.local_[v] < w.v1_.size() ? v : w.observing_.at(v);
  }
  return w;
}

std::size_t ReductionWitness::local_index(Node v1_node) const {
  if (v1_node >= local_.size() || local_[v1_node] >= v1_.size()) {
    throw RangeError("node " + std::to_string(v1_node) + " is not in V1");
  }
  return local_[v1_node];
}

Adversary lift_losses(const ReductionWitness& witness, const Adversary& sub) {
  if (sub.num_actions() != witness.v1().size()) {
    throw ContractError("subgraph adversary must act on exactly |V1| actions");
  }
  auto w = std::make_shared<const ReductionWitness>(witness);
  auto f = std::make_shared<const Adversary>(sub);
  return Adversary(AdversaryKind::kCustom, witness.num_nodes(), sub.horizon(), sub.memory(),
                   std::max(1.0, sub.max_loss()), sub.seed(),
                   [w, f](std::size_t t, std::span<const Node> tail) {
                     if (!w->contains(tail.back())) return 1.0;
                     std::vector<Node> mapped(tail.size());
                     for (std::size_t i = 0; i < tail.size(); ++i) mapped[i] = w->local_index(w->g(tail[i]));
                     return f->evaluate(t, mapped);
                   });
}

std::vector<Node> project_strategy(const ReductionWitness& witness, std::span<const Node> strategy) {
  std::vector<Node> out;
  out.reserve(strategy.size());
  for (Node x : strategy) {
    if (x >= witness.num_nodes()) throw RangeError("strategy action out of range");
    out.push_back(witness.g(x));
  }
  return out;
}

ReductionCheck verify_reduction(const ReductionWitness& witness, const Adversary& sub,
                                std::span<const Node> strategy) {
  const Adversary lifted = lift_losses(witness, sub);
  const std::vector<Node> projected = project_strategy(witness, strategy);
  if (strategy.size() > sub.horizon()) throw ParameterError("strategy longer than the adversary horizon");

  ReductionCheck check;
  check.margins.reserve(strategy.size());
  std::vector<Node> full_tail;
  std::vector<Node> sub_tail;
  for (std::size_t t = 1; t <= strategy.size(); ++t) {
    const std::size_t len = sub.tail_length(t);
    full_tail.assign(strategy.begin() + static_cast<long>(t - len), strategy.begin() + static_cast<long>(t));
    sub_tail.clear();
    for (std::size_t i = t - len; i < t; ++i) sub_tail.push_back(witness.local_index(projected[i]));
    const double margin = lifted.evaluate(t, full_tail) - sub.evaluate(t, sub_tail);
    check.margins.push_back(margin);
    if (margin < 0.0 && check.holds) {
      check.holds = false;
      check.first_violation = t;
    }
  }
  return check;
}

}  // namespace graphfb
