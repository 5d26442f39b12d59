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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "graphfb/adversary.hpp"
#include "graphfb/graph.hpp"

namespace graphfb {

// Certified observability-preserving subgraph V1 of G together with the map
// g: V -> V1 (identity on V1, observing node elsewhere). Only constructible
// through certify(), so holding one means the property has been checked.
class ReductionWitness {
 public:
  // Throws ContractError when V1 does not preserve the observability of G.
  // V1 is sorted and deduplicated first.
  static ReductionWitness certify(const FeedbackGraph& g, NodeSet v1);

  const NodeSet& v1() const { return v1_; }
  const std::map<Node, Node>& observing_map() const { return observing_; }
  std::size_t num_nodes() const { return g_map_.size(); }

  bool contains(Node v) const { return local_[v] < v1_.size(); }
  Node g(Node v) const { return g_map_.at(v); }
  // Position of a V1 node inside v1(); subgraph adversaries use these indices.
  std::size_t local_index(Node v1_node) const;

 private:
  ReductionWitness() = default;

  NodeSet v1_;
  std::map<Node, Node> observing_;
  std::vector<Node> g_map_;
  std::vector<std::size_t> local_;
};

// f_t(X_{1:t}) = f'_t(g(X_1), ..., g(X_t)) when X_t is in V1, else 1.
// `sub` acts on |V1| actions indexed by local_index; its memory bound carries
// over.
Adversary lift_losses(const ReductionWitness& witness, const Adversary& sub);

// X'_t = X*_t on V1, observing node of X*_t otherwise. Outputs are nodes of G.
std::vector<Node> project_strategy(const ReductionWitness& witness, std::span<const Node> strategy);

struct ReductionCheck {
  bool holds = true;
  std::optional<std::size_t> first_violation;  // 1-based round
  std::vector<double> margins;                 // f_t(X*) - f'_t(X'), per round
};

// Checks f'_t(X'_{1:t}) <= f_t(X*_{1:t}) on every round.
ReductionCheck verify_reduction(const ReductionWitness& witness, const Adversary& sub,
                                std::span<const Node> strategy);

}  // namespace graphfb
