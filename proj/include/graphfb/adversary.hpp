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
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graphfb/graph.hpp"

namespace graphfb {

// T x K matrix of losses in [0, 1]. Rounds are 1-based in the accessors.
class ObliviousSequence {
 public:
  ObliviousSequence(std::size_t horizon, std::size_t num_actions, std::vector<double> losses);

  // Independent Bernoulli(means[i]) losses drawn row by row from the
  // kBernoulliLosses stream.
  static ObliviousSequence bernoulli(std::span<const double> means, std::size_t horizon,
                                     std::uint64_t seed);

  std::size_t horizon() const { return horizon_; }
  std::size_t num_actions() const { return num_actions_; }
  double loss(std::size_t t, Node action) const {
    return losses_[(t - 1) * num_actions_ + action];
  }
  std::span<const double> round(std::size_t t) const {
    return {losses_.data() + (t - 1) * num_actions_, num_actions_};
  }

 private:
  std::size_t horizon_;
  std::size_t num_actions_;
  std::vector<double> losses_;
};

// CSV with header "t,loss_0,...,loss_{K-1}" and rows t = 1..T in order.
ObliviousSequence parse_oblivious_csv(std::istream& in);
ObliviousSequence load_oblivious_csv(const std::string& path);
void write_oblivious_csv(std::ostream& out, const ObliviousSequence& seq);

enum class AdversaryKind { kOblivious, kSwitchingCost, kMemory1Mrw, kCustom };

std::string to_string(AdversaryKind kind);

// Loss of round t given the last min(t, m+1) actions, oldest first.
using TailLoss = std::function<double(std::size_t t, std::span<const Node> tail)>;
// Loss of round t given the whole history X_1..X_t.
using HistoryLoss = std::function<double(std::size_t t, std::span<const Node> history)>;

// Replayable loss oracle with a declared memory bound. Copies share the
// underlying data; evaluate is pure and thread-safe.
class Adversary {
 public:
  Adversary(AdversaryKind kind, std::size_t num_actions, std::size_t horizon, std::size_t memory,
            double max_loss, std::uint64_t seed, TailLoss loss);

  AdversaryKind kind() const { return kind_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t memory() const { return memory_; }
  double max_loss() const { return max_loss_; }
  std::uint64_t seed() const { return seed_; }

  // Number of trailing actions evaluate expects at round t.
  std::size_t tail_length(std::size_t t) const { return t < memory_ + 1 ? t : memory_ + 1; }

  // Throws RangeError for t outside [1, T] or an action >= K, ParameterError
  // for a tail of the wrong length.
  double evaluate(std::size_t t, std::span<const Node> tail) const;

 private:
  AdversaryKind kind_;
  std::size_t num_actions_;
  std::size_t horizon_;
  std::size_t memory_;
  double max_loss_;
  std::uint64_t seed_;
  TailLoss loss_;
};

Adversary make_oblivious(ObliviousSequence base, std::uint64_t seed = 0);

// f_1 = l_1(X_1); f_t = l_t(X_t) + 1{X_t != X_{t-1}} for t >= 2.
Adversary make_switching_cost(ObliviousSequence base, std::uint64_t seed = 0);

// Two actions, horizon T + 1: f_1 = 0 and f_t = L_{t-1}(X_{t-1}) + 1{X_{t-1} != X_t}
// with L the clipped multi-scale random walk losses.
Adversary make_memory1_mrw(std::size_t horizon, std::uint64_t seed);

// Wraps a full-history callback. The declared memory bound is spot-checked on
// `probes` random histories (drawn from `seed`): replacing actions older than
// m + 1 rounds must not change the loss, else ParameterError. Losses outside
// [0, max_loss] are rejected at evaluation time.
Adversary make_custom(std::size_t num_actions, std::size_t horizon, std::size_t memory,
                      double max_loss, HistoryLoss loss, std::uint64_t seed = 0,
                      std::size_t probes = 64);

}  // namespace graphfb
