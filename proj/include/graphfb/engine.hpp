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
#include <optional>
#include <span>
#include <vector>

#include "graphfb/adversary.hpp"
#include "graphfb/graph.hpp"
#include "graphfb/learner.hpp"

namespace graphfb {

struct GameTranscript {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::vector<Node> actions;
  std::vector<double> incurred_losses;
  std::vector<std::vector<Observation>> feedback;  // sparse: N_out(X_t) only
  std::size_t switches = 0;
  std::size_t queries = 0;  // lazy learners only

  friend bool operator==(const GameTranscript&, const GameTranscript&) = default;
};

struct RegretReport {
  double policy_regret = 0.0;
  std::optional<double> standard_regret;  // oblivious adversaries only
  Node best_fixed_action = 0;
  std::vector<double> per_fixed_action_totals;
  double incurred_total = 0.0;
};

std::size_t count_switches(std::span<const Node> actions);

// Plays T rounds. The loss of round t is f_t on the realized history; each
// out-neighbor i of X_t is shown the counterfactual f_t(X_{1:t-1}; i). Every
// sampling distribution the learner exposes is checked to be a probability
// vector (InvariantError otherwise).
GameTranscript run_game(const FeedbackGraph& graph, Learner& learner, const Adversary& adversary,
                        std::size_t horizon, std::uint64_t seed = 0);

// Builds the learner from `spec` seeded with `seed`, then plays.
GameTranscript run_game(const FeedbackGraph& graph, const LearnerSpec& spec,
                        const Adversary& adversary, std::size_t horizon, std::uint64_t seed);

// Replays every constant strategy y through the adversary (f_t(y, ..., y))
// and compares totals. Ties go to the lowest index.
RegretReport policy_regret(const GameTranscript& transcript, const Adversary& adversary);

// Adversary for one seed; lets each Monte Carlo run get fresh losses.
using AdversaryFactory = std::function<Adversary(std::uint64_t seed)>;

struct RunSummary {
  std::uint64_t seed = 0;
  double policy_regret = 0.0;
  std::size_t switches = 0;
  std::size_t queries = 0;
  Node best_fixed = 0;
};

// One seeded run: adversary from derive_seed(cell_seed, 1), learner from
// derive_seed(cell_seed, 2).
RunSummary run_seeded(const FeedbackGraph& graph, const GraphProfile& profile,
                      const LearnerSpec& spec, const AdversaryFactory& adversary,
                      std::size_t horizon, std::uint64_t cell_seed);

struct MonteCarloResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> values;  // per-seed policy regret, seed-index order
  std::vector<RunSummary> runs;
};

// Run i uses cell seed derive_seed(master_seed, horizon, i). Runs are spread over `workers` threads; results do not depend on the worker count.
MonteCarloResult monte_carlo_regret(const FeedbackGraph& graph, const LearnerSpec& spec,
                                    const AdversaryFactory& adversary, std::size_t horizon,
                                    std::size_t n_seeds, std::uint64_t master_seed,
                                    std::size_t workers = 1);

// Mean and standard error (sample sd / sqrt(n); 0 when n == 1).
std::pair<double, double> mean_and_stderr(std::span<const double> values);

// CSV "t,action,loss,switched".
void write_transcript_csv(std::ostream& out, const GameTranscript& transcript);

}  // namespace graphfb
