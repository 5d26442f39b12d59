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

#include "graphfb/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "graphfb/errors.hpp"
#include "graphfb/format.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

std::size_t count_switches(std::span<const Node> actions) {
  std::size_t n = 0;
  for (std::size_t t = 1; t < actions.size(); ++t) n += actions[t] != actions[t - 1];
  return n;
}

namespace {

void check_distribution(const std::vector<double>& p, std::size_t round) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvariantError("round " + std::to_string(round) + ": negative probability");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvariantError("round " + std::to_string(round) + ": distribution sums to " + format_double(total));
  }
}

}  // namespace

GameTranscript run_game(const FeedbackGraph& graph, Learner& learner, const Adversary& adversary,
                        std::size_t horizon, std::uint64_t seed) {
  if (adversary.num_actions() != graph.num_nodes()) {
    throw ParameterError("adversary has " + std::to_string(adversary.num_actions()) +
                         " actions but the graph has " + std::to_string(graph.num_nodes()) + " nodes");
  }
  if (adversary.horizon() < horizon) {
    throw ParameterError("adversary horizon " + std::to_string(adversary.horizon()) +
                         " is shorter than the game (" + std::to_string(horizon) + ")");
  }
  if (classify_graph(graph).graph_class == Observability::kNotObservable) {
    throw DomainError("cannot play on an unobservable feedback graph");
  }

  GameTranscript tr;
  tr.horizon = horizon;
  tr.seed = seed;
  tr.actions.reserve(horizon);
  tr.incurred_losses.reserve(horizon);
  tr.feedback.reserve(horizon);

  std::vector<Node> tail;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const Node x = learner.choose();
    if (x >= graph.num_nodes()) throw InvariantError("learner chose an out-of-range action");
    if (const auto* p = learner.distribution()) check_distribution(*p, t);
    tr.actions.push_back(x);

    const std::size_t len = adversary.tail_length(t);
    tail.assign(tr.actions.end() - static_cast<long>(len), tr.actions.end());
    tr.incurred_losses.push_back(adversary.evaluate(t, tail));

    std::vector<Observation> seen;
    seen.reserve(graph.out_neighbors(x).size());
    for (Node i : graph.out_neighbors(x)) {
      tail.back() = i;
      seen.push_back({i, adversary.evaluate(t, tail)});
    }
    learner.observe(x, seen);
    tr.feedback.push_back(std::move(seen));
  }
  tr.switches = count_switches(tr.actions);
  tr.queries = learner.query_count();
  return tr;
}

GameTranscript run_game(const FeedbackGraph& graph, const LearnerSpec& spec,
                        const Adversary& adversary, std::size_t horizon, std::uint64_t seed) {
  const GraphProfile profile = profile_graph(graph);
  auto learner = make_learner(spec, graph, profile, horizon, adversary.memory(), adversary.max_loss(), seed);
  return run_game(graph, *learner, adversary, horizon, seed);
}

RegretReport policy_regret(const GameTranscript& transcript, const Adversary& adversary) {
  const std::size_t k = adversary.num_actions();
  const std::size_t horizon = transcript.horizon;
  if (adversary.horizon() < horizon) throw ParameterError("adversary horizon shorter than transcript");

  RegretReport r;
  for (double x : transcript.incurred_losses) r.incurred_total += x;
  r.per_fixed_action_totals.assign(k, 0.0);
  std::vector<Node> tail;
  for (Node y = 0; y < k; ++y) {
    double total = 0.0;
    for (std::size_t t = 1; t <= horizon; ++t) {
      tail.assign(adversary.tail_length(t), y);
      total += adversary.evaluate(t, tail);
    }
    r.per_fixed_action_totals[y] = total;
  }
  const auto best = std::min_element(r.per_fixed_action_totals.begin(), r.per_fixed_action_totals.end());
  r.best_fixed_action = static_cast<Node>(best - r.per_fixed_action_totals.begin());
  r.policy_regret = r.incurred_total - *best;
  if (adversary.memory() == 0) r.standard_regret = r.policy_regret;
  return r;
}

std::pair<double, double> mean_and_stderr(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

RunSummary run_seeded(const FeedbackGraph& graph, const GraphProfile& profile,
                      const LearnerSpec& spec, const AdversaryFactory& adversary,
                      std::size_t horizon, std::uint64_t cell_seed) {
  const Adversary adv = adversary(derive_seed(cell_seed, 1));
  auto learner = make_learner(spec, graph, profile, horizon, adv.memory(), adv.max_loss(),
                              derive_seed(cell_seed, 2));
  const GameTranscript tr = run_game(graph, *learner, adv, horizon, cell_seed);
  const RegretReport report = policy_regret(tr, adv);
  RunSummary s;
  s.seed = cell_seed;
  s.policy_regret = report.policy_regret;
  s.switches = tr.switches;
  s.queries = tr.queries;
  s.best_fixed = report.best_fixed_action;
  return s;
}

MonteCarloResult monte_carlo_regret(const FeedbackGraph& graph, const LearnerSpec& spec,
                                    const AdversaryFactory& adversary, std::size_t horizon,
                                    std::size_t n_seeds, std::uint64_t master_seed,
                                    std::size_t workers) {
  if (n_seeds == 0) throw ParameterError("Monte Carlo needs at least one seed");
  const GraphProfile profile = profile_graph(graph);

  MonteCarloResult out;
  out.runs.resize(n_seeds);
  std::vector<std::exception_ptr> errors(n_seeds);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n_seeds; i = next++) {
      try {
        out.runs[i] = run_seeded(graph, profile, spec, adversary, horizon,
                                 derive_seed(master_seed, horizon, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, n_seeds);
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  out.values.reserve(n_seeds);
  for (const auto& r : out.runs) out.values.push_back(r.policy_regret);
  std::tie(out.mean, out.stderr_) = mean_and_stderr(out.values);
  return out;
}

void write_transcript_csv(std::ostream& out, const GameTranscript& transcript) {
  out << "t,action,loss,switched\n";
  for (std::size_t t = 0; t < transcript.actions.size(); ++t) {
    const bool switched = t > 0 && transcript.actions[t] != transcript.actions[t - 1];
    out << t + 1 << ',' << transcript.actions[t] << ',' << format_double(transcript.incurred_losses[t])
        << ',' << (switched ? 1 : 0) << '\n';
  }
}

}  // namespace graphfb
