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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphfb/graph.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

struct Observation {
  Node node;
  double loss;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// One online player. The engine calls choose() then observe() once per round,
// with the losses of the played action's out-neighbors.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual Node choose() = 0;
  virtual void observe(Node played, std::span<const Observation> feedback) = 0;
  virtual std::string name() const = 0;

  // Sampling distribution used by the most recent choose(), if the learner
  // maintains one.
  virtual const std::vector<double>* distribution() const { return nullptr; }
  // Rounds in which a lazy learner requested full feedback.
  virtual std::size_t query_count() const { return 0; }
};

// Inverse-CDF draw over index order; u in [0, 1).
Node sample_index(std::span<const double> p, double u);

// ---------------------------------------------------------------- Exp3.G

struct Exp3GConfig {
  double eta = 0.0;
  double gamma = 0.0;
  NodeSet exploration_set;
  // Assert l_hat(i) <= loss_scale / eta for loopless nodes (valid for the
  // strongly-observable parameter regime).
  bool check_loopless_bound = false;
  double loss_scale = 1.0;
};

// ParameterError unless eta > 0, gamma in [0, 1] and U a nonempty subset of V.
void validate(const Exp3GConfig& config, std::size_t num_nodes);

struct Exp3GParams {
  Exp3GConfig config;
  std::optional<std::string> warning;
};

// Strongly observable: U = V, gamma = min{sqrt(1/(alpha T)), 1/2}, eta = gamma/2.
// Weakly observable: U = D, gamma = min{(delta ln K / T)^{1/3}, 1/2},
// eta = gamma^2 / delta; warns when T < K^3 ln K / delta^2.
Exp3GParams exp3g_params(const GraphProfile& profile, std::size_t num_nodes, std::size_t horizon);

struct Exp3GState {
  std::vector<double> cumulative_estimates;  // sum_s l_hat_s(i)
  std::vector<double> q;
  std::vector<double> p;
  std::size_t round = 0;

  explicit Exp3GState(std::size_t num_nodes);
};

// Recomputes q (exponential weights over cumulative estimates, shifted by
// the minimum) and p = (1 - gamma) q + gamma * uniform(U) in place.
void exp3g_refresh(Exp3GState& state, const Exp3GConfig& config);

// l_hat(i) = l(i) / P(i) for observed i, 0 otherwise, with
// P(i) = sum_{j in N_in(i)} p(j). ContractError unless `observed` covers
// exactly N_out(played); InvariantError if an observed P(i) is 0.
std::vector<double> importance_weighted_estimates(const FeedbackGraph& g, std::span<const double> p,
                                                  Node played,
                                                  std::span<const Observation> observed);

class Exp3G final : public Learner {
 public:
  Exp3G(const FeedbackGraph& graph, Exp3GConfig config, std::uint64_t seed);

  Node choose() override;
  void observe(Node played, std::span<const Observation> feedback) override;
  std::string name() const override { return "exp3g"; }
  const std::vector<double>* distribution() const override { return &state_.p; }

  const Exp3GState& state() const { return state_; }
  const Exp3GConfig& config() const { return config_; }

 private:
  const FeedbackGraph* graph_;
  Exp3GConfig config_;
  Exp3GState state_;
  RngStream rng_;
};

// ------------------------------------------------------------ mini-batch

// Holds the inner learner's action for tau rounds and feeds it the per-node
// average of the batch's observations. With J = floor(T / tau), rounds after
// J * tau are delegated to the inner learner one by one.
class MiniBatch final : public Learner {
 public:
  MiniBatch(std::unique_ptr<Learner> inner, std::size_t tau, std::size_t horizon,
            std::size_t num_nodes);

  Node choose() override;
  void observe(Node played, std::span<const Observation> feedback) override;
  std::string name() const override { return "minibatch-" + inner_->name(); }
  const std::vector<double>* distribution() const override { return inner_->distribution(); }

  std::size_t tau() const { return tau_; }
  std::size_t num_batches() const { return batches_; }
  const Learner& inner() const { return *inner_; }

 private:
  std::unique_ptr<Learner> inner_;
  std::size_t tau_;
  std::size_t batches_;
  std::size_t round_ = 0;  // rounds completed
  Node held_ = 0;
  std::vector<double> sums_;
  std::vector<Node> batch_nodes_;
};

// tau = round(C^{-1/(2-q)} T^{(1-q)/(2-q)}) clamped to [m + 1, T].
std::size_t optimal_batch_size(double c, double q, std::size_t horizon, std::size_t memory = 0);

// ------------------------------------------------------------ lazy players

struct LazyState {
  std::vector<double> log_weights;  // weights kept in log space
  bool previous_query = true;       // Z_{t-1}, Z_0 = 1
  bool current_query = false;       // Z_t of the round in progress
  Node held = 0;                    // X_{t-1} (label-efficient) or J_{t-1}
  std::size_t round = 0;
  std::size_t queries = 0;

  explicit LazyState(std::size_t num_actions);

  // Normalized action distribution p_i = w_i / sum_j w_j.
  std::vector<double> probabilities() const;
};

// Lazy forecaster for label-efficient prediction. Queries (Z_t = 1) need the
// full loss vector in the round's feedback, so it is meant for full-info
// graphs.
class LazyLabelEfficient final : public Learner {
 public:
  LazyLabelEfficient(std::size_t num_actions, double epsilon, double eta, std::uint64_t seed);

  Node choose() override;
  void observe(Node played, std::span<const Observation> feedback) override;
  std::string name() const override { return "lazy-label-efficient"; }
  std::size_t query_count() const override { return state_.queries; }

  const LazyState& state() const { return state_; }
  bool queried_this_round() const { return state_.current_query; }

 private:
  double epsilon_;
  double eta_;
  LazyState state_;
  RngStream action_rng_;
  RngStream query_rng_;
};

// Lazy player for the revealing action game: on a query round it plays the
// revealing action r and updates every weight; otherwise it repeats J.
class LazyRevealing final : public Learner {
 public:
  LazyRevealing(const FeedbackGraph& graph, double epsilon, double eta, std::uint64_t seed);

  Node choose() override;
  void observe(Node played, std::span<const Observation> feedback) override;
  std::string name() const override { return "lazy-revealing"; }
  std::size_t query_count() const override { return state_.queries; }

  Node revealing_action() const { return revealing_; }
  const LazyState& state() const { return state_; }

 private:
  Node revealing_;
  double epsilon_;
  double eta_;
  LazyState state_;
  RngStream action_rng_;
  RngStream query_rng_;
};

// Lowest-index node whose out-neighborhood is all of V, if any.
std::optional<Node> find_revealing_action(const FeedbackGraph& g);

struct LazyParams {
  double epsilon;
  double eta;
};

// epsilon = m / T, eta = sqrt(2 m ln N) / T.
LazyParams lazy_params(std::size_t horizon, std::size_t num_actions, double m);

// --------------------------------------------------------------- baseline

class UniformRandom final : public Learner {
 public:
  UniformRandom(std::size_t num_actions, std::uint64_t seed);

  Node choose() override;
  void observe(Node, std::span<const Observation>) override {}
  std::string name() const override { return "uniform-random"; }
  const std::vector<double>* distribution() const override { return &p_; }

 private:
  std::vector<double> p_;
  RngStream rng_;
};

// --------------------------------------------------------------- factory

// Learner by name: exp3g, minibatch-exp3g, lazy-label-efficient,
// lazy-revealing, uniform-random. Parameter keys: eta, gamma, tau, epsilon, m,
// plus batch_c / batch_q for the batch-size rule.
struct LearnerSpec {
  std::string name = "exp3g";
  std::map<std::string, double> params;
};

// The returned learner may keep a pointer to `graph`; keep it alive.
std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const FeedbackGraph& graph,
                                      const GraphProfile& profile, std::size_t horizon,
                                      std::size_t adversary_memory, double max_loss,
                                      std::uint64_t seed);

}  // namespace graphfb
