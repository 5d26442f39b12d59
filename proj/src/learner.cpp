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

#include "graphfb/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "graphfb/errors.hpp"

namespace graphfb {

Node sample_index(std::span<const double> p, double u) {
  double cumulative = 0.0;
  std::optional<Node> last_positive;
  for (Node i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    cumulative += p[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  // Rounding can leave the total a hair below 1.
  if (!last_positive) throw InvariantError("cannot sample from an all-zero distribution");
  return *last_positive;
}

namespace {

// Feedback must name each node of N_out(played) exactly once.
void check_feedback(const FeedbackGraph& g, Node played, std::span<const Observation> observed) {
  const NodeSet& out = g.out_neighbors(played);
  if (observed.size() != out.size()) {
    throw ContractError("feedback for action " + std::to_string(played) + " has " +
                        std::to_string(observed.size()) + " entries, N_out has " +
                        std::to_string(out.size()));
  }
  std::vector<char> seen(g.num_nodes(), 0);
  for (const Observation& o : observed) {
    if (o.node >= g.num_nodes() || !g.has_edge(played, o.node) || seen[o.node]) {
      throw ContractError("feedback node " + std::to_string(o.node) + " is not an unobserved member of N_out(" +
                          std::to_string(played) + ")");
    }
    seen[o.node] = 1;
  }
}

double log_sum_exp(std::span<const double> logs) {
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double x : logs) sum += std::exp(x - top);
  return top + std::log(sum);
}

}  // namespace

void validate(const Exp3GConfig& config, std::size_t num_nodes) {
  if (!(config.eta > 0.0) || !std::isfinite(config.eta)) throw ParameterError("Exp3.G needs eta > 0");
  if (!(config.gamma >= 0.0 && config.gamma <= 1.0)) throw ParameterError("Exp3.G needs gamma in [0, 1]");
  if (config.exploration_set.empty()) throw ParameterError("Exp3.G exploration set is empty");
  for (Node v : config.exploration_set) {
    if (v >= num_nodes) throw ParameterError("exploration node out of range");
  }
  if (!std::is_sorted(config.exploration_set.begin(), config.exploration_set.end()) ||
      std::adjacent_find(config.exploration_set.begin(), config.exploration_set.end()) !=
          config.exploration_set.end()) {
    throw ParameterError("exploration set must be sorted and unique");
  }
}

Exp3GParams exp3g_params(const GraphProfile& profile, std::size_t num_nodes, std::size_t horizon) {
  if (horizon == 0) throw ParameterError("horizon must be positive");
  const double t = static_cast<double>(horizon);
  Exp3GParams out;
  switch (profile.graph_class) {
    case Observability::kNotObservable:
      throw DomainError("Exp3.G needs an observable feedback graph");
    case Observability::kStronglyObservable: {
      const double alpha = static_cast<double>(profile.alpha);
      out.config.gamma = std::min(std::sqrt(1.0 / (alpha * t)), 0.5);
      out.config.eta = 0.5 * out.config.gamma;
      out.config.exploration_set.resize(num_nodes);
      for (Node v = 0; v < num_nodes; ++v) out.config.exploration_set[v] = v;
      out.config.check_loopless_bound = true;
      break;
    }
    case Observability::kWeaklyObservable: {
      const double delta = static_cast<double>(profile.delta);
      const double log_k = std::log(static_cast<double>(num_nodes));
      out.config.gamma = std::min(std::cbrt(delta * log_k / t), 0.5);
      out.config.eta = out.config.gamma * out.config.gamma / delta;
      out.config.exploration_set = profile.dominating_set;
      const double k = static_cast<double>(num_nodes);
      if (t < k * k * k * log_k / (delta * delta)) {
        out.warning = "T=" + std::to_string(horizon) +
                      " is below K^3 ln(K) / delta^2; the weakly-observable rate may not apply";
      }
      break;
    }
  }
  return out;
}

Exp3GState::Exp3GState(std::size_t num_nodes)
    : cumulative_estimates(num_nodes, 0.0),
      q(num_nodes, 1.0 / static_cast<double>(num_nodes)),
      p(num_nodes, 1.0 / static_cast<double>(num_nodes)) {}

void exp3g_refresh(Exp3GState& state, const Exp3GConfig& config) {
  const auto& cum = state.cumulative_estimates;
  const double low = *std::min_element(cum.begin(), cum.end());
  double total = 0.0;
  for (std::size_t i = 0; i < cum.size(); ++i) {
    state.q[i] = std::exp(-config.eta * (cum[i] - low));
    total += state.q[i];
  }
  for (double& x : state.q) x /= total;
  const double share = config.gamma / static_cast<double>(config.exploration_set.size());
  for (std::size_t i = 0; i < cum.size(); ++i) state.p[i] = (1.0 - config.gamma) * state.q[i];
  for (Node u : config.exploration_set) state.p[u] += share;
}

std::vector<double> importance_weighted_estimates(const FeedbackGraph& g, std::span<const double> p,
                                                  Node played,
                                                  std::span<const Observation> observed) {
  check_feedback(g, played, observed);
  std::vector<double> estimates(g.num_nodes(), 0.0);
  for (const Observation& o : observed) {
    double mass = 0.0;
    for (Node j : g.in_neighbors(o.node)) mass += p[j];
    if (!(mass > 0.0)) {
      throw InvariantError("observed node " + std::to_string(o.node) + " has zero observation probability");
    }
    estimates[o.node] = o.loss / mass;
  }
  return estimates;
}

Exp3G::Exp3G(const FeedbackGraph& graph, Exp3GConfig config, std::uint64_t seed)
    : graph_(&graph),
      config_(std::move(config)),
      state_(graph.num_nodes()),
      rng_(seed, streams::kLearner) {
  validate(config_, graph.num_nodes());
}

Node Exp3G::choose() {
  exp3g_refresh(state_, config_);
  ++state_.round;
  return sample_index(state_.p, rng_.uniform());
}

void Exp3G::observe(Node played, std::span<const Observation> feedback) {
  const std::vector<double> estimates =
      importance_weighted_estimates(*graph_, state_.p, played, feedback);
  for (Node i = 0; i < estimates.size(); ++i) {
    if (config_.check_loopless_bound && !graph_->has_self_loop(i) &&
        estimates[i] > config_.loss_scale / config_.eta * (1.0 + 1e-12)) {
      throw InvariantError("loopless estimate exceeds loss_scale / eta at node " + std::to_string(i));
    }
    state_.cumulative_estimates[i] += estimates[i];
  }
}

MiniBatch::MiniBatch(std::unique_ptr<Learner> inner, std::size_t tau, std::size_t horizon,
                     std::size_t num_nodes)
    : inner_(std::move(inner)), tau_(tau), sums_(num_nodes, 0.0) {
  if (!inner_) throw ParameterError("mini-batch wrapper needs an inner learner");
  if (tau_ == 0) throw ParameterError("batch size must be at least 1");
  if (tau_ > horizon) {
    throw ParameterError("batch size " + std::to_string(tau_) + " exceeds horizon " + std::to_string(horizon));
  }
  batches_ = horizon / tau_;
}

Node MiniBatch::choose() {
  if (round_ >= batches_ * tau_) return inner_->choose();
  if (round_ % tau_ == 0) held_ = inner_->choose();
  return held_;
}

void MiniBatch::observe(Node played, std::span<const Observation> feedback) {
  if (round_ >= batches_ * tau_) {
    ++round_;
    inner_->observe(played, feedback);
    return;
  }
  const std::size_t position = round_ % tau_;
  if (position == 0) {
    batch_nodes_.clear();
    for (const Observation& o : feedback) {
      batch_nodes_.push_back(o.node);
      sums_[o.node] = 0.0;
    }
  } else if (feedback.size() != batch_nodes_.size()) {
    throw ContractError("observation set changed inside a batch");
  }
  for (const Observation& o : feedback) sums_[o.node] += o.loss;
  ++round_;
  if (position + 1 == tau_) {
    std::vector<Observation> averaged;
    averaged.reserve(batch_nodes_.size());
    for (Node v : batch_nodes_) averaged.push_back({v, sums_[v] / static_cast<double>(tau_)});
    inner_->observe(held_, averaged);
  }
}

std::size_t optimal_batch_size(double c, double q, std::size_t horizon, std::size_t memory) {
  if (!(c > 0.0)) throw ParameterError("batch-size constant C must be positive");
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("regret exponent q must lie in (0, 1)");
  if (horizon == 0) throw ParameterError("horizon must be positive");
  const double raw = std::pow(c, -1.0 / (2.0 - q)) *
                     std::pow(static_cast<double>(horizon), (1.0 - q) / (2.0 - q));
  const double rounded = std::round(raw);
  const double low = static_cast<double>(memory + 1);
  const double high = static_cast<double>(horizon);
  return static_cast<std::size_t>(std::clamp(rounded, std::min(low, high), high));
}

LazyState::LazyState(std::size_t num_actions) : log_weights(num_actions, 0.0) {}

std::vector<double> LazyState::probabilities() const {
  const double norm = log_sum_exp(log_weights);
  std::vector<double> p(log_weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(log_weights[i] - norm);
  return p;
}

namespace {

void check_lazy_params(double epsilon, double eta) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("lazy learner needs epsilon in [0, 1]");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("lazy learner needs eta > 0");
}

void lazy_update(LazyState& state, std::size_t num_actions, double epsilon, double eta,
                 std::span<const Observation> feedback) {
  if (feedback.size() != num_actions) {
    throw ContractError("a query round needs the loss of every action");
  }
  std::vector<char> seen(num_actions, 0);
  for (const Observation& o : feedback) {
    if (o.node >= num_actions || seen[o.node]) throw ContractError("malformed full feedback");
    seen[o.node] = 1;
    state.log_weights[o.node] -= eta * o.loss / epsilon;
  }
}

}  // namespace

LazyLabelEfficient::LazyLabelEfficient(std::size_t num_actions, double epsilon, double eta,
                                       std::uint64_t seed)
    : epsilon_(epsilon),
      eta_(eta),
      state_(num_actions),
      action_rng_(seed, streams::kLearner),
      query_rng_(seed, streams::kLazyQuery) {
  if (num_actions == 0) throw ParameterError("lazy learner needs at least one action");
  check_lazy_params(epsilon, eta);
}

Node LazyLabelEfficient::choose() {
  if (state_.previous_query) {
    state_.held = sample_index(state_.probabilities(), action_rng_.uniform());
  }
  state_.current_query = query_rng_.bernoulli(epsilon_);
  ++state_.round;
  return state_.held;
}

void LazyLabelEfficient::observe(Node, std::span<const Observation> feedback) {
  if (state_.current_query) {
    ++state_.queries;
    lazy_update(state_, state_.log_weights.size(), epsilon_, eta_, feedback);
  }
  state_.previous_query = state_.current_query;
}

std::optional<Node> find_revealing_action(const FeedbackGraph& g) {
  for (Node v = 0; v < g.num_nodes(); ++v) {
    if (g.out_neighbors(v).size() == g.num_nodes()) return v;
  }
  return std::nullopt;
}

LazyRevealing::LazyRevealing(const FeedbackGraph& graph, double epsilon, double eta,
                             std::uint64_t seed)
    : revealing_(0),
      epsilon_(epsilon),
      eta_(eta),
      state_(graph.num_nodes()),
      action_rng_(seed, streams::kLearner),
      query_rng_(seed, streams::kLazyQuery) {
  const auto r = find_revealing_action(graph);
  if (!r) throw DomainError("lazy revealing player needs an action that observes every node");
  revealing_ = *r;
  check_lazy_params(epsilon, eta);
}

Node LazyRevealing::choose() {
  if (state_.previous_query) {
    state_.held = sample_index(state_.probabilities(), action_rng_.uniform());
  }
  state_.current_query = query_rng_.bernoulli(epsilon_);
  ++state_.round;
  return state_.current_query ? revealing_ : state_.held;
}

void LazyRevealing::observe(Node, std::span<const Observation> feedback) {
  if (state_.current_query) {
    ++state_.queries;
    lazy_update(state_, state_.log_weights.size(), epsilon_, eta_, feedback);
  }
  state_.previous_query = state_.current_query;
}

LazyParams lazy_params(std::size_t horizon, std::size_t num_actions, double m) {
  if (horizon == 0 || num_actions == 0) throw ParameterError("lazy parameters need T, N >= 1");
  if (!(m > 0.0)) throw ParameterError("expected query count m must be positive");
  const double t = static_cast<double>(horizon);
  LazyParams out;
  out.epsilon = std::min(m / t, 1.0);
  out.eta = std::sqrt(2.0 * m * std::log(static_cast<double>(num_actions))) / t;
  return out;
}

UniformRandom::UniformRandom(std::size_t num_actions, std::uint64_t seed)
    : p_(num_actions, 1.0 / static_cast<double>(num_actions)), rng_(seed, streams::kLearner) {
  if (num_actions == 0) throw ParameterError("uniform learner needs at least one action");
}

Node UniformRandom::choose() { return sample_index(p_, rng_.uniform()); }

namespace {

class ParamReader {
 public:
  ParamReader(const LearnerSpec& spec, std::set<std::string> allowed) : spec_(spec) {
    for (const auto& [key, value] : spec.params) {
      if (!allowed.count(key)) {
        throw ConfigError("learner '" + spec.name + "' does not accept parameter '" + key + "'");
      }
    }
  }

  std::optional<double> get(const std::string& key) const {
    auto it = spec_.params.find(key);
    if (it == spec_.params.end()) return std::nullopt;
    return it->second;
  }

 private:
  const LearnerSpec& spec_;
};

Exp3GConfig exp3g_config(const ParamReader& params, const GraphProfile& profile,
                         std::size_t num_nodes, std::size_t horizon, double max_loss) {
  Exp3GConfig config = exp3g_params(profile, num_nodes, horizon).config;
  config.loss_scale = max_loss;
  if (auto eta = params.get("eta")) {
    config.eta = *eta;
    config.check_loopless_bound = false;
  }
  if (auto gamma = params.get("gamma")) {
    config.gamma = *gamma;
    config.check_loopless_bound = false;
  }
  return config;
}

}  // namespace

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const FeedbackGraph& graph,
                                      const GraphProfile& profile, std::size_t horizon,
                                      std::size_t adversary_memory, double max_loss,
                                      std::uint64_t seed) {
  const std::size_t k = graph.num_nodes();
  if (spec.name == "exp3g") {
    ParamReader params(spec, {"eta", "gamma"});
    return std::make_unique<Exp3G>(graph, exp3g_config(params, profile, k, horizon, max_loss), seed);
  }
  if (spec.name == "minibatch-exp3g") {
    ParamReader params(spec, {"eta", "gamma", "tau", "m", "batch_c", "batch_q"});
    const double memory = params.get("m").value_or(static_cast<double>(adversary_memory));
    if (memory < 0.0) throw ConfigError("parameter 'm' must be nonnegative");
    std::size_t tau = 0;
    if (auto fixed = params.get("tau")) {
      if (*fixed < 1.0 || *fixed != std::floor(*fixed)) throw ConfigError("parameter 'tau' must be a positive integer");
      tau = static_cast<std::size_t>(*fixed);
    } else {
      tau = optimal_batch_size(params.get("batch_c").value_or(1.0), params.get("batch_q").value_or(0.5),
                               horizon, static_cast<std::size_t>(memory));
    }
    if (tau > horizon) throw ConfigError("parameter 'tau' exceeds the horizon");
    const std::size_t batches = horizon / tau;
    auto inner = std::make_unique<Exp3G>(graph, exp3g_config(params, profile, k, batches, max_loss), seed);
    return std::make_unique<MiniBatch>(std::move(inner), tau, horizon, k);
  }
  if (spec.name == "lazy-label-efficient" || spec.name == "lazy-revealing") {
    ParamReader params(spec, {"eta", "epsilon", "m"});
    const double m = params.get("m").value_or(std::pow(static_cast<double>(horizon), 2.0 / 3.0));
    LazyParams lazy = lazy_params(horizon, k, m);
    if (auto eps = params.get("epsilon")) lazy.epsilon = *eps;
    if (auto eta = params.get("eta")) lazy.eta = *eta;
    if (spec.name == "lazy-label-efficient") {
      return std::make_unique<LazyLabelEfficient>(k, lazy.epsilon, lazy.eta, seed);
    }
    return std::make_unique<LazyRevealing>(graph, lazy.epsilon, lazy.eta, seed);
  }
  if (spec.name == "uniform-random") {
    ParamReader params(spec, {});
    return std::make_unique<UniformRandom>(k, seed);
  }
  throw ConfigError("unknown learner '" + spec.name + "'");
}

}  // namespace graphfb
