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

#include "graphfb/adversary.hpp"

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

#include "graphfb/errors.hpp"
#include "graphfb/format.hpp"
#include "graphfb/mrw.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

ObliviousSequence::ObliviousSequence(std::size_t horizon, std::size_t num_actions,
                                     std::vector<double> losses)
    : horizon_(horizon), num_actions_(num_actions), losses_(std::move(losses)) {
  if (horizon_ == 0 || num_actions_ == 0) throw ParameterError("loss matrix must be nonempty");
  if (losses_.size() != horizon_ * num_actions_) {
    throw ParameterError("loss matrix has " + std::to_string(losses_.size()) + " entries, expected " +
                         std::to_string(horizon_ * num_actions_));
  }
  for (double x : losses_) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("oblivious losses must lie in [0, 1]");
  }
}

ObliviousSequence ObliviousSequence::bernoulli(std::span<const double> means, std::size_t horizon,
                                               std::uint64_t seed) {
  for (double m : means) {
    if (!(m >= 0.0 && m <= 1.0)) throw ParameterError("Bernoulli means must lie in [0, 1]");
  }
  RngStream rng(seed, streams::kBernoulliLosses);
  std::vector<double> losses;
  losses.reserve(horizon * means.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (double m : means) losses.push_back(rng.bernoulli(m) ? 1.0 : 0.0);
  }
  return ObliviousSequence(horizon, means.size(), std::move(losses));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ObliviousSequence parse_oblivious_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("loss CSV line " + std::to_string(line_no) + ": " + what);
  };
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "t") fail("expected header t,loss_0,...");
    for (std::size_t i = 1; i < header.size(); ++i) {
      if (header[i] != "loss_" + std::to_string(i - 1)) fail("bad column name '" + header[i] + "'");
    }
    k = header.size() - 1;
    break;
  }
  if (k == 0) throw ConfigError("loss CSV has no header");
  std::vector<double> losses;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != k + 1) fail("expected " + std::to_string(k + 1) + " columns");
    double t = 0;
    if (!parse_double(cells[0], t) || t != static_cast<double>(rows + 1)) {
      fail("rounds must be numbered 1..T in order");
    }
    for (std::size_t i = 1; i <= k; ++i) {
      double x = 0;
      if (!parse_double(cells[i], x)) fail("bad number '" + cells[i] + "'");
      if (!(x >= 0.0 && x <= 1.0)) fail("loss outside [0, 1]");
      losses.push_back(x);
    }
    ++rows;
  }
  if (rows == 0) throw ConfigError("loss CSV has no rows");
  return ObliviousSequence(rows, k, std::move(losses));
}

ObliviousSequence load_oblivious_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open loss file '" + path + "'");
  return parse_oblivious_csv(in);
}

void write_oblivious_csv(std::ostream& out, const ObliviousSequence& seq) {
  out << 't';
  for (std::size_t i = 0; i < seq.num_actions(); ++i) out << ",loss_" << i;
  out << '\n';
  for (std::size_t t = 1; t <= seq.horizon(); ++t) {
    out << t;
    for (double x : seq.round(t)) out << ',' << format_double(x);
    out << '\n';
  }
}

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::kOblivious: return "oblivious";
    case AdversaryKind::kSwitchingCost: return "switching_cost";
    case AdversaryKind::kMemory1Mrw: return "memory1_mrw";
    case AdversaryKind::kCustom: return "custom";
  }
  return "?";
}

Adversary::Adversary(AdversaryKind kind, std::size_t num_actions, std::size_t horizon,
                     std::size_t memory, double max_loss, std::uint64_t seed, TailLoss loss)
    : kind_(kind),
      num_actions_(num_actions),
      horizon_(horizon),
      memory_(memory),
      max_loss_(max_loss),
      seed_(seed),
      loss_(std::move(loss)) {
  if (num_actions_ == 0 || horizon_ == 0) throw ParameterError("adversary needs K >= 1 and T >= 1");
  if (!(max_loss_ > 0.0)) throw ParameterError("adversary max_loss must be positive");
  if (!loss_) throw ParameterError("adversary loss callback is empty");
}

double Adversary::evaluate(std::size_t t, std::span<const Node> tail) const {
  if (t < 1 || t > horizon_) {
    throw RangeError("round " + std::to_string(t) + " outside [1, " + std::to_string(horizon_) + "]");
  }
  if (tail.size() != tail_length(t)) {
    throw ParameterError("round " + std::to_string(t) + " expects " + std::to_string(tail_length(t)) +
                         " trailing actions, got " + std::to_string(tail.size()));
  }
  for (Node x : tail) {
    if (x >= num_actions_) throw RangeError("action " + std::to_string(x) + " out of range");
  }
  return loss_(t, tail);
}

Adversary make_oblivious(ObliviousSequence base, std::uint64_t seed) {
  auto data = std::make_shared<const ObliviousSequence>(std::move(base));
  const std::size_t k = data->num_actions();
  const std::size_t horizon = data->horizon();
  return Adversary(AdversaryKind::kOblivious, k, horizon, 0, 1.0, seed,
                   [data](std::size_t t, std::span<const Node> tail) {
                     return data->loss(t, tail.back());
                   });
}

Adversary make_switching_cost(ObliviousSequence base, std::uint64_t seed) {
  auto data = std::make_shared<const ObliviousSequence>(std::move(base));
  const std::size_t k = data->num_actions();
  const std::size_t horizon = data->horizon();
  return Adversary(AdversaryKind::kSwitchingCost, k, horizon, 1, 2.0, seed,
                   [data](std::size_t t, std::span<const Node> tail) {
                     const double base_loss = data->loss(t, tail.back());
                     if (tail.size() < 2) return base_loss;
                     return tail[0] != tail[1] ? base_loss + 1.0 : base_loss;
                   });
}

Adversary make_memory1_mrw(std::size_t horizon, std::uint64_t seed) {
  auto walk = std::make_shared<const MrwSequence>(generate_mrw(horizon, seed));
  return Adversary(AdversaryKind::kMemory1Mrw, 2, horizon + 1, 1, 2.0, seed,
                   [walk](std::size_t t, std::span<const Node> tail) {
                     if (t == 1) return 0.0;
                     const Node prev = tail[0];
                     const double carried = walk->clipped[prev][t - 2];
                     return prev != tail[1] ? carried + 1.0 : carried;
                   });
}

Adversary make_custom(std::size_t num_actions, std::size_t horizon, std::size_t memory,
                      double max_loss, HistoryLoss loss, std::uint64_t seed, std::size_t probes) {
  if (!loss) throw ParameterError("custom adversary callback is empty");
  if (num_actions == 0 || horizon == 0) throw ParameterError("adversary needs K >= 1 and T >= 1");

  // Spot-check the memory bound before accepting the callback.
  if (num_actions > 1 && horizon > memory + 1) {
    RngStream rng(seed, streams::kMemoryProbe);
    auto draw = [&] {
      return static_cast<Node>(rng.uniform() * static_cast<double>(num_actions)) % num_actions;
    };
    std::vector<Node> history;
    for (std::size_t probe = 0; probe < probes; ++probe) {
      const std::size_t span = horizon - memory - 1;
      const std::size_t t = memory + 2 + static_cast<std::size_t>(rng.uniform() * span) % span;
      history.resize(t);
      for (auto& x : history) x = draw();
      const double before = loss(t, history);
      for (std::size_t i = 0; i + memory + 1 < t; ++i) history[i] = draw();
      if (loss(t, history) != before) {
        throw ParameterError("custom adversary depends on actions older than m+1 = " +
                             std::to_string(memory + 1) + " rounds (round " + std::to_string(t) + ")");
      }
    }
  }

  auto fn = std::make_shared<const HistoryLoss>(std::move(loss));
  return Adversary(AdversaryKind::kCustom, num_actions, horizon, memory, max_loss, seed,
                   [fn, max_loss](std::size_t t, std::span<const Node> tail) {
                     // Older actions are irrelevant by the memory bound; pad with 0.
                     std::vector<Node> history(t, 0);
                     std::copy(tail.begin(), tail.end(), history.end() - static_cast<long>(tail.size()));
                     const double value = (*fn)(t, history);
                     if (!(value >= 0.0 && value <= max_loss)) {
                       throw InvariantError("custom adversary loss outside [0, max_loss]");
                     }
                     return value;
                   });
}

}  // namespace graphfb
