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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphfb/adversary.hpp"
#include "graphfb/engine.hpp"
#include "graphfb/graph.hpp"
#include "graphfb/learner.hpp"

namespace graphfb {

struct GraphSpec {
  std::string kind;  // standard kind name, or empty when `file` is set
  std::size_t num_nodes = 0;
  std::string file;
};

FeedbackGraph build_graph(const GraphSpec& spec);

// Adversary kinds: bernoulli, switching-bernoulli (i.i.d. Bernoulli(means)),
// csv, switching-csv (losses from `file`), mrw (memory-1 random walk, K = 2).
struct AdversarySpec {
  std::string kind = "bernoulli";
  std::vector<double> means;
  std::string file;
};

// Rounds actually played for grid horizon T: T + 1 for mrw, T otherwise.
std::size_t game_horizon(const AdversarySpec& spec, std::size_t horizon);

// ConfigError for unknown kinds or a means/K mismatch.
AdversaryFactory make_adversary_factory(const AdversarySpec& spec, std::size_t num_nodes,
                                        std::size_t horizon);

struct ExperimentConfig {
  GraphSpec graph;
  LearnerSpec learner;
  AdversarySpec adversary;
  std::vector<std::size_t> horizons;
  std::size_t seeds = 1;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::string out_dir;
};

// Flat "key = value" text with [graph], [learner], [adversary], [sweep]
// sections; '#' starts a comment. Relative file paths resolve against
// `base_dir`. Horizon lists accept integers, 2^k, and 2^a..2^b ranges.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<std::pair<double, double>> points;  // (ln T, ln mean regret)
  std::vector<double> excluded;                   // T values with mean <= 0

  friend bool operator==(const ScalingFit&, const ScalingFit&) = default;
};

// OLS of ln(regret) on ln(T) over points with positive regret. ParameterError
// if fewer than three remain.
ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& points);

struct ResultRow {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  double policy_regret = 0.0;
  std::size_t switches = 0;
  Node best_fixed = 0;
};

struct SummaryRow {
  std::size_t horizon = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

struct SweepResult {
  std::vector<ResultRow> rows;  // ordered by (T, seed index)
  std::vector<SummaryRow> summary;
  std::optional<ScalingFit> fit;
  std::vector<std::string> notices;
};

// Runs every (T, seed index) cell, cell seed derive_seed(master, T, index).
// Writes results.csv, summary.csv, fit.csv, regret.dat and regret.svg into
// config.out_dir when it is nonempty.
SweepResult run_sweep(const ExperimentConfig& config);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

// results.csv: "T,seed,policy_regret,M_T,best_fixed".
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_results_csv(std::istream& in);
// summary.csv: "T,mean,stderr,n".
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

// Fit over summary means; nullopt with a notice when fewer than 3 usable points.
std::optional<ScalingFit> fit_summary(const std::vector<SummaryRow>& summary,
                                      std::vector<std::string>* notices = nullptr);

// Log-log line plot of mean regret against T.
std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& title);

}  // namespace graphfb
