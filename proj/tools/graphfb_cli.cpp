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

// graphfb: experiments on online learning with feedback graphs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "graphfb/adversary.hpp"
#include "graphfb/engine.hpp"
#include "graphfb/errors.hpp"
#include "graphfb/experiment.hpp"
#include "graphfb/format.hpp"
#include "graphfb/graph.hpp"
#include "graphfb/mrw.hpp"
#include "graphfb/reduction.hpp"

namespace {

using namespace graphfb;

constexpr int kConfigExit = 2;
constexpr int kInvariantExit = 3;

std::string join(const NodeSet& nodes) {
  std::string s = "{";
  for (std::size_t i = 0; i < nodes.size(); ++i) s += (i ? "," : "") + std::to_string(nodes[i]);
  return s + "}";
}

int analyze_graph(const std::string& spec) {
  const FeedbackGraph g = graph_from_spec(spec);
  const Classification c = classify_graph(g);
  const GraphProfile p = profile_graph(g);
  std::cout << "K: " << g.num_nodes() << "\n"
            << "edges: " << g.edges().size() << "\n"
            << "class: " << to_string(c.graph_class) << "\n";
  for (Node v = 0; v < g.num_nodes(); ++v) {
    std::cout << "  node " << v << ": " << to_string(c.node_classes[v]) << " in=" << join(g.in_neighbors(v))
              << " out=" << join(g.out_neighbors(v)) << "\n";
  }
  if (c.graph_class == Observability::kNotObservable) return 0;
  std::cout << "alpha: " << p.alpha << "\n"
            << "delta: " << p.delta << "\n"
            << "dominating_set: " << join(p.dominating_set) << "\n"
            << "weakly_observable: " << join(p.weakly_observable_nodes) << "\n";
  if (c.graph_class == Observability::kStronglyObservable) {
    std::cout << "revealing: " << (p.revealing ? "yes" : "no") << "\n";
    if (auto pair = find_independent_disjoint_pair(g)) {
      std::cout << "independent_disjoint_pair: " << pair->first << "," << pair->second << "\n";
    }
  }
  return 0;
}

void apply_overrides(ExperimentConfig& config, std::size_t workers, const std::string& out,
                     const std::optional<std::uint64_t>& seed) {
  if (workers > 0) config.workers = workers;
  if (!out.empty()) config.out_dir = out;
  if (seed) config.master_seed = *seed;
}

int run_single(ExperimentConfig config) {
  const FeedbackGraph graph = build_graph(config.graph);
  const std::size_t t = config.horizons.front();
  const std::uint64_t cell = derive_seed(config.master_seed, t, 0);
  const Adversary adv =
      make_adversary_factory(config.adversary, graph.num_nodes(), t)(derive_seed(cell, 1));
  const GraphProfile profile = profile_graph(graph);
  auto learner = make_learner(config.learner, graph, profile, game_horizon(config.adversary, t), adv.memory(),
                              adv.max_loss(), derive_seed(cell, 2));
  const GameTranscript tr = run_game(graph, *learner, adv, game_horizon(config.adversary, t), cell);
  const RegretReport report = policy_regret(tr, adv);

  std::cout << "T=" << t << " seed=" << cell << "\n"
            << "policy_regret=" << format_double(report.policy_regret) << "\n";
  if (report.standard_regret) std::cout << "standard_regret=" << format_double(*report.standard_regret) << "\n";
  std::cout << "best_fixed=" << report.best_fixed_action << "\n"
            << "M_T=" << tr.switches << "\n";
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream f(std::filesystem::path(config.out_dir) / "transcript.csv", std::ios::binary);
    write_transcript_csv(f, tr);
  }
  return 0;
}

void print_fit(const std::optional<ScalingFit>& fit, const std::vector<std::string>& notices) {
  for (const auto& n : notices) std::cerr << "notice: " << n << "\n";
  if (fit) {
    std::cout << "slope=" << format_double(fit->slope) << " intercept=" << format_double(fit->intercept)
              << " slope_stderr=" << format_double(fit->slope_stderr) << " points=" << fit->points.size() << "\n";
  }
}

int sweep(ExperimentConfig config) {
  const SweepResult r = run_sweep(config);
  std::ostringstream summary;
  write_summary_csv(summary, r.summary);
  std::cout << summary.str();
  print_fit(r.fit, r.notices);
  return 0;
}

int fit_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file '" + path + "'");
  const auto rows = parse_results_csv(in);
  const auto summary = summarize(rows);
  std::vector<std::string> notices;
  const auto fit = fit_summary(summary, &notices);
  std::ostringstream s;
  write_summary_csv(s, summary);
  std::cout << s.str();
  print_fit(fit, notices);
  return 0;
}

int mrw_gen(std::size_t horizon, std::uint64_t seed, const std::string& out) {
  const MrwSequence seq = generate_mrw(horizon, seed);
  if (out.empty()) {
    write_mrw_csv(std::cout, seq);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + out + "'");
    write_mrw_csv(f, seq);
  }
  return 0;
}

int reduce(const std::string& graph_file, const std::string& v1_text) {
  const FeedbackGraph g = load_graph(graph_file);
  NodeSet v1;
  std::stringstream ss(v1_text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != tok.size() || v >= g.num_nodes()) throw ConfigError("bad --v1 node '" + tok + "'");
    v1.push_back(v);
  }
  std::sort(v1.begin(), v1.end());
  v1.erase(std::unique(v1.begin(), v1.end()), v1.end());
  if (v1.empty()) throw ConfigError("--v1 must name at least one node");

  const auto map = preserves_observability(g, v1);
  if (map) {
    std::cout << "V1 " << join(v1) << " preserves observability\n";
    for (const auto& [v, w] : *map) std::cout << "  " << v << " -> " << w << "\n";
    return 0;
  }
  std::cout << "V1 " << join(v1) << " does not preserve observability\n";
  for (Node v = 0; v < g.num_nodes(); ++v) {
    if (std::binary_search(v1.begin(), v1.end(), v)) continue;
    NodeSet seen_in_v1;
    for (Node b : g.out_neighbors(v)) {
      if (std::binary_search(v1.begin(), v1.end(), b)) seen_in_v1.push_back(b);
    }
    bool covered = false;
    for (Node w : v1) {
      bool ok = true;
      for (Node b : seen_in_v1) ok = ok && g.has_edge(w, b);
      covered = covered || ok;
    }
    if (!covered) {
      std::cout << "  node " << v << " observes " << join(seen_in_v1)
                << " inside V1 but no V1 node observes all of them\n";
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online learning with feedback graphs: graph analysis, games and regret sweeps"};
  app.require_subcommand(1);

  std::size_t workers = 0;
  std::string out;
  std::optional<std::uint64_t> seed;

  auto* analyze = app.add_subcommand("analyze-graph", "Classify a feedback graph and report alpha, delta, revealability");
  std::string graph_spec;
  analyze->add_option("graph", graph_spec, "graph file or kind:K (e.g. revealing_action:4)")->required();

  auto* run = app.add_subcommand("run", "Play one game (first horizon, first seed) and print its regret");
  std::string run_config;
  run->add_option("config", run_config, "experiment config")->required();

  auto* sw = app.add_subcommand("sweep", "Run every (T, seed) cell of a config and fit the regret exponent");
  std::string sweep_config;
  sw->add_option("config", sweep_config, "experiment config")->required();

  for (auto* sub : {run, sw}) {
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "master seed");
  }

  auto* fit = app.add_subcommand("fit", "Re-fit the scaling exponent from a results CSV");
  std::string results_path;
  fit->add_option("results", results_path, "results.csv")->required();

  auto* mrw = app.add_subcommand("mrw-gen", "Emit a multi-scale random walk loss sequence as CSV");
  std::size_t mrw_t = 0;
  std::uint64_t mrw_seed = 0;
  std::string mrw_out;
  mrw->add_option("--T", mrw_t, "horizon")->required();
  mrw->add_option("--seed", mrw_seed, "seed");
  mrw->add_option("--out", mrw_out, "output file (default stdout)");

  auto* red = app.add_subcommand("reduce", "Check whether V1 preserves observability and print the observing map");
  std::string red_graph;
  std::string red_v1;
  red->add_option("graph", red_graph, "graph file")->required();
  red->add_option("--v1", red_v1, "comma-separated node list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*analyze) return analyze_graph(graph_spec);
    if (*run) {
      auto config = load_config(run_config);
      apply_overrides(config, workers, out, seed);
      return run_single(config);
    }
    if (*sw) {
      auto config = load_config(sweep_config);
      apply_overrides(config, workers, out, seed);
      return sweep(config);
    }
    if (*fit) return fit_results(results_path);
    if (*mrw) return mrw_gen(mrw_t, mrw_seed, mrw_out);
    if (*red) return reduce(red_graph, red_v1);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariantExit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
