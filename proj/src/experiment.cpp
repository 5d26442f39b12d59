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

#include "graphfb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "graphfb/errors.hpp"
#include "graphfb/format.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

namespace fs = std::filesystem;

FeedbackGraph build_graph(const GraphSpec& spec) {
  if (!spec.file.empty()) return load_graph(spec.file);
  if (spec.kind.empty()) throw ConfigError("[graph] needs 'kind' or 'file'");
  return standard_graph(parse_graph_kind(spec.kind), spec.num_nodes);
}

std::size_t game_horizon(const AdversarySpec& spec, std::size_t horizon) {
  return spec.kind == "mrw" ? horizon + 1 : horizon;
}

AdversaryFactory make_adversary_factory(const AdversarySpec& spec, std::size_t num_nodes,
                                        std::size_t horizon) {
  const std::string& kind = spec.kind;
  if (kind == "bernoulli" || kind == "switching-bernoulli") {
    if (spec.means.size() != num_nodes) {
      throw ConfigError("[adversary] 'means' has " + std::to_string(spec.means.size()) +
                        " entries but the graph has " + std::to_string(num_nodes) + " nodes");
    }
    const bool switching = kind == "switching-bernoulli";
    auto means = spec.means;
    for (double m : means) {
      if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("[adversary] 'means' entries must lie in [0, 1]");
    }
    return [means, horizon, switching](std::uint64_t seed) {
      auto seq = ObliviousSequence::bernoulli(means, horizon, seed);
      return switching ? make_switching_cost(std::move(seq), seed) : make_oblivious(std::move(seq), seed);
    };
  }
  if (kind == "csv" || kind == "switching-csv") {
    if (spec.file.empty()) throw ConfigError("[adversary] kind '" + kind + "' needs 'file'");
    auto seq = std::make_shared<const ObliviousSequence>(load_oblivious_csv(spec.file));
    if (seq->num_actions() != num_nodes) throw ConfigError("[adversary] loss file has the wrong number of actions");
    if (seq->horizon() < horizon) throw ConfigError("[adversary] loss file is shorter than the horizon");
    const bool switching = kind == "switching-csv";
    return [seq, switching](std::uint64_t seed) {
      return switching ? make_switching_cost(*seq, seed) : make_oblivious(*seq, seed);
    };
  }
  if (kind == "mrw") {
    if (num_nodes != 2) throw ConfigError("[adversary] kind 'mrw' needs a 2-node graph");
    return [horizon](std::uint64_t seed) { return make_memory1_mrw(horizon, seed); };
  }
  throw ConfigError("unknown adversary kind '" + kind + "'");
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size()) throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  return v;
}

double parse_number(const std::string& key, const std::string& text) {
  double v = 0;
  if (!parse_double(text, v)) throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

std::size_t parse_horizon_token(const std::string& key, const std::string& token) {
  if (auto caret = token.find('^'); caret != std::string::npos) {
    const auto base = parse_uint(key, token.substr(0, caret));
    const auto exp = parse_uint(key, token.substr(caret + 1));
    if (exp > 62) throw ConfigError("key '" + key + "': exponent too large");
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < exp; ++i) v *= base;
    return v;
  }
  return parse_uint(key, token);
}

std::vector<std::size_t> parse_horizons(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split(value, ',')) {
    if (auto dots = item.find(".."); dots != std::string::npos) {
      const std::string lo = trim(item.substr(0, dots));
      const std::string hi = trim(item.substr(dots + 2));
      if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0) {
        throw ConfigError("key '" + key + "': ranges must be written 2^a..2^b");
      }
      const auto a = parse_uint(key, lo.substr(2));
      const auto b = parse_uint(key, hi.substr(2));
      if (a > b || b > 62) throw ConfigError("key '" + key + "': bad range '" + item + "'");
      for (auto e = a; e <= b; ++e) out.push_back(std::size_t{1} << e);
    } else {
      out.push_back(parse_horizon_token(key, item));
    }
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const fs::path& base_dir) {
  ExperimentConfig config;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string> seen;
  auto fail = [&](const std::string& what) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
  };
  auto resolve = [&](const std::string& path) {
    const fs::path p(path);
    return (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "graph" && section != "learner" && section != "adversary" && section != "sweep") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) fail("duplicate key '" + full + "'");

    try {
      if (section == "graph") {
        if (key == "kind") {
          config.graph.kind = value;
        } else if (key == "K") {
          config.graph.num_nodes = parse_uint(full, value);
        } else if (key == "file") {
          config.graph.file = resolve(value);
        } else {
          fail("unknown key '" + full + "'");
        }
      } else if (section == "learner") {
        if (key == "name") {
          config.learner.name = value;
        } else {
          config.learner.params[key] = parse_number(full, value);
        }
      } else if (section == "adversary") {
        if (key == "kind") {
          config.adversary.kind = value;
        } else if (key == "means") {
          for (const auto& m : split(value, ',')) config.adversary.means.push_back(parse_number(full, m));
        } else if (key == "file") {
          config.adversary.file = resolve(value);
        } else {
          fail("unknown key '" + full + "'");
        }
      } else {
        if (key == "horizons") {
          config.horizons = parse_horizons(full, value);
        } else if (key == "seeds") {
          config.seeds = parse_uint(full, value);
        } else if (key == "master_seed") {
          config.master_seed = parse_uint(full, value);
        } else if (key == "workers") {
          config.workers = parse_uint(full, value);
        } else if (key == "out") {
          config.out_dir = resolve(value);
        } else {
          fail("unknown key '" + full + "'");
        }
      }
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind("config line", 0) == 0) throw;
      fail(what);
    }
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, fs::path(path).parent_path());
}

void validate(const ExperimentConfig& config) {
  if (config.horizons.empty()) throw ConfigError("[sweep] 'horizons' is required");
  for (std::size_t i = 0; i < config.horizons.size(); ++i) {
    if (config.horizons[i] < 2) throw ConfigError("[sweep] every horizon must be >= 2");
    if (i > 0 && config.horizons[i] <= config.horizons[i - 1]) {
      throw ConfigError("[sweep] 'horizons' must be strictly increasing");
    }
  }
  if (config.seeds < 1) throw ConfigError("[sweep] 'seeds' must be >= 1");
  if (config.graph.file.empty() && config.graph.kind.empty()) {
    throw ConfigError("[graph] needs 'kind' or 'file'");
  }
}

ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  ScalingFit fit;
  for (const auto& [t, regret] : points) {
    if (!(t > 0.0)) throw ParameterError("horizons must be positive");
    if (regret > 0.0) {
      fit.points.emplace_back(std::log(t), std::log(regret));
    } else {
      fit.excluded.push_back(t);
    }
  }
  const std::size_t n = fit.points.size();
  if (n < 3) {
    throw ParameterError("exponent fit needs at least 3 points with positive regret, got " + std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) throw ParameterError("exponent fit needs at least two distinct horizons");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
  }
  fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::size_t, std::vector<double>> by_t;
  for (const auto& r : rows) by_t[r.horizon].push_back(r.policy_regret);
  for (const auto& [t, values] : by_t) {
    const auto [mean, se] = mean_and_stderr(values);
    out.push_back({t, mean, se, values.size()});
  }
  return out;
}

std::optional<ScalingFit> fit_summary(const std::vector<SummaryRow>& summary,
                                      std::vector<std::string>* notices) {
  std::vector<std::pair<double, double>> points;
  for (const auto& s : summary) points.emplace_back(static_cast<double>(s.horizon), s.mean);
  for (const auto& s : summary) {
    if (!(s.mean > 0.0) && notices) {
      notices->push_back("T=" + std::to_string(s.horizon) + " excluded from fit (mean regret " +
                         format_double(s.mean) + " is not positive)");
    }
  }
  const auto usable = std::count_if(summary.begin(), summary.end(), [](const SummaryRow& s) { return s.mean > 0.0; });
  if (usable < 3) {
    if (notices) notices->push_back("fit omitted: fewer than 3 horizons with positive mean regret");
    return std::nullopt;
  }
  return fit_exponent(points);
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "T,seed,policy_regret,M_T,best_fixed\n";
  for (const auto& r : rows) {
    out << r.horizon << ',' << r.seed << ',' << format_double(r.policy_regret) << ',' << r.switches << ','
        << r.best_fixed << '\n';
  }
}

std::vector<ResultRow> parse_results_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<ResultRow> rows;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "T,seed,policy_regret,M_T,best_fixed") {
        throw ConfigError("results CSV line " + std::to_string(line_no) + ": unexpected header");
      }
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 5) throw ConfigError("results CSV line " + std::to_string(line_no) + ": expected 5 columns");
    try {
      ResultRow r;
      r.horizon = parse_uint("T", cells[0]);
      r.seed = parse_uint("seed", cells[1]);
      r.policy_regret = parse_number("policy_regret", cells[2]);
      r.switches = parse_uint("M_T", cells[3]);
      r.best_fixed = parse_uint("best_fixed", cells[4]);
      rows.push_back(r);
    } catch (const ConfigError& e) {
      throw ConfigError("results CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header) throw ConfigError("results CSV is empty");
  return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "T,mean,stderr,n\n";
  for (const auto& s : summary) {
    out << s.horizon << ',' << format_double(s.mean) << ',' << format_double(s.stderr_) << ',' << s.n << '\n';
  }
}

std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& title) {
  constexpr double kWidth = 640;
  constexpr double kHeight = 420;
  constexpr double kMargin = 60;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : summary) {
    if (s.mean > 0.0) pts.emplace_back(std::log10(static_cast<double>(s.horizon)), std::log10(s.mean));
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  const double x0 = kMargin;
  const double y0 = kHeight - kMargin;
  const double x1 = kWidth - kMargin / 2;
  const double y1 = kMargin;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 T</text>\n";
  svg << "<text x=\"15\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 15 "
      << (y0 + y1) / 2 << ")\">log10 mean regret</text>\n";
  if (!pts.empty()) {
    auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end());
    double lo_x = xmin->first;
    double hi_x = xmax->first;
    double lo_y = pts.front().second;
    double hi_y = lo_y;
    for (const auto& p : pts) {
      lo_y = std::min(lo_y, p.second);
      hi_y = std::max(hi_y, p.second);
    }
    if (hi_x - lo_x < 1e-12) hi_x = lo_x + 1;
    if (hi_y - lo_y < 1e-12) hi_y = lo_y + 1;
    auto sx = [&](double x) { return x0 + (x - lo_x) / (hi_x - lo_x) * (x1 - x0); };
    auto sy = [&](double y) { return y0 - (y - lo_y) / (hi_y - lo_y) * (y0 - y1); };
    svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << format_double(sx(x)) << ',' << format_double(sy(y)) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : pts) {
      svg << "<circle cx=\"" << format_double(sx(x)) << "\" cy=\"" << format_double(sy(y))
          << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    svg << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_double(lo_x) << "</text>\n";
    svg << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_double(hi_x) << "</text>\n";
    svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_double(lo_y) << "</text>\n";
    svg << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << format_double(hi_y) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

SweepResult run_sweep(const ExperimentConfig& config) {
  validate(config);
  const FeedbackGraph graph = build_graph(config.graph);
  const GraphProfile profile = profile_graph(graph);
  if (profile.graph_class == Observability::kNotObservable) {
    throw ConfigError("[graph] is not observable; no learner can play on it");
  }

  struct Cell {
    std::size_t horizon;
    std::size_t index;
  };
  std::vector<Cell> cells;
  std::vector<AdversaryFactory> factories;
  for (std::size_t h = 0; h < config.horizons.size(); ++h) {
    factories.push_back(make_adversary_factory(config.adversary, graph.num_nodes(), config.horizons[h]));
    for (std::size_t i = 0; i < config.seeds; ++i) cells.push_back({h, i});
  }
  // Fail on a bad learner name before spawning work.
  {
    const Adversary probe = factories.front()(0);
    make_learner(config.learner, graph, profile, game_horizon(config.adversary, config.horizons.front()),
                 probe.memory(), probe.max_loss(), 0);
  }

  SweepResult result;
  result.rows.resize(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      try {
        const std::size_t t = config.horizons[cells[c].horizon];
        const std::uint64_t seed = derive_seed(config.master_seed, t, cells[c].index);
        const RunSummary run = run_seeded(graph, profile, config.learner, factories[cells[c].horizon],
                                          game_horizon(config.adversary, t), seed);
        result.rows[c] = {t, seed, run.policy_regret, run.switches, run.best_fixed};
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.workers, 1, cells.size());
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.summary = summarize(result.rows);
  result.fit = fit_summary(result.summary, &result.notices);

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    const fs::path dir(config.out_dir);
    auto open = [&](const char* name) {
      std::ofstream f(dir / name, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + (dir / name).string());
      return f;
    };
    {
      auto f = open("results.csv");
      write_results_csv(f, result.rows);
    }
    {
      auto f = open("summary.csv");
      write_summary_csv(f, result.summary);
    }
    {
      auto f = open("fit.csv");
      f << "slope,intercept,slope_stderr,n_points\n";
      if (result.fit) {
        f << format_double(result.fit->slope) << ',' << format_double(result.fit->intercept) << ','
          << format_double(result.fit->slope_stderr) << ',' << result.fit->points.size() << '\n';
      }
    }
    {
      auto f = open("regret.dat");
      f << "# T mean_policy_regret\n";
      for (const auto& s : result.summary) f << s.horizon << ' ' << format_double(s.mean) << '\n';
    }
    {
      auto f = open("regret.svg");
      f << render_svg(result.summary, config.learner.name + " vs " + config.adversary.kind);
    }
  }
  return result;
}

}  // namespace graphfb
