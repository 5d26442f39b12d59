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

#include "graphfb/mrw.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include "graphfb/errors.hpp"
#include "graphfb/format.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

double mrw_epsilon(std::size_t horizon) {
  const double t = static_cast<double>(horizon);
  return std::cbrt(2.0) * std::pow(t, -1.0 / 3.0) / (9.0 * std::log2(t));
}

double mrw_sigma(std::size_t horizon) {
  return 1.0 / (9.0 * std::log2(static_cast<double>(horizon)));
}

std::size_t mrw_delta(std::size_t t) {
  if (t == 0) throw ParameterError("delta(t) is defined for t >= 1");
  return static_cast<std::size_t>(std::countr_zero(t));
}

std::size_t mrw_parent(std::size_t t) { return t - (std::size_t{1} << mrw_delta(t)); }

MrwSequence generate_mrw(std::size_t horizon, std::uint64_t seed) {
  if (horizon < 2) throw ParameterError("MRW needs T >= 2");
  MrwSequence s;
  s.horizon = horizon;
  s.seed = seed;
  s.epsilon = mrw_epsilon(horizon);
  s.sigma = mrw_sigma(horizon);
  s.sign = CounterRng(seed, streams::kMrwSign).uniform(0) < 0.5 ? -1 : 1;

  const CounterRng noise(seed, streams::kMrwNoise);
  std::vector<double> w(horizon + 1, 0.0);
  for (std::size_t t = 1; t <= horizon; ++t) {
    w[t] = w[mrw_parent(t)] + s.sigma * noise.normal(t - 1);
  }
  s.walk.assign(w.begin() + 1, w.end());
  const double gap = s.sign * s.epsilon;
  for (int i = 0; i < 2; ++i) {
    s.unclipped[i].resize(horizon);
    s.clipped[i].resize(horizon);
  }
  for (std::size_t t = 0; t < horizon; ++t) {
    s.unclipped[0][t] = s.walk[t] + 0.5;
    s.unclipped[1][t] = s.walk[t] + 0.5 + gap;
    for (int i = 0; i < 2; ++i) s.clipped[i][t] = clip_unit(s.unclipped[i][t]);
  }
  return s;
}

MrwTreeStats mrw_tree_stats(std::size_t horizon) {
  MrwTreeStats stats;
  stats.parent.assign(horizon + 1, 0);
  // s is in cut(t) for t in (rho(s), s]; accumulate with a difference array.
  std::vector<long long> diff(horizon + 2, 0);
  std::vector<std::size_t> ancestors(horizon + 1, 0);
  for (std::size_t s = 1; s <= horizon; ++s) {
    const std::size_t p = mrw_parent(s);
    stats.parent[s] = p;
    diff[p + 1] += 1;
    diff[s + 1] -= 1;
    ancestors[s] = ancestors[p] + 1;
    stats.depth = std::max(stats.depth, ancestors[s]);
  }
  long long running = 0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    running += diff[t];
    stats.width = std::max(stats.width, static_cast<std::size_t>(running));
  }
  return stats;
}

void write_mrw_csv(std::ostream& out, const MrwSequence& seq) {
  out << "# T=" << seq.horizon << ",seed=" << seq.seed << ",epsilon=" << format_double(seq.epsilon)
      << ",sigma=" << format_double(seq.sigma) << ",Z=" << seq.sign << '\n';
  out << "t,W,Lp1,Lp2,L1,L2\n";
  for (std::size_t t = 0; t < seq.horizon; ++t) {
    out << t + 1 << ',' << format_double(seq.walk[t]) << ',' << format_double(seq.unclipped[0][t])
        << ',' << format_double(seq.unclipped[1][t]) << ',' << format_double(seq.clipped[0][t])
        << ',' << format_double(seq.clipped[1][t]) << '\n';
  }
}

}  // namespace graphfb
