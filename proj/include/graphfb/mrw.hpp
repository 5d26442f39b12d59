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
#include <iosfwd>
#include <vector>

namespace graphfb {

// Two-expert loss sequence driven by a multi-scale random walk. All vectors
// are indexed by round t - 1 for t = 1..T.
struct MrwSequence {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double sigma = 0.0;
  int sign = 1;                      // Z in {-1, +1}
  std::vector<double> walk;          // W_t
  std::vector<double> unclipped[2];  // L'_t(x_1), L'_t(x_2)
  std::vector<double> clipped[2];    // L_t(x_i) = clip(L'_t(x_i))
};

// epsilon = 2^{1/3} T^{-1/3} / (9 log2 T) and sigma = 1 / (9 log2 T).
double mrw_epsilon(std::size_t horizon);
double mrw_sigma(std::size_t horizon);

// delta(t) = largest i with 2^i | t; rho(t) = t - 2^delta(t). Defined for t >= 1.
std::size_t mrw_delta(std::size_t t);
std::size_t mrw_parent(std::size_t t);

inline double clip_unit(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Draw order: Z from the kMrwSign stream (counter 0, negative iff u < 1/2),
// xi_t = sigma * normal(t - 1) from the kMrwNoise stream. W_0 = 0 and
// W_t = W_{rho(t)} + xi_t. Throws ParameterError for T < 2.
MrwSequence generate_mrw(std::size_t horizon, std::uint64_t seed);

struct MrwTreeStats {
  std::vector<std::size_t> parent;  // parent[t] = rho(t); parent[0] unused (0)
  std::size_t width = 0;            // max_t |cut(t)|
  std::size_t depth = 0;            // max_t |rho*(t)|
};

MrwTreeStats mrw_tree_stats(std::size_t horizon);

// "# T=..,seed=..,epsilon=..,sigma=..,Z=.." then "t,W,Lp1,Lp2,L1,L2" rows.
void write_mrw_csv(std::ostream& out, const MrwSequence& seq);

}  // namespace graphfb
