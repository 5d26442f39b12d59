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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace graphfb {

using Node = std::size_t;
using NodeSet = std::vector<Node>;  // sorted, unique
using Edge = std::pair<Node, Node>;

enum class Direction { kIn, kOut };

// Directed feedback graph over actions 0..K-1. Playing u reveals the loss of
// every v with (u, v) an edge. Immutable after construction.
class FeedbackGraph {
 public:
  // Duplicate edges are collapsed. Throws RangeError on an endpoint >= K and
  // ParameterError when K == 0.
  FeedbackGraph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(Node u, Node v) const;
  bool has_self_loop(Node v) const { return has_edge(v, v); }

  const NodeSet& in_neighbors(Node v) const;
  const NodeSet& out_neighbors(Node v) const;
  const NodeSet& neighbors(Node v, Direction direction) const;

  friend bool operator==(const FeedbackGraph& a, const FeedbackGraph& b) {
    return a.num_nodes_ == b.num_nodes_ && a.edges_ == b.edges_;
  }

 private:
  void check_node(Node v) const;

  std::size_t num_nodes_;
  std::vector<Edge> edges_;  // sorted
  std::vector<std::uint8_t> adjacency_;
  std::vector<NodeSet> in_;
  std::vector<NodeSet> out_;
};

enum class Observability { kNotObservable, kStronglyObservable, kWeaklyObservable };

std::string to_string(Observability o);

struct Classification {
  Observability graph_class;
  std::vector<Observability> node_classes;
};

// Node- and graph-level observability trichotomy.
Classification classify_graph(const FeedbackGraph& g);

inline constexpr std::size_t kDefaultExactLimit = 20;

// Exact independence number of the underlying undirected simple graph (an
// edge in either direction connects two distinct nodes; self-loops ignored).
// Throws CapabilityError when K exceeds `limit`.
std::size_t independence_number(const FeedbackGraph& g,
                                std::size_t limit = kDefaultExactLimit);

struct WeakDomination {
  NodeSet dominating_set;
  std::size_t delta = 0;
};

// Minimum set D such that each weakly-observable node has an in-neighbor in
// D. Among minimum sets the lexicographically first one found by the search is
// returned. DomainError for unobservable graphs.
WeakDomination min_weak_dominating_set(const FeedbackGraph& g,
                                       std::size_t limit = kDefaultExactLimit);

// Every pair (u, v), u == v included, has a common in-neighbor. Requires a
// strongly-observable graph.
bool is_revealing(const FeedbackGraph& g);

// First pair (u < v) in lexicographic order that is independent and has
// disjoint in-neighborhoods. Requires a strongly-observable graph.
std::optional<std::pair<Node, Node>> find_independent_disjoint_pair(
    const FeedbackGraph& g);

// For each node v outside `v1`, the lowest-index w in v1 such that every
// b in v1 with (v, b) in E also has (w, b) in E. nullopt if some v has no
// such w. The subgraph edge set is the induced one.
std::optional<std::map<Node, Node>> preserves_observability(const FeedbackGraph& g,
                                                            const NodeSet& v1);

// Induced subgraph on `nodes` (sorted), relabelled 0..|nodes|-1.
FeedbackGraph induced_subgraph(const FeedbackGraph& g, const NodeSet& nodes);

enum class GraphKind { kFullInfo, kBandit, kAppleTasting, kRevealingAction, kLooplessClique };

GraphKind parse_graph_kind(const std::string& name);
std::string to_string(GraphKind kind);

// Canonical graphs. Revealing action: node 0 sees everything, others nothing.
// Apple tasting: K must be 2; node 0 sees both, node 1 sees nothing.
FeedbackGraph standard_graph(GraphKind kind, std::size_t num_nodes);

// Directed Erdos-Renyi sample; each ordered pair (self-loops included) is an
// edge with probability p, drawn in row-major order from the kRandomGraph
// stream.
FeedbackGraph random_graph(std::size_t num_nodes, double p, std::uint64_t seed);

struct GraphProfile {
  Observability graph_class = Observability::kNotObservable;
  std::size_t alpha = 0;
  std::size_t delta = 0;
  NodeSet dominating_set;
  NodeSet weakly_observable_nodes;
  bool revealing = false;
};

// Everything the learners need to pick parameters. alpha/delta are only
// computed for observable graphs.
GraphProfile profile_graph(const FeedbackGraph& g, std::size_t limit = kDefaultExactLimit);

// Text format: "K <n>" header, "E <u> <v>" per edge, '#' comments.
FeedbackGraph parse_graph(std::istream& in);
FeedbackGraph load_graph(const std::string& path);
void write_graph(std::ostream& out, const FeedbackGraph& g);

// "kind:K" (e.g. "full_info:3") or a path to a graph file.
FeedbackGraph graph_from_spec(const std::string& spec);

}  // namespace graphfb
