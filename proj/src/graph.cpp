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

#include "graphfb/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "graphfb/errors.hpp"
#include "graphfb/rng.hpp"

namespace graphfb {

namespace {

using Mask = std::uint32_t;

void check_limit(const FeedbackGraph& g, std::size_t limit) {
  if (g.num_nodes() > limit || g.num_nodes() > 32) {
    throw CapabilityError("exact search limited to " + std::to_string(std::min<std::size_t>(limit, 32)) +
                          " nodes, graph has " + std::to_string(g.num_nodes()));
  }
}

Mask to_mask(const NodeSet& nodes) {
  Mask m = 0;
  for (Node v : nodes) m |= Mask{1} << v;
  return m;
}

NodeSet from_mask(Mask m) {
  NodeSet out;
  while (m) {
    out.push_back(static_cast<Node>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

void require_strongly_observable(const FeedbackGraph& g, const char* op) {
  if (classify_graph(g).graph_class != Observability::kStronglyObservable) {
    throw DomainError(std::string(op) + " requires a strongly-observable graph");
  }
}

}  // namespace

FeedbackGraph::FeedbackGraph(std::size_t num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  if (num_nodes_ == 0) throw ParameterError("feedback graph needs at least one node");
  for (const auto& [u, v] : edges_) {
    if (u >= num_nodes_ || v >= num_nodes_) {
      throw RangeError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") out of range for K=" + std::to_string(num_nodes_));
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adjacency_.assign(num_nodes_ * num_nodes_, 0);
  in_.resize(num_nodes_);
  out_.resize(num_nodes_);
  for (const auto& [u, v] : edges_) {
    adjacency_[u * num_nodes_ + v] = 1;
    out_[u].push_back(v);
    in_[v].push_back(u);
  }
  for (auto& s : in_) std::sort(s.begin(), s.end());
}

void FeedbackGraph::check_node(Node v) const {
  if (v >= num_nodes_) {
    throw RangeError("node " + std::to_string(v) + " out of range for K=" +
                     std::to_string(num_nodes_));
  }
}

bool FeedbackGraph::has_edge(Node u, Node v) const {
  check_node(u);
  check_node(v);
  return adjacency_[u * num_nodes_ + v] != 0;
}

const NodeSet& FeedbackGraph::in_neighbors(Node v) const {
  check_node(v);
  return in_[v];
}

const NodeSet& FeedbackGraph::out_neighbors(Node v) const {
  check_node(v);
  return out_[v];
}

const NodeSet& FeedbackGraph::neighbors(Node v, Direction direction) const {
  return direction == Direction::kIn ? in_neighbors(v) : out_neighbors(v);
}

std::string to_string(Observability o) {
  switch (o) {
    case Observability::kNotObservable: return "not_observable";
    case Observability::kStronglyObservable: return "strongly_observable";
    case Observability::kWeaklyObservable: return "weakly_observable";
  }
  return "?";
}

Classification classify_graph(const FeedbackGraph& g) {
  const std::size_t k = g.num_nodes();
  Classification c;
  c.node_classes.reserve(k);
  bool all_observable = true;
  bool all_strong = true;
  for (Node v = 0; v < k; ++v) {
    const NodeSet& in = g.in_neighbors(v);
    Observability cls;
    if (in.empty()) {
      cls = Observability::kNotObservable;
    } else if (g.has_self_loop(v)) {
      cls = Observability::kStronglyObservable;
    } else {
      // No self-loop, so in-neighbors are all distinct from v.
      cls = in.size() == k - 1 ? Observability::kStronglyObservable
                               : Observability::kWeaklyObservable;
    }
    all_observable = all_observable && cls != Observability::kNotObservable;
    all_strong = all_strong && cls == Observability::kStronglyObservable;
    c.node_classes.push_back(cls);
  }
  if (!all_observable) {
    c.graph_class = Observability::kNotObservable;
  } else {
    c.graph_class = all_strong ? Observability::kStronglyObservable
                               : Observability::kWeaklyObservable;
  }
  return c;
}

std::size_t independence_number(const FeedbackGraph& g, std::size_t limit) {
  check_limit(g, limit);
  const std::size_t k = g.num_nodes();
  std::vector<Mask> adj(k, 0);
  for (const auto& [u, v] : g.edges()) {
    if (u == v) continue;
    adj[u] |= Mask{1} << v;
    adj[v] |= Mask{1} << u;
  }

  std::size_t best = 0;
  // Branch on the lowest candidate: take it (dropping its neighbors) or skip
  // it. A candidate with no neighbors among the candidates is always taken.
  std::function<void(Mask, std::size_t)> search = [&](Mask candidates, std::size_t size) {
    if (candidates == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + static_cast<std::size_t>(std::popcount(candidates)) <= best) return;
    const Node v = static_cast<Node>(std::countr_zero(candidates));
    const Mask rest = candidates & ~(Mask{1} << v);
    search(rest & ~adj[v], size + 1);
    if (adj[v] & rest) search(rest, size);
  };
  const Mask all = k == 32 ? ~Mask{0} : (Mask{1} << k) - 1;
  search(all, 0);
  return best;
}

WeakDomination min_weak_dominating_set(const FeedbackGraph& g, std::size_t limit) {
  const Classification c = classify_graph(g);
  if (c.graph_class == Observability::kNotObservable) {
    throw DomainError("weak domination is undefined for an unobservable graph");
  }
  check_limit(g, limit);
  const std::size_t k = g.num_nodes();

  Mask weak = 0;
  for (Node v = 0; v < k; ++v) {
    if (c.node_classes[v] == Observability::kWeaklyObservable) weak |= Mask{1} << v;
  }
  if (weak == 0) return {};

  std::vector<Mask> covers(k, 0);
  for (Node d = 0; d < k; ++d) covers[d] = to_mask(g.out_neighbors(d)) & weak;

  // Iterative deepening; each level branches over the in-neighbors of the
  // lowest uncovered weak node, so the first hit is a minimum set.
  Mask chosen = 0;
  std::function<bool(Mask, std::size_t)> search = [&](Mask uncovered, std::size_t budget) {
    if (uncovered == 0) return true;
    if (budget == 0) return false;
    const Node u = static_cast<Node>(std::countr_zero(uncovered));
    for (Node d : g.in_neighbors(u)) {
      if (chosen & (Mask{1} << d)) continue;
      chosen |= Mask{1} << d;
      if (search(uncovered & ~covers[d], budget - 1)) return true;
      chosen &= ~(Mask{1} << d);
    }
    return false;
  };
  for (std::size_t size = 1; size <= k; ++size) {
    chosen = 0;
    if (search(weak, size)) {
      WeakDomination result;
      result.dominating_set = from_mask(chosen);
      result.delta = result.dominating_set.size();
      return result;
    }
  }
  throw InvariantError("no weakly dominating set found for an observable graph");
}

namespace {

bool share_in_neighbor(const FeedbackGraph& g, Node u, Node v) {
  const NodeSet& a = g.in_neighbors(u);
  const NodeSet& b = g.in_neighbors(v);
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

}  // namespace

bool is_revealing(const FeedbackGraph& g) {
  require_strongly_observable(g, "is_revealing");
  const std::size_t k = g.num_nodes();
  for (Node u = 0; u < k; ++u) {
    for (Node v = u; v < k; ++v) {
      if (!share_in_neighbor(g, u, v)) return false;
    }
  }
  return true;
}

std::optional<std::pair<Node, Node>> find_independent_disjoint_pair(const FeedbackGraph& g) {
  require_strongly_observable(g, "find_independent_disjoint_pair");
  const std::size_t k = g.num_nodes();
  for (Node u = 0; u < k; ++u) {
    for (Node v = u + 1; v < k; ++v) {
      if (g.has_edge(u, v) || g.has_edge(v, u)) continue;
      if (!share_in_neighbor(g, u, v)) return std::make_pair(u, v);
    }
  }
  return std::nullopt;
}

std::optional<std::map<Node, Node>> preserves_observability(const FeedbackGraph& g,
                                                            const NodeSet& v1) {
  if (v1.empty()) throw ParameterError("observability-preserving check needs a nonempty v1");
  const std::size_t k = g.num_nodes();
  std::vector<char> inside(k, 0);
  for (Node v : v1) {
    if (v >= k) throw RangeError("v1 node " + std::to_string(v) + " out of range");
    inside[v] = 1;
  }
  std::map<Node, Node> observing;
  for (Node v = 0; v < k; ++v) {
    if (inside[v]) continue;
    std::optional<Node> witness;
    for (Node w = 0; w < k && !witness; ++w) {
      if (!inside[w]) continue;
      bool ok = true;
      for (Node b : g.out_neighbors(v)) {
        if (inside[b] && !g.has_edge(w, b)) {
          ok = false;
          break;
        }
      }
      if (ok) witness = w;
    }
    if (!witness) return std::nullopt;
    observing.emplace(v, *witness);
  }
  return observing;
}

FeedbackGraph induced_subgraph(const FeedbackGraph& g, const NodeSet& nodes) {
  std::vector<std::size_t> local(g.num_nodes(), g.num_nodes());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.num_nodes()) throw RangeError("subgraph node out of range");
    local[nodes[i]] = i;
  }
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edges()) {
    if (local[u] < nodes.size() && local[v] < nodes.size()) edges.emplace_back(local[u], local[v]);
  }
  return FeedbackGraph(nodes.size(), std::move(edges));
}

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "full_info") return GraphKind::kFullInfo;
  if (name == "bandit") return GraphKind::kBandit;
  if (name == "apple_tasting") return GraphKind::kAppleTasting;
  if (name == "revealing_action") return GraphKind::kRevealingAction;
  if (name == "loopless_clique") return GraphKind::kLooplessClique;
  throw ConfigError("unknown graph kind '" + name + "'");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kFullInfo: return "full_info";
    case GraphKind::kBandit: return "bandit";
    case GraphKind::kAppleTasting: return "apple_tasting";
    case GraphKind::kRevealingAction: return "revealing_action";
    case GraphKind::kLooplessClique: return "loopless_clique";
  }
  return "?";
}

FeedbackGraph standard_graph(GraphKind kind, std::size_t num_nodes) {
  if (num_nodes == 0) throw ParameterError("standard graph needs K >= 1");
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::kFullInfo:
      for (Node u = 0; u < num_nodes; ++u)
        for (Node v = 0; v < num_nodes; ++v) edges.emplace_back(u, v);
      break;
    case GraphKind::kBandit:
      for (Node v = 0; v < num_nodes; ++v) edges.emplace_back(v, v);
      break;
    case GraphKind::kAppleTasting:
      if (num_nodes != 2) throw ParameterError("apple tasting graph requires K = 2");
      edges = {{0, 0}, {0, 1}};
      break;
    case GraphKind::kRevealingAction:
      for (Node v = 0; v < num_nodes; ++v) edges.emplace_back(0, v);
      break;
    case GraphKind::kLooplessClique:
      for (Node u = 0; u < num_nodes; ++u)
        for (Node v = 0; v < num_nodes; ++v)
          if (u != v) edges.emplace_back(u, v);
      break;
  }
  return FeedbackGraph(num_nodes, std::move(edges));
}

FeedbackGraph random_graph(std::size_t num_nodes, double p, std::uint64_t seed) {
  RngStream rng(seed, streams::kRandomGraph);
  std::vector<Edge> edges;
  for (Node u = 0; u < num_nodes; ++u)
    for (Node v = 0; v < num_nodes; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  return FeedbackGraph(num_nodes, std::move(edges));
}

GraphProfile profile_graph(const FeedbackGraph& g, std::size_t limit) {
  const Classification c = classify_graph(g);
  GraphProfile p;
  p.graph_class = c.graph_class;
  for (Node v = 0; v < g.num_nodes(); ++v) {
    if (c.node_classes[v] == Observability::kWeaklyObservable) p.weakly_observable_nodes.push_back(v);
  }
  if (c.graph_class == Observability::kNotObservable) return p;
  p.alpha = independence_number(g, limit);
  const WeakDomination d = min_weak_dominating_set(g, limit);
  p.dominating_set = d.dominating_set;
  p.delta = d.delta;
  if (c.graph_class == Observability::kStronglyObservable) p.revealing = is_revealing(g);
  return p;
}

FeedbackGraph parse_graph(std::istream& in) {
  std::optional<std::size_t> k;
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("graph file line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string tag;
    if (!(line >> tag)) continue;
    if (tag == "K") {
      long long n = 0;
      if (k) fail("duplicate K header");
      if (!(line >> n) || n <= 0) fail("expected positive integer after K");
      k = static_cast<std::size_t>(n);
    } else if (tag == "E") {
      if (!k) fail("edge before K header");
      long long u = -1;
      long long v = -1;
      if (!(line >> u >> v)) fail("expected two node indices after E");
      if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= *k ||
          static_cast<std::size_t>(v) >= *k) {
        fail("edge endpoint out of range [0, " + std::to_string(*k) + ")");
      }
      edges.emplace_back(static_cast<Node>(u), static_cast<Node>(v));
    } else {
      fail("unknown record '" + tag + "'");
    }
    std::string extra;
    if (line >> extra) fail("trailing token '" + extra + "'");
  }
  if (!k) throw ConfigError("graph file has no K header");
  return FeedbackGraph(*k, std::move(edges));
}

FeedbackGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file '" + path + "'");
  return parse_graph(in);
}

void write_graph(std::ostream& out, const FeedbackGraph& g) {
  out << "K " << g.num_nodes() << '\n';
  for (const auto& [u, v] : g.edges()) out << "E " << u << ' ' << v << '\n';
}

FeedbackGraph graph_from_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    const std::string count = spec.substr(colon + 1);
    bool known = true;
    try {
      parse_graph_kind(kind);
    } catch (const ConfigError&) {
      known = false;
    }
    if (known) {
      std::size_t pos = 0;
      unsigned long n = 0;
      try {
        n = std::stoul(count, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos == 0 || pos != count.size()) throw ConfigError("bad node count in '" + spec + "'");
      return standard_graph(parse_graph_kind(kind), n);
    }
  }
  return load_graph(spec);
}

}  // namespace graphfb
