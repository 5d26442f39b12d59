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


// Loader for the hand-labeled graph catalog in tests/fixtures.

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphfb/graph.hpp"

namespace fixtures {

struct Entry {
  std::string file;
  graphfb::Observability graph_class;
  std::size_t alpha = 0;
  std::size_t delta = 0;
  graphfb::NodeSet dominating;
  std::optional<bool> revealing;
  std::optional<std::pair<graphfb::Node, graphfb::Node>> pair;
  std::map<graphfb::Node, graphfb::Node> observing;
};

inline std::string path(const std::string& name) { return std::string(GRAPHFB_FIXTURE_DIR) + "/" + name; }

inline std::vector<std::size_t> numbers(const std::string& text, char sep) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(std::stoul(item));
  return out;
}

inline std::vector<Entry> catalog() {
  std::ifstream in(path("catalog.tsv"));
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string cls, alpha, delta, dom, rev, pair, obs;
    Entry e;
    std::getline(row, e.file, '\t');
    std::getline(row, cls, '\t');
    std::getline(row, alpha, '\t');
    std::getline(row, delta, '\t');
    std::getline(row, dom, '\t');
    std::getline(row, rev, '\t');
    std::getline(row, pair, '\t');
    std::getline(row, obs, '\t');
    e.graph_class = cls == "strong" ? graphfb::Observability::kStronglyObservable
                                    : graphfb::Observability::kWeaklyObservable;
    e.alpha = std::stoul(alpha);
    e.delta = std::stoul(delta);
    if (dom != "-") e.dominating = numbers(dom, ',');
    if (rev != "-") e.revealing = rev == "1";
    if (pair != "-") {
      const auto p = numbers(pair, ',');
      e.pair = std::make_pair(p[0], p[1]);
    }
    if (obs != "-") {
      std::stringstream items(obs);
      std::string item;
      while (std::getline(items, item, ';')) {
        const auto kv = numbers(item, ':');
        e.observing[kv[0]] = kv[1];
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<std::string> pair_graphs() {
  std::vector<std::string> out;
  for (char c = 'a'; c <= 'h'; ++c) out.push_back(std::string("pair_") + c + ".graph");
  return out;
}

}  // namespace fixtures
