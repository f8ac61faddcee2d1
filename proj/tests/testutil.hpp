/*
Copyright (c) 2026 The diskgraph authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef DISKGRAPH_TESTS_TESTUTIL_HPP
#define DISKGRAPH_TESTS_TESTUTIL_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <atomic>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "diskgraph/common.hpp"
#include "diskgraph/config.hpp"
#include "diskgraph/graph/format.hpp"

namespace dgtest {

using dg::VertexId;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("diskgraph-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string str() const { return path_.string(); }
  std::string sub(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

// Adjacency-map graph used by the brute-force oracles and generators.
struct TestGraph {
  bool directed = true;
  bool weighted = false;
  // id -> list of (neighbor, weight)
  std::map<VertexId, std::vector<std::pair<VertexId, double>>> adj;

  std::uint64_t num_edges() const {
    std::uint64_t total = 0;
    for (const auto& [id, lst] : adj) total += lst.size();
    return total;
  }

  void write_text(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& [id, lst] : adj) {
      dg::ParsedVertex v;
      v.id = id;
      v.adj = lst;
      out << dg::format_vertex_line(v, weighted) << "\n";
    }
  }

  // Writes the text file and validates it into `store`.
  dg::GraphManifest put(const std::string& store) const {
    std::string tmp = store + ".graph.txt";
    std::filesystem::create_directories(
        std::filesystem::path(tmp).parent_path());
    write_text(tmp);
    return dg::put_graph(tmp, store, directed, weighted);
  }
};

// Sparse random ids (normal mode exercises the mixing hash).
inline std::vector<VertexId> random_ids(std::size_t n, std::uint64_t seed,
                                        bool sparse = true) {
  std::mt19937_64 rng(seed);
  std::set<VertexId> ids;
  while (ids.size() < n) {
    if (sparse)
      ids.insert(rng() % (n * 97 + 13));
    else
      ids.insert(ids.size());
  }
  return std::vector<VertexId>(ids.begin(), ids.end());
}

inline TestGraph gen_digraph(std::size_t n, double avg_deg, std::uint64_t seed,
                             bool weighted = false, bool sparse_ids = true) {
  TestGraph g;
  g.directed = true;
  g.weighted = weighted;
  auto ids = random_ids(n, seed, sparse_ids);
  std::mt19937_64 rng(seed ^ 0x5eed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> weight(1, 9);
  std::poisson_distribution<int> deg(avg_deg);
  for (auto id : ids) {
    auto& lst = g.adj[id];
    int d = deg(rng);
    std::set<VertexId> seen;
    for (int i = 0; i < d; ++i) {
      VertexId nbr = ids[pick(rng)];
      if (nbr == id || !seen.insert(nbr).second) continue;
      lst.emplace_back(nbr, weighted ? double(weight(rng)) : 1.0);
    }
  }
  return g;
}

inline TestGraph gen_undirected(std::size_t n, double avg_deg,
                                std::uint64_t seed, bool weighted = false,
                                bool sparse_ids = true) {
  TestGraph g;
  g.directed = false;
  g.weighted = weighted;
  auto ids = random_ids(n, seed, sparse_ids);
  for (auto id : ids) g.adj[id];
  std::mt19937_64 rng(seed ^ 0xdead);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> weight(1, 9);
  std::size_t edges = static_cast<std::size_t>(n * avg_deg / 2);
  std::set<std::pair<VertexId, VertexId>> seen;
  for (std::size_t i = 0; i < edges; ++i) {
    VertexId a = ids[pick(rng)];
    VertexId b = ids[pick(rng)];
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (!seen.insert({key.first, key.second}).second) continue;
    double w = weighted ? double(weight(rng)) : 1.0;
    g.adj[a].emplace_back(b, w);
    g.adj[b].emplace_back(a, w);
  }
  return g;
}

// ---- independent brute-force oracles --------------------------------------

// Per-step power iteration matching the engine's update rule exactly:
// rank_1 = 1/|V|; rank_i(v) = 0.15/|V| + 0.85 * sum over in-edges (u,v) of
// rank_{i-1}(u)/outdeg(u). No dangling redistribution.
inline std::map<VertexId, double> pagerank_power(const TestGraph& g,
                                                 std::uint64_t steps) {
  std::map<VertexId, double> rank;
  const double nv = static_cast<double>(g.adj.size());
  for (const auto& [id, lst] : g.adj) rank[id] = 1.0 / nv;
  for (std::uint64_t s = 2; s <= steps; ++s) {
    std::map<VertexId, double> incoming;
    for (const auto& [id, lst] : g.adj) incoming[id] = 0.0;
    for (const auto& [u, lst] : g.adj) {
      if (lst.empty()) continue;
      double share = rank[u] / static_cast<double>(lst.size());
      for (const auto& [v, w] : lst) incoming[v] += share;
    }
    for (auto& [id, r] : rank) r = 0.15 / nv + 0.85 * incoming[id];
  }
  return rank;
}

// Union-find; labels are the minimum id of each component.
inline std::map<VertexId, VertexId> components_union_find(const TestGraph& g) {
  std::unordered_map<VertexId, VertexId> parent;
  std::function<VertexId(VertexId)> find = [&](VertexId x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [id, lst] : g.adj) parent.emplace(id, id);
  for (const auto& [id, lst] : g.adj)
    for (const auto& [nbr, w] : lst) {
      VertexId a = find(id), b = find(nbr);
      if (a != b) parent[a] = b;
    }
  std::unordered_map<VertexId, VertexId> min_label;
  for (const auto& [id, lst] : g.adj) {
    VertexId root = find(id);
    auto it = min_label.find(root);
    if (it == min_label.end() || id < it->second) min_label[root] = id;
  }
  std::map<VertexId, VertexId> out;
  for (const auto& [id, lst] : g.adj) out[id] = min_label[find(id)];
  return out;
}

inline std::map<VertexId, double> dijkstra(const TestGraph& g,
                                           VertexId source) {
  std::map<VertexId, double> dist;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& [id, lst] : g.adj) dist[id] = inf;
  if (dist.find(source) == dist.end()) return dist;
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[source] = 0.0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : g.adj.at(u)) {
      if (d + w < dist[v]) {
        dist[v] = d + w;
        pq.push({dist[v], v});
      }
    }
  }
  return dist;
}

inline std::map<VertexId, double> bfs_levels(const TestGraph& g,
                                             VertexId source) {
  std::map<VertexId, double> level;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& [id, lst] : g.adj) level[id] = inf;
  if (level.find(source) == level.end()) return level;
  std::queue<VertexId> q;
  level[source] = 0;
  q.push(source);
  while (!q.empty()) {
    VertexId u = q.front();
    q.pop();
    for (const auto& [v, w] : g.adj.at(u)) {
      if (level[v] == inf) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  return level;
}

// ---- output helpers --------------------------------------------------------

inline std::map<VertexId, std::string> read_parts(const std::string& dir) {
  std::map<VertexId, std::string> values;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("part-", 0) != 0) continue;
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto tab = line.find('\t');
      values[std::stoull(line.substr(0, tab))] = line.substr(tab + 1);
    }
  }
  return values;
}

inline dg::JobConfig small_config(const std::string& store,
                                  const std::string& out, int n,
                                  const std::string& algorithm) {
  dg::JobConfig cfg;
  cfg.num_workers = n;
  cfg.store_path = store;
  cfg.output_path = out;
  cfg.algorithm = algorithm;
  cfg.stream_buffer_b = 1024;  // small buffers so splits/merges happen
  cfg.split_size_B = 4096;
  cfg.merge_fanin_k = 8;
  return cfg;
}

}  // namespace dgtest

#endif
