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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "diskgraph/algorithms/echo.hpp"
#include "diskgraph/algorithms/hashmin.hpp"
#include "diskgraph/algorithms/pagerank.hpp"
#include "diskgraph/algorithms/sssp.hpp"
#include "diskgraph/oracle/oracle.hpp"
#include "testutil.hpp"

using namespace dg;

namespace {

template <class P>
Oracle<P> oracle_from(const dgtest::TestGraph& g, P program) {
  Oracle<P> oracle(std::move(program));
  for (const auto& [id, lst] : g.adj) {
    std::vector<EdgeOf<P>> edges(lst.size());
    for (std::size_t i = 0; i < lst.size(); ++i) {
      edges[i].neighbor = lst[i].first;
      if constexpr (!std::is_same_v<typename P::Weight, Empty>)
        edges[i].weight = lst[i].second;
    }
    oracle.add_vertex(id, std::move(edges));
  }
  return oracle;
}

}  // namespace

TEST_CASE("pagerank on a 3-cycle settles at exactly 1/3 each") {
  dgtest::TestGraph g;
  g.adj[0] = {{1, 1.0}};
  g.adj[1] = {{2, 1.0}};
  g.adj[2] = {{0, 1.0}};
  PageRank<Empty> p;
  p.rounds = 10;
  auto result = oracle_from(g, p).run();
  CHECK(result.steps == 10);
  for (const auto& [id, v] : result.values)
    CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("pagerank on a mutual 2-cycle is the 0.5 fixed point") {
  dgtest::TestGraph g;
  g.adj[1] = {{2, 1.0}};
  g.adj[2] = {{1, 1.0}};
  PageRank<Empty> p;
  p.rounds = 10;
  auto result = oracle_from(g, p).run();
  for (const auto& [id, v] : result.values)
    CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oracle pagerank equals independent power iteration") {
  auto g = dgtest::gen_digraph(60, 4.0, 12345);
  PageRank<Empty> p;
  p.rounds = 10;
  auto engine = oracle_from(g, p).run();
  auto power = dgtest::pagerank_power(g, 10);
  for (const auto& [id, v] : engine.values)
    CHECK(v == doctest::Approx(power[id]).epsilon(1e-12));
}

TEST_CASE("hashmin labels a path with its minimum id") {
  dgtest::TestGraph g;
  g.directed = false;
  g.adj[3] = {{1, 1.0}};
  g.adj[1] = {{3, 1.0}, {2, 1.0}};
  g.adj[2] = {{1, 1.0}};
  auto result = oracle_from(g, HashMin<Empty>{}).run();
  for (const auto& [id, v] : result.values) CHECK(v == 1);
}

TEST_CASE("oracle hashmin equals union-find on random graphs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto g = dgtest::gen_undirected(200, 2.5, seed);
    auto result = oracle_from(g, HashMin<Empty>{}).run();
    auto uf = dgtest::components_union_find(g);
    for (const auto& [id, v] : result.values) CHECK(v == uf[id]);
  }
}

TEST_CASE("isolated vertex keeps its own label and halts in one step") {
  dgtest::TestGraph g;
  g.directed = false;
  g.adj[42] = {};
  auto result = oracle_from(g, HashMin<Empty>{}).run();
  CHECK(result.values[42] == 42);
  CHECK(result.steps == 1);
}

TEST_CASE("unit-weight sssp is breadth-first search") {
  auto g = dgtest::gen_digraph(120, 3.0, 777);
  VertexId source = g.adj.begin()->first;
  Sssp<Empty> p;
  p.source = source;
  auto result = oracle_from(g, p).run();
  auto levels = dgtest::bfs_levels(g, source);
  for (const auto& [id, v] : result.values) CHECK(v == levels[id]);
}

TEST_CASE("bfs on an L-path terminates after exactly L+1 compute steps") {
  const std::uint64_t L = 9;
  dgtest::TestGraph g;
  for (std::uint64_t i = 0; i < L; ++i) g.adj[i] = {{i + 1, 1.0}};
  g.adj[L] = {};
  Sssp<Empty> p;
  p.source = 0;
  auto result = oracle_from(g, p).run();
  CHECK(result.steps == L + 1);
  CHECK(result.values[L] == double(L));
}

TEST_CASE("weighted sssp equals dijkstra exactly on integer weights") {
  auto g = dgtest::gen_digraph(150, 4.0, 31337, /*weighted=*/true);
  VertexId source = g.adj.begin()->first;
  Sssp<double> p;
  p.source = source;
  auto result = oracle_from(g, p).run();
  auto dij = dgtest::dijkstra(g, source);
  for (const auto& [id, v] : result.values) CHECK(v == dij[id]);
}

TEST_CASE("unreachable vertices stay at infinity") {
  dgtest::TestGraph g;
  g.adj[0] = {{1, 1.0}};
  g.adj[1] = {};
  g.adj[9] = {};  // disconnected
  Sssp<Empty> p;
  p.source = 0;
  auto result = oracle_from(g, p).run();
  CHECK(result.values[9] == std::numeric_limits<double>::infinity());
  CHECK(Sssp<Empty>::format_value(result.values[9]) == "inf");
}

TEST_CASE("step limit flags a partial result") {
  dgtest::TestGraph g;
  g.adj[0] = {{1, 1.0}};
  g.adj[1] = {{0, 1.0}};
  PageRank<Empty> p;
  p.rounds = 50;
  auto result = oracle_from(g, p).run(/*max_steps=*/5);
  CHECK(result.step_limit_hit);
}

TEST_CASE("echo star: the center digests every leaf id") {
  dgtest::TestGraph g;
  g.directed = false;
  std::vector<std::uint64_t> leaves{2, 3, 4, 5};
  for (auto l : leaves) {
    g.adj[1].push_back({l, 1.0});
    g.adj[l] = {{1, 1.0}};
  }
  Echo<Empty> p;
  p.rounds = 1;
  auto result = oracle_from(g, p).run();
  CHECK(result.values[1] == Echo<Empty>::digest({2, 3, 4, 5}));
  // every leaf holds the digest of {center}
  for (auto l : leaves) CHECK(result.values[l] == Echo<Empty>::digest({1}));
}

TEST_CASE("echo ring of five: everyone hears both neighbors") {
  dgtest::TestGraph g;
  g.directed = false;
  for (std::uint64_t i = 0; i < 5; ++i) {
    g.adj[i].push_back({(i + 1) % 5, 1.0});
    g.adj[(i + 1) % 5].push_back({i, 1.0});
  }
  Echo<Empty> p;
  p.rounds = 1;
  auto result = oracle_from(g, p).run();
  for (std::uint64_t i = 0; i < 5; ++i)
    CHECK(result.values[i] ==
          Echo<Empty>::digest({(i + 4) % 5, (i + 1) % 5}));
}

namespace {

struct AggProbe {
  using Value = std::uint64_t;
  using Weight = Empty;
  using Message = std::uint64_t;
  static constexpr bool kHasCombiner = false;
  std::vector<double>* seen = nullptr;
  void compute(VertexRef<AggProbe>& v, std::span<const EdgeOf<AggProbe>>,
               std::span<const Message>, SuperstepContext<AggProbe>& ctx) {
    if (v.id() == 0) seen->push_back(ctx.aggregated);
    ctx.aggregate(double(v.id()) + double(ctx.superstep));
    if (ctx.superstep >= 3) v.vote_to_halt();
  }
  static std::string format_value(const Value& v) { return std::to_string(v); }
};

}  // namespace

TEST_CASE("aggregated value seen in step i+1 merges step-i contributions") {
  std::vector<double> seen;
  AggProbe p;
  p.seen = &seen;
  Oracle<AggProbe> oracle(p);
  oracle.add_vertex(0, std::vector<VertexId>{});
  oracle.add_vertex(1, std::vector<VertexId>{});
  oracle.run();
  REQUIRE(seen.size() == 3);
  CHECK(seen[0] == 0.0);              // nothing aggregated before step 1
  CHECK(seen[1] == (0 + 1) + (1 + 1));  // contributions of step 1
  CHECK(seen[2] == (0 + 2) + (1 + 2));
}
