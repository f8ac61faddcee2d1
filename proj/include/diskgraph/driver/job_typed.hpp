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

#ifndef DISKGRAPH_DRIVER_JOB_TYPED_HPP
#define DISKGRAPH_DRIVER_JOB_TYPED_HPP

#include <exception>
#include <functional>
#include <memory>
#include <thread>
#include <vector>

#include "diskgraph/algorithms/echo.hpp"
#include "diskgraph/algorithms/hashmin.hpp"
#include "diskgraph/algorithms/pagerank.hpp"
#include "diskgraph/algorithms/sssp.hpp"
#include "diskgraph/comm/sim_transport.hpp"
#include "diskgraph/engine/recode_program.hpp"
#include "diskgraph/engine/worker.hpp"
#include "diskgraph/oracle/oracle.hpp"

namespace dg {

// Instantiates `fn` with the program selected by cfg.algorithm and the
// store's weightedness. fn(program) -> R.
template <class F>
auto with_program(const JobConfig& cfg, const GraphManifest& man, F&& fn) {
  auto pick = [&](auto weight_tag) {
    using W = decltype(weight_tag);
    if (cfg.algorithm == "pagerank") {
      PageRank<W> p;
      p.rounds = cfg.steps;
      return fn(p);
    }
    if (cfg.algorithm == "hashmin") {
      if (man.directed)
        throw ConfigError("hashmin requires an undirected graph");
      return fn(HashMin<W>{});
    }
    if (cfg.algorithm == "sssp") {
      Sssp<W> p;
      p.source = cfg.source;
      return fn(p);
    }
    if (cfg.algorithm == "echo") {
      Echo<W> p;
      p.rounds = cfg.steps;
      return fn(p);
    }
    if (cfg.algorithm == "recode") {
      RecodeProgram<W> p;
      p.directed = man.directed;
      p.buffer_bytes = cfg.stream_buffer_b;
      return fn(std::move(p));
    }
    throw ConfigError("unknown algorithm: " + cfg.algorithm);
  };
  if (man.weighted) return pick(double{});
  return pick(Empty{});
}

template <class P>
typename Worker<P>::Options worker_options(const JobConfig& cfg,
                                           const GraphManifest& man) {
  typename Worker<P>::Options opts;
  opts.weighted = man.weighted;
  if (cfg.mode == RunMode::kRecoded && man.recoded) {
    if (man.recode_workers != cfg.num_workers)
      throw ConfigError("recoded artifacts were built for " +
                        std::to_string(man.recode_workers) +
                        " workers, not " + std::to_string(cfg.num_workers));
    opts.load_from_artifacts = true;
  }
  return opts;
}

// One job over the simulated transport: n worker threads in-process.
// `tweak(rank, worker)` lets tests attach probes before the run starts.
template <class P>
JobStats run_sim_typed(
    const JobConfig& cfg, const GraphManifest& man, P program,
    const std::function<void(int, Worker<P>&)>& tweak = {}) {
  auto t0 = std::chrono::steady_clock::now();
  SimNetwork net(cfg.num_workers, cfg.seed, cfg.sim_delay_us,
                 cfg.channel_capacity);
  std::vector<std::unique_ptr<Worker<P>>> workers;
  for (int r = 0; r < cfg.num_workers; ++r) {
    workers.push_back(std::make_unique<Worker<P>>(
        cfg, r, net.endpoint(r), program, worker_options<P>(cfg, man)));
    if (tweak) tweak(r, *workers.back());
  }

  std::vector<std::exception_ptr> errors(cfg.num_workers);
  std::vector<std::thread> threads;
  for (int r = 0; r < cfg.num_workers; ++r) {
    threads.emplace_back([&, r] {
      try {
        workers[r]->run();
      } catch (...) {
        errors[r] = std::current_exception();
        net.shutdown_all();
      }
    });
  }
  for (auto& t : threads) t.join();

  // Prefer the root cause over collateral "transport closed" failures.
  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const std::exception& ex) {
      bool collateral = std::string(ex.what()).find("transport closed") !=
                        std::string::npos;
      if (!first || !collateral) {
        first = e;
        if (!collateral) break;
      }
    }
  }
  if (first) std::rethrow_exception(first);

  JobStats stats;
  for (auto& w : workers) stats.workers.push_back(w->stats());
  stats.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  if (!cfg.output_path.empty())
    stats.write_json_file(cfg.output_path + "/stats.json");
  return stats;
}

// In-memory reference run loaded straight from the store's text file.
template <class P>
JobStats run_oracle_typed(const JobConfig& cfg, const GraphManifest& man,
                          P program) {
  std::ifstream in(store_graph_path(cfg.store_path));
  if (!in) throw IoError("cannot open " + store_graph_path(cfg.store_path));
  Oracle<P> oracle(std::move(program));
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ParsedVertex pv = parse_vertex_line(line, man.weighted, lineno);
    std::vector<EdgeOf<P>> edges(pv.adj.size());
    for (std::size_t i = 0; i < pv.adj.size(); ++i) {
      edges[i].neighbor = pv.adj[i].first;
      if constexpr (!std::is_same_v<typename P::Weight, Empty>)
        edges[i].weight = static_cast<typename P::Weight>(pv.adj[i].second);
    }
    oracle.add_vertex(pv.id, std::move(edges));
  }
  auto result = oracle.run(cfg.max_steps);
  if (result.step_limit_hit)
    throw Error("oracle hit the step limit; partial result discarded");

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_path);
  std::ofstream out(cfg.output_path + "/part-0", std::ios::trunc);
  for (const auto& [id, value] : result.values)
    out << id << '\t' << P::format_value(value) << '\n';

  JobStats stats;
  WorkerStats w;
  w.rank = 0;
  w.owned_vertices = result.values.size();
  w.total_vertices = result.values.size();
  w.step(result.steps);
  stats.workers.push_back(std::move(w));
  return stats;
}

}  // namespace dg

#endif
