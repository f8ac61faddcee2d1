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

#include "diskgraph/cli/commands.hpp"

#include <cinttypes>
#include <cstdio>
#include <iostream>

#include "diskgraph/driver/job.hpp"
#include "diskgraph/graph/format.hpp"
#include "diskgraph/stats.hpp"

namespace dg::cli {

namespace {

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

void print_step_summary(const JobStats& stats) {
  std::size_t max_steps = 0;
  for (const auto& w : stats.workers)
    max_steps = std::max(max_steps, w.steps.size());
  std::printf("%-6s %12s %14s %14s %10s %12s\n", "step", "computed",
              "edge-bytes", "msg-bytes", "batches", "busy-ms");
  for (std::size_t s = 1; s < max_steps; ++s) {
    std::uint64_t computed = 0, edge_bytes = 0, msg_bytes = 0, batches = 0;
    std::int64_t busy_ns = 0;
    for (const auto& w : stats.workers) {
      if (s >= w.steps.size()) continue;
      const auto& st = w.steps[s];
      computed += st.vertices_computed;
      edge_bytes += st.edge_bytes_read;
      msg_bytes += st.data_bytes_sent;
      batches += st.data_batches_sent;
      busy_ns += st.compute_end_ns - st.compute_begin_ns;
    }
    std::printf("%-6zu %12" PRIu64 " %14" PRIu64 " %14" PRIu64 " %10" PRIu64
                " %12.2f\n",
                s, computed, edge_bytes, msg_bytes, batches, busy_ns / 1e6);
  }
  std::printf("total wall time: %lld ms\n",
              static_cast<long long>(stats.wall_ms));
}

}  // namespace

int cmd_put(const std::string& input, const std::string& store, bool directed,
            bool weighted) {
  try {
    GraphManifest man = put_graph(input, store, directed, weighted);
    std::printf("stored %s: |V|=%" PRIu64 " |E|=%" PRIu64 " %s %s\n",
                store.c_str(), man.num_vertices, man.num_edges,
                man.directed ? "directed" : "undirected",
                man.weighted ? "weighted" : "unweighted");
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_recode(const JobConfig& cfg, bool force) {
  try {
    JobStats stats = run_recode(cfg, force);
    GraphManifest man =
        GraphManifest::load(store_manifest_path(cfg.store_path));
    std::uint64_t messages = 0;
    for (const auto& w : stats.workers)
      for (const auto& s : w.steps) messages += s.messages_emitted;
    std::printf("recoded for %d workers in %lld ms (%" PRIu64 " messages)\n",
                cfg.num_workers, static_cast<long long>(man.recode_ms),
                messages);
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_run(const JobConfig& cfg, bool use_oracle) {
  try {
    if (use_oracle) {
      JobStats stats = run_oracle_job(cfg);
      std::printf("oracle finished in %" PRIu64 " supersteps; output in %s\n",
                  stats.workers.at(0).steps.empty()
                      ? 0
                      : stats.workers.at(0).steps.back().step,
                  cfg.output_path.c_str());
      return 0;
    }
    JobStats stats = run_job(cfg);
    print_step_summary(stats);
    std::printf("output parts in %s\n", cfg.output_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_verify(const std::string& left, const std::string& right,
               double tolerance) {
  try {
    VerifyReport report = verify_outputs(left, right, tolerance);
    std::printf("compared=%" PRIu64 " mismatches=%" PRIu64
                " max_abs_diff=%.3g only_left=%" PRIu64 " only_right=%" PRIu64
                "\n",
                report.compared, report.mismatches, report.max_abs_diff,
                report.only_left, report.only_right);
    for (const auto& s : report.samples) std::printf("  %s\n", s.c_str());
    return report.mismatches == 0 && report.only_left == 0 &&
                   report.only_right == 0
               ? 0
               : 2;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int cmd_stats(const std::string& stats_file, bool check, std::size_t fanin) {
  try {
    JobStats stats = JobStats::from_json_file(stats_file);
    print_step_summary(stats);
    for (const auto& w : stats.workers)
      std::printf("worker %d: owned=%" PRIu64 " peak_tracked=%" PRIu64
                  " bytes\n",
                  w.rank, w.owned_vertices, w.peak_tracked_bytes);
    if (check) {
      auto violations = check_pass_bounds(stats, fanin);
      if (violations.empty()) {
        std::printf("pass bounds: ok\n");
        return 0;
      }
      for (const auto& v : violations)
        std::printf("pass bounds violated: %s\n", v.c_str());
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

}  // namespace dg::cli
