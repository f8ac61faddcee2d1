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

#ifndef DISKGRAPH_STATS_HPP
#define DISKGRAPH_STATS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dg {

// Per-superstep instrumentation of one worker. Step 0 is graph loading.
struct StepStats {
  std::uint64_t step = 0;

  // edge stream
  std::uint64_t edge_bytes_read = 0;
  std::uint64_t edge_file_bytes = 0;
  std::uint64_t edge_refills = 0;
  std::uint64_t edge_skip_calls = 0;
  std::uint64_t edge_items_skipped = 0;

  // incoming message stream (normal mode)
  std::uint64_t inbox_bytes_read = 0;
  std::uint64_t inbox_file_bytes = 0;
  std::uint64_t inbox_run_bytes = 0;
  std::uint64_t inbox_runs = 0;
  std::uint64_t inbox_merge_calls = 0;
  std::uint64_t inbox_merge_passes = 0;

  // outgoing message streams
  std::uint64_t outbox_bytes_appended = 0;
  std::uint64_t outbox_files_closed = 0;
  std::uint64_t send_merge_calls = 0;
  std::uint64_t send_merge_passes = 0;

  // transport
  std::uint64_t data_batches_sent = 0;
  std::uint64_t data_bytes_sent = 0;
  std::uint64_t end_tags_sent = 0;
  std::uint64_t end_tags_received = 0;

  // computation
  std::uint64_t vertices_computed = 0;
  std::uint64_t vertices_skipped = 0;
  std::uint64_t messages_emitted = 0;
  bool any_message_sent = false;
  bool any_vertex_active = false;

  // unit intervals, ns on the steady clock
  std::int64_t compute_begin_ns = 0;
  std::int64_t compute_end_ns = 0;
  std::int64_t send_begin_ns = 0;
  std::int64_t send_end_ns = 0;
  std::int64_t recv_done_ns = 0;
  std::int64_t barrier_done_ns = 0;
};

// Accumulates ORs of bools, sums of counters and non-zero timestamps from
// `src`; each unit of a worker records into its own StepStats series and
// the worker folds them together after the units join.
void merge_step_stats(StepStats& dst, const StepStats& src);

struct WorkerStats {
  int rank = 0;
  std::uint64_t owned_vertices = 0;
  std::uint64_t total_vertices = 0;
  std::uint64_t peak_tracked_bytes = 0;
  std::uint64_t bsend_peak_bytes = 0;
  std::uint64_t recode_messages = 0;  // volume of the recoding job, if any
  std::vector<StepStats> steps;

  StepStats& step(std::uint64_t s) {
    while (steps.size() <= s) {
      steps.push_back({});
      steps.back().step = steps.size() - 1;
    }
    return steps[s];
  }

  void absorb(const std::vector<StepStats>& unit_steps) {
    for (std::size_t i = 0; i < unit_steps.size(); ++i)
      merge_step_stats(step(i), unit_steps[i]);
  }
};

struct JobStats {
  std::vector<WorkerStats> workers;
  std::int64_t wall_ms = 0;

  std::string to_json() const;
  static JobStats from_json_file(const std::string& path);
  void write_json_file(const std::string& path) const;
};

// Validates the per-superstep I/O pass bounds from the recorded counters
// alone: at most one pass over the edge stream, exactly one pass over the
// inbox stream, and merge passes within the k-way bound. Returns a list
// of violations (empty = all bounds hold).
std::vector<std::string> check_pass_bounds(const JobStats& stats,
                                           std::size_t merge_fanin);

}  // namespace dg

#endif
