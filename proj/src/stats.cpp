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

#include "diskgraph/stats.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "diskgraph/common.hpp"

namespace dg {

using nlohmann::json;

namespace {

json step_to_json(const StepStats& s) {
  return json{{"step", s.step},
              {"edge_bytes_read", s.edge_bytes_read},
              {"edge_file_bytes", s.edge_file_bytes},
              {"edge_refills", s.edge_refills},
              {"edge_skip_calls", s.edge_skip_calls},
              {"edge_items_skipped", s.edge_items_skipped},
              {"inbox_bytes_read", s.inbox_bytes_read},
              {"inbox_file_bytes", s.inbox_file_bytes},
              {"inbox_run_bytes", s.inbox_run_bytes},
              {"inbox_runs", s.inbox_runs},
              {"inbox_merge_calls", s.inbox_merge_calls},
              {"inbox_merge_passes", s.inbox_merge_passes},
              {"outbox_bytes_appended", s.outbox_bytes_appended},
              {"outbox_files_closed", s.outbox_files_closed},
              {"send_merge_calls", s.send_merge_calls},
              {"send_merge_passes", s.send_merge_passes},
              {"data_batches_sent", s.data_batches_sent},
              {"data_bytes_sent", s.data_bytes_sent},
              {"end_tags_sent", s.end_tags_sent},
              {"end_tags_received", s.end_tags_received},
              {"vertices_computed", s.vertices_computed},
              {"vertices_skipped", s.vertices_skipped},
              {"messages_emitted", s.messages_emitted},
              {"any_message_sent", s.any_message_sent},
              {"any_vertex_active", s.any_vertex_active},
              {"compute_begin_ns", s.compute_begin_ns},
              {"compute_end_ns", s.compute_end_ns},
              {"send_begin_ns", s.send_begin_ns},
              {"send_end_ns", s.send_end_ns},
              {"recv_done_ns", s.recv_done_ns},
              {"barrier_done_ns", s.barrier_done_ns}};
}

StepStats step_from_json(const json& j) {
  StepStats s;
  s.step = j.value("step", 0ULL);
  s.edge_bytes_read = j.value("edge_bytes_read", 0ULL);
  s.edge_file_bytes = j.value("edge_file_bytes", 0ULL);
  s.edge_refills = j.value("edge_refills", 0ULL);
  s.edge_skip_calls = j.value("edge_skip_calls", 0ULL);
  s.edge_items_skipped = j.value("edge_items_skipped", 0ULL);
  s.inbox_bytes_read = j.value("inbox_bytes_read", 0ULL);
  s.inbox_file_bytes = j.value("inbox_file_bytes", 0ULL);
  s.inbox_run_bytes = j.value("inbox_run_bytes", 0ULL);
  s.inbox_runs = j.value("inbox_runs", 0ULL);
  s.inbox_merge_calls = j.value("inbox_merge_calls", 0ULL);
  s.inbox_merge_passes = j.value("inbox_merge_passes", 0ULL);
  s.outbox_bytes_appended = j.value("outbox_bytes_appended", 0ULL);
  s.outbox_files_closed = j.value("outbox_files_closed", 0ULL);
  s.send_merge_calls = j.value("send_merge_calls", 0ULL);
  s.send_merge_passes = j.value("send_merge_passes", 0ULL);
  s.data_batches_sent = j.value("data_batches_sent", 0ULL);
  s.data_bytes_sent = j.value("data_bytes_sent", 0ULL);
  s.end_tags_sent = j.value("end_tags_sent", 0ULL);
  s.end_tags_received = j.value("end_tags_received", 0ULL);
  s.vertices_computed = j.value("vertices_computed", 0ULL);
  s.vertices_skipped = j.value("vertices_skipped", 0ULL);
  s.messages_emitted = j.value("messages_emitted", 0ULL);
  s.any_message_sent = j.value("any_message_sent", false);
  s.any_vertex_active = j.value("any_vertex_active", false);
  s.compute_begin_ns = j.value("compute_begin_ns", 0LL);
  s.compute_end_ns = j.value("compute_end_ns", 0LL);
  s.send_begin_ns = j.value("send_begin_ns", 0LL);
  s.send_end_ns = j.value("send_end_ns", 0LL);
  s.recv_done_ns = j.value("recv_done_ns", 0LL);
  s.barrier_done_ns = j.value("barrier_done_ns", 0LL);
  return s;
}

}  // namespace

void merge_step_stats(StepStats& dst, const StepStats& src) {
  dst.step = std::max(dst.step, src.step);
  dst.edge_bytes_read += src.edge_bytes_read;
  dst.edge_file_bytes += src.edge_file_bytes;
  dst.edge_refills += src.edge_refills;
  dst.edge_skip_calls += src.edge_skip_calls;
  dst.edge_items_skipped += src.edge_items_skipped;
  dst.inbox_bytes_read += src.inbox_bytes_read;
  dst.inbox_file_bytes += src.inbox_file_bytes;
  dst.inbox_run_bytes += src.inbox_run_bytes;
  dst.inbox_runs += src.inbox_runs;
  dst.inbox_merge_calls += src.inbox_merge_calls;
  dst.inbox_merge_passes += src.inbox_merge_passes;
  dst.outbox_bytes_appended += src.outbox_bytes_appended;
  dst.outbox_files_closed += src.outbox_files_closed;
  dst.send_merge_calls += src.send_merge_calls;
  dst.send_merge_passes += src.send_merge_passes;
  dst.data_batches_sent += src.data_batches_sent;
  dst.data_bytes_sent += src.data_bytes_sent;
  dst.end_tags_sent += src.end_tags_sent;
  dst.end_tags_received += src.end_tags_received;
  dst.vertices_computed += src.vertices_computed;
  dst.vertices_skipped += src.vertices_skipped;
  dst.messages_emitted += src.messages_emitted;
  dst.any_message_sent = dst.any_message_sent || src.any_message_sent;
  dst.any_vertex_active = dst.any_vertex_active || src.any_vertex_active;
  if (src.compute_begin_ns) dst.compute_begin_ns = src.compute_begin_ns;
  if (src.compute_end_ns) dst.compute_end_ns = src.compute_end_ns;
  if (src.send_begin_ns) dst.send_begin_ns = src.send_begin_ns;
  if (src.send_end_ns) dst.send_end_ns = src.send_end_ns;
  if (src.recv_done_ns) dst.recv_done_ns = src.recv_done_ns;
  if (src.barrier_done_ns) dst.barrier_done_ns = src.barrier_done_ns;
}

std::string JobStats::to_json() const {
  json workers_json = json::array();
  for (const auto& w : workers) {
    json steps = json::array();
    for (const auto& s : w.steps) steps.push_back(step_to_json(s));
    workers_json.push_back(json{{"rank", w.rank},
                                {"owned_vertices", w.owned_vertices},
                                {"total_vertices", w.total_vertices},
                                {"peak_tracked_bytes", w.peak_tracked_bytes},
                                {"bsend_peak_bytes", w.bsend_peak_bytes},
                                {"recode_messages", w.recode_messages},
                                {"steps", steps}});
  }
  return json{{"wall_ms", wall_ms}, {"workers", workers_json}}.dump(2);
}

void JobStats::write_json_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stats " + path);
  out << to_json() << "\n";
}

JobStats JobStats::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stats " + path);
  json j = json::parse(in);
  JobStats stats;
  stats.wall_ms = j.value("wall_ms", 0LL);
  for (const auto& wj : j.at("workers")) {
    WorkerStats w;
    w.rank = wj.value("rank", 0);
    w.owned_vertices = wj.value("owned_vertices", 0ULL);
    w.total_vertices = wj.value("total_vertices", 0ULL);
    w.peak_tracked_bytes = wj.value("peak_tracked_bytes", 0ULL);
    w.bsend_peak_bytes = wj.value("bsend_peak_bytes", 0ULL);
    w.recode_messages = wj.value("recode_messages", 0ULL);
    for (const auto& sj : wj.at("steps")) w.steps.push_back(step_from_json(sj));
    stats.workers.push_back(std::move(w));
  }
  return stats;
}

std::vector<std::string> check_pass_bounds(const JobStats& stats,
                                           std::size_t merge_fanin) {
  std::vector<std::string> violations;
  auto log2k = [&](std::uint64_t runs) -> std::uint64_t {
    if (runs <= 1) return 1;
    std::uint64_t passes = 0, width = 1;
    while (width < runs) {
      width *= merge_fanin;
      ++passes;
    }
    return passes;
  };
  for (const auto& w : stats.workers) {
    for (const auto& s : w.steps) {
      if (s.step == 0) continue;  // loading pass has its own shape
      std::string at = "worker " + std::to_string(w.rank) + " step " +
                       std::to_string(s.step) + ": ";
      if (s.edge_bytes_read > s.edge_file_bytes)
        violations.push_back(at + "edge stream read exceeds one pass");
      if (s.inbox_bytes_read != s.inbox_file_bytes)
        violations.push_back(at + "inbox stream not read in exactly one pass");
      if (s.inbox_merge_passes > log2k(std::max<std::uint64_t>(1, s.inbox_runs)))
        violations.push_back(at + "inbox merge exceeded pass bound");
    }
  }
  return violations;
}

}  // namespace dg
