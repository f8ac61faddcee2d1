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

#ifndef DISKGRAPH_ENGINE_WORKER_HPP
#define DISKGRAPH_ENGINE_WORKER_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "diskgraph/comm/control_plane.hpp"
#include "diskgraph/comm/transport.hpp"
#include "diskgraph/config.hpp"
#include "diskgraph/engine/ledger.hpp"
#include "diskgraph/engine/load_merge.hpp"
#include "diskgraph/engine/oms_ring.hpp"
#include "diskgraph/engine/program.hpp"
#include "diskgraph/engine/recode_arrays.hpp"
#include "diskgraph/engine/records.hpp"
#include "diskgraph/graph/format.hpp"
#include "diskgraph/hash.hpp"
#include "diskgraph/io/merge.hpp"
#include "diskgraph/io/read_stream.hpp"
#include "diskgraph/io/write_stream.hpp"
#include "diskgraph/stats.hpp"

namespace dg {

inline std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// One worker of a job: a computing unit streaming the vertex array and
// edge stream, a sending unit scanning the outbox ring, and a receiving
// unit building the next step's inbox. Step 0 is graph loading; user
// supersteps start at 1.
template <class P>
class Worker {
 public:
  using Value = typename P::Value;
  using Weight = typename P::Weight;
  using Message = typename P::Message;

  struct Options {
    bool load_from_artifacts = false;  // recoded A/edge streams on local disk
    bool weighted = false;             // input text carries edge weights
    // Test hook: observes every message emitted by compute().
    std::function<void(std::uint64_t step, VertexId, const Message&)>
        send_probe;
  };

  Worker(const JobConfig& cfg, int rank, Transport& transport, P program,
         Options options = {})
      : cfg_(cfg),
        rank_(rank),
        n_(cfg.num_workers),
        transport_(transport),
        program_(std::move(program)),
        opt_(std::move(options)),
        hash_mode_(cfg.mode == RunMode::kRecoded ? PartitionMode::kRecoded
                                                 : PartitionMode::kNormal) {
    if (cfg_.mode == RunMode::kRecoded && !HasCombiner<P>)
      throw ConfigError(
          "recoded mode requires a combiner with an identity element");
    stats_.rank = rank_;
  }

  // Runs the whole job on this worker: load, supersteps, result dump.
  void run() {
    prepare_scratch();
    ControlPlane control(transport_, &program_merge_aggregate<P>);

    if (opt_.load_from_artifacts) {
      load_local_artifacts();
      ledger_.bootstrap(1);
    } else {
      ledger_.bootstrap(0);
    }

    auto unit = [this](void (Worker::*fn)()) {
      return std::thread([this, fn] {
        try {
          (this->*fn)();
        } catch (...) {
          fail(std::current_exception());
        }
      });
    };
    control_ = &control;
    std::thread uc = unit(&Worker::compute_unit);
    std::thread us = unit(&Worker::send_unit);
    std::thread ur = unit(&Worker::receive_unit);
    uc.join();
    us.join();
    ur.join();
    // All global coordination is over once this worker's units are done
    // (the last verdict and barrier are cluster-wide), so the transport
    // can go down; this also releases the coordinator threads.
    transport_.shutdown();
    control.stop();
    control_ = nullptr;

    if (error_) std::rethrow_exception(error_);

    collect_stats();
    stats_.owned_vertices = rows_.size();
    stats_.total_vertices = total_vertices_.load();
    stats_.peak_tracked_bytes = tracker_.peak();
    if constexpr (HasJobCompleteHook<P, StateRow<P>>)
      program_.on_job_complete(rows_, scratch());
    if (!cfg_.output_path.empty()) dump_results();
  }

  WorkerStats& stats() { return stats_; }
  MemoryTracker& tracker() { return tracker_; }
  const std::vector<StateRow<P>>& state_array() const { return rows_; }
  P& program() { return program_; }

  std::string scratch() const { return cfg_.scratch_dir(rank_); }

 private:
  static constexpr std::size_t kEdgeBytes = edge_item_bytes<P>();
  static constexpr std::size_t kEnvBytes = envelope_bytes<P>();

  // ---- paths --------------------------------------------------------------
  std::string a_path() const { return scratch() + "/A.bin"; }
  std::string se_path() const {
    return is_recoded_run() && opt_.load_from_artifacts
               ? scratch() + "/SE_rec.bin"
               : scratch() + "/SE.bin";
  }
  std::string si_path() const { return scratch() + "/SI.bin"; }
  std::string oms_dir() const { return scratch() + "/oms"; }
  std::string ims_dir() const { return scratch() + "/ims"; }
  std::string a_rec_path() const { return scratch() + "/A_rec.bin"; }

  bool is_recoded_run() const { return cfg_.mode == RunMode::kRecoded; }

  void prepare_scratch() {
    namespace fs = std::filesystem;
    fs::create_directories(scratch());
    // Job-transient state; recoded artifacts (A_rec/SE_rec) persist.
    fs::remove_all(oms_dir());
    fs::remove_all(ims_dir());
    fs::remove(si_path());
    fs::create_directories(oms_dir());
    fs::create_directories(ims_dir());
    ring_ = std::make_unique<OmsRing>(oms_dir(), n_, rank_, cfg_.split_size_B,
                                      cfg_.stream_buffer_b, &tracker_);
    for (int j = 0; j < n_; ++j)
      ring_->stream(j).set_file_ready_callback(
          [this] { ledger_.notify_outbox_event(); });
  }

  void fail(std::exception_ptr e) {
    {
      std::lock_guard<std::mutex> lk(error_mu_);
      if (!error_) error_ = e;
    }
    ledger_.abort();
    transport_.shutdown();
  }

  void rethrow_if_failed() {
    std::lock_guard<std::mutex> lk(error_mu_);
    if (error_) std::rethrow_exception(error_);
  }

  // ---- local (recoded-artifact) loading ------------------------------------

  void load_local_artifacts() {
    std::uint64_t size = std::filesystem::exists(a_rec_path())
                             ? std::filesystem::file_size(a_rec_path())
                             : 0;
    if (size % kRecodedRowBytes != 0)
      throw CorruptionError("recoded state file has partial rows");
    std::uint64_t count = size / kRecodedRowBytes;
    rows_.reserve(count);
    if (count > 0) {
      ReadStream in(a_rec_path(), kRecodedRowBytes, cfg_.stream_buffer_b,
                    &tracker_);
      std::uint8_t rec[kRecodedRowBytes];
      for (std::uint64_t pos = 0; pos < count; ++pos) {
        in.read_items(rec, 1);
        StateRow<P> row;
        row.id = recoded_id(pos, rank_, n_);
        row.old_id = get_u64(rec);
        row.degree = get_u64(rec + 8);
        row.active = true;
        rows_.push_back(row);
      }
    }
    rows_alloc_ = TrackedAlloc(&tracker_, MemCategory::kStateArray,
                               rows_.size() * sizeof(StateRow<P>));
  }

  // ---- computing unit -------------------------------------------------------

  void compute_unit() {
    if (!opt_.load_from_artifacts) {
      if (!ledger_.wait_compute_permit(0)) return;
      auto& st = uc_stats(0);
      st.compute_begin_ns = now_ns();
      parse_and_route();
      ring_->finalize_step(0);
      ledger_.mark_compute_finished(0);
      st.compute_end_ns = now_ns();
    } else {
      ring_->finalize_step(0);
      ledger_.mark_compute_finished(0);
    }

    double aggregated = 0.0;
    for (std::uint64_t step = 1;; ++step) {
      if (!ledger_.wait_compute_permit(step)) break;
      rethrow_if_failed();
      if (step == 1) {
        // Step-0 synchronization: establishes |V| and rejects empty input.
        ControlRecord rec;
        rec.vertex_count = rows_.size();
        ControlRecord merged = control_->allreduce(0, rec);
        total_vertices_.store(merged.vertex_count);
        if (merged.vertex_count == 0) {
          ledger_.publish_verdict(0, true);
          throw ConfigError("empty graph: refusing to run");
        }
        if (is_recoded_run()) {
          // Ids must be exactly 0..|V|-1: this worker owns every id
          // congruent to its rank below |V|.
          std::uint64_t total = merged.vertex_count;
          std::uint64_t expected =
              total > static_cast<std::uint64_t>(rank_)
                  ? (total - rank_ - 1) / n_ + 1
                  : 0;
          if (rows_.size() != expected) {
            ledger_.publish_verdict(0, true);
            throw ConfigError(
                "recoded mode requires vertex ids 0..|V|-1 (worker " +
                std::to_string(rank_) + " owns " +
                std::to_string(rows_.size()) + " of " +
                std::to_string(expected) + " expected)");
          }
        }
        ledger_.publish_verdict(0, false);
      }

      ControlRecord local = run_compute_pass(step, aggregated);
      ring_->finalize_step(step);
      ledger_.mark_compute_finished(step);

      ControlRecord merged = control_->allreduce(step, local);
      aggregated = merged.aggregate;
      bool stop = !merged.any_message_sent && !merged.any_vertex_active;
      ledger_.publish_verdict(step, stop);
      if (stop) break;
    }
  }

  ControlRecord run_compute_pass(std::uint64_t step, double aggregated) {
    auto& st = uc_stats(step);
    st.compute_begin_ns = now_ns();

    SuperstepContext<P> ctx;
    ctx.superstep = step;
    ctx.num_vertices = total_vertices_.load();
    ctx.num_workers = n_;
    ctx.worker = rank_;
    ctx.aggregated = aggregated;

    bool any_msg = false;
    double agg_local = 0.0;
    bool agg_touched = false;
    std::uint8_t env[kEnvBytes > 0 ? kEnvBytes : 1];
    ctx.send_fn = [&](VertexId target, const Message& m) {
      encode_envelope<P>(env, target, m);
      int dest = hash_partition(target, n_, hash_mode_);
      ring_->append(dest, env, kEnvBytes);
      any_msg = true;
      ++st.messages_emitted;
      if (opt_.send_probe) opt_.send_probe(step, target, m);
    };
    ctx.aggregate_fn = [&](double x) {
      agg_local = agg_touched ? program_merge_aggregate<P>(agg_local, x) : x;
      agg_touched = true;
    };

    if constexpr (HasStepHooks<P>) program_.on_superstep_begin(ctx, scratch());

    bool any_active = false;
    if (is_recoded_run()) {
      if constexpr (HasCombiner<P>)
        run_pass_recoded(step, ctx, st, any_active);
    } else {
      run_pass_normal(step, ctx, st, any_active);
    }

    if constexpr (HasStepHooks<P>) program_.on_superstep_end(ctx, scratch());

    st.compute_end_ns = now_ns();
    st.any_message_sent = any_msg;
    st.any_vertex_active = any_active;

    ControlRecord rec;
    rec.any_message_sent = any_msg;
    rec.any_vertex_active = any_active;
    rec.aggregate = agg_local;
    rec.vertex_count = rows_.size();
    return rec;
  }

  void call_compute(StateRow<P>& row, std::uint64_t pos,
                    std::span<const EdgeOf<P>> edges,
                    std::span<const Message> msgs, SuperstepContext<P>& ctx) {
    row.active = true;  // a scheduled vertex is active unless it halts again
    VertexRef<P> ref(row.id, row.old_id, pos, row.degree, row.value,
                     row.active);
    try {
      program_.compute(ref, edges, msgs, ctx);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("compute failed at vertex " + std::to_string(row.id) + ": " +
                  e.what());
    }
  }

  void run_pass_normal(std::uint64_t /*step*/, SuperstepContext<P>& ctx,
                       StepStats& st, bool& any_active) {
    ReadStream se(se_path(), kEdgeBytes, cfg_.stream_buffer_b, &tracker_);

    std::unique_ptr<ReadStream> si;
    if (std::filesystem::exists(si_path()))
      si = std::make_unique<ReadStream>(si_path(), kEnvBytes,
                                        cfg_.stream_buffer_b, &tracker_);
    std::vector<std::uint8_t> env(kEnvBytes);
    bool la_valid = false;  // one-envelope lookahead into the inbox
    VertexId la_target = 0;
    auto advance_la = [&] {
      if (si && !si->at_end()) {
        si->read_items(env.data(), 1);
        la_target = get_u64(env.data());
        la_valid = true;
      } else {
        la_valid = false;
      }
    };
    advance_la();

    std::vector<EdgeOf<P>> edges;
    std::vector<std::uint8_t> edge_buf;
    std::vector<Message> msgs;
    std::uint64_t skip_run = 0;

    for (std::uint64_t pos = 0; pos < rows_.size(); ++pos) {
      StateRow<P>& row = rows_[pos];
      if (la_valid && la_target < row.id)
        throw ProtocolError("message for unknown vertex id " +
                            std::to_string(la_target));
      msgs.clear();
      while (la_valid && la_target == row.id) {
        msgs.push_back(decode_envelope_payload<P>(env.data()));
        advance_la();
      }
      bool needs = row.active || !msgs.empty();
      if (!needs) {
        skip_run += row.degree;
        ++st.vertices_skipped;
        continue;
      }
      if (skip_run > 0) {
        se.skip_items(skip_run);
        skip_run = 0;
      }
      read_adjacency(se, row.degree, edges, edge_buf);
      call_compute(row, pos, edges, msgs, ctx);
      any_active = any_active || row.active;
      ++st.vertices_computed;
    }
    if (la_valid)
      throw ProtocolError("message for unknown vertex id " +
                          std::to_string(la_target));

    st.edge_bytes_read += se.bytes_read();
    st.edge_file_bytes += se.file_bytes();
    st.edge_refills += se.refill_count();
    st.edge_skip_calls += se.skip_calls();
    st.edge_items_skipped += se.items_skipped();
    if (si) {
      st.inbox_bytes_read += si->bytes_read();
      st.inbox_file_bytes += si->file_bytes();
    }
  }

  void run_pass_recoded(std::uint64_t step, SuperstepContext<P>& ctx,
                        StepStats& st, bool& any_active) {
    if constexpr (HasCombiner<P>) {
      ReadStream se(se_path(), kEdgeBytes, cfg_.stream_buffer_b, &tracker_);
      std::shared_ptr<DigestArray<P>> digest = take_digest(step);

      std::vector<EdgeOf<P>> edges;
      std::vector<std::uint8_t> edge_buf;
      Message folded[1] = {P::identity()};
      std::uint64_t skip_run = 0;

      for (std::uint64_t pos = 0; pos < rows_.size(); ++pos) {
        StateRow<P>& row = rows_[pos];
        bool has_msg = digest && digest->has_message(pos);
        bool needs = row.active || has_msg;
        if (!needs) {
          skip_run += row.degree;
          ++st.vertices_skipped;
          continue;
        }
        if (skip_run > 0) {
          se.skip_items(skip_run);
          skip_run = 0;
        }
        read_adjacency(se, row.degree, edges, edge_buf);
        std::span<const Message> msgs;
        if (has_msg) {
          folded[0] = digest->at(pos);
          msgs = std::span<const Message>(folded, 1);
        }
        call_compute(row, pos, edges, msgs, ctx);
        any_active = any_active || row.active;
        ++st.vertices_computed;
      }
      digest.reset();  // freed as soon as the pass is over

      st.edge_bytes_read += se.bytes_read();
      st.edge_file_bytes += se.file_bytes();
      st.edge_refills += se.refill_count();
      st.edge_skip_calls += se.skip_calls();
      st.edge_items_skipped += se.items_skipped();
    }
  }

  void read_adjacency(ReadStream& se, std::uint64_t degree,
                      std::vector<EdgeOf<P>>& edges,
                      std::vector<std::uint8_t>& buf) {
    edges.resize(degree);
    buf.resize(degree * kEdgeBytes);
    se.read_items(buf.data(), degree);
    for (std::uint64_t i = 0; i < degree; ++i)
      edges[i] = decode_edge_item<P>(buf.data() + i * kEdgeBytes);
  }

  // ---- sending unit ---------------------------------------------------------

  void send_unit() {
    if (!opt_.load_from_artifacts) {
      if (!ledger_.wait_send_permit(0)) return;
      send_step(0);
    }
    for (std::uint64_t step = 1;; ++step) {
      if (!ledger_.wait_verdict(step - 1)) break;
      if (!ledger_.wait_send_permit(step)) break;
      send_step(step);
    }
  }

  void send_step(std::uint64_t step) {
    auto& st = us_stats(step);
    st.send_begin_ns = now_ns();
    const bool combine_files = step > 0 && HasCombiner<P>;

    for (;;) {
      rethrow_if_failed();
      std::uint64_t epoch = ledger_.outbox_epoch();
      bool finished = ledger_.compute_finished(step);
      auto pick = ring_->scan(step, finished, combine_files);
      if (pick) {
        ship(step, *pick, st);
        continue;
      }
      if (finished && ring_->drained(step)) break;
      ledger_.wait_outbox_change(epoch);
    }

    Batch tag;
    tag.kind = BatchKind::kEndTag;
    tag.superstep = step;
    for (int w = 0; w < n_; ++w) {
      transport_.send(w, tag);
      ++st.end_tags_sent;
    }
    st.send_end_ns = now_ns();
  }

  void ship(std::uint64_t step, const OmsRing::Pick& pick, StepStats& st) {
    Batch batch;
    batch.kind = BatchKind::kData;
    batch.superstep = step;

    if (step == 0 || !HasCombiner<P>) {
      // One file per pick, shipped verbatim.
      const std::string& f = pick.files.front();
      std::uint64_t size = std::filesystem::file_size(f);
      batch.payload.resize(size);
      TrackedAlloc hold(&tracker_, MemCategory::kBatchBuffer, size);
      if (size > 0) {
        ReadStream in(f, 1, cfg_.stream_buffer_b, &tracker_);
        in.read_items(batch.payload.data(), size);
      }
      std::filesystem::remove(f);
    } else if (is_recoded_run()) {
      combine_in_memory(pick, batch);
    } else {
      combine_by_merge(pick, batch, st);
    }

    track_bsend(batch.payload.size());
    transport_.send(pick.dest, batch);
    ++st.data_batches_sent;
    st.data_bytes_sent += batch.payload.size();
  }

  // Normal mode with a combiner: sort each pending file, then fold an
  // external merge of the sorted runs straight into the send buffer.
  void combine_by_merge(const OmsRing::Pick& pick, Batch& batch,
                        StepStats& st) {
    if constexpr (HasCombiner<P>) {
      for (const auto& f : pick.files)
        sort_message_file(f, Codec<Message>::size, &tracker_);
      MergeOptions mo;
      mo.payload_size = Codec<Message>::size;
      mo.fanin = cfg_.merge_fanin_k;
      mo.buffer_bytes = cfg_.stream_buffer_b;
      mo.tracker = &tracker_;
      mo.temp_dir = oms_dir();
      mo.combiner = [](std::uint8_t* acc, const std::uint8_t* in) {
        Message merged =
            P::combine(Codec<Message>::decode(acc), Codec<Message>::decode(in));
        Codec<Message>::encode(acc, merged);
      };
      RecordSink sink = [&](const std::uint8_t* rec) {
        batch.payload.insert(batch.payload.end(), rec, rec + kEnvBytes);
      };
      MergeStats ms = kway_merge_to_sink(pick.files, sink, mo);
      ++st.send_merge_calls;
      st.send_merge_passes += ms.passes;
    }
  }

  // Recoded mode: fold every pending file into the combine array, then
  // drain it in ascending position order. No sorting anywhere.
  void combine_in_memory(const OmsRing::Pick& pick, Batch& batch) {
    if constexpr (HasCombiner<P>) {
      if (!combine_array_) {
        std::uint64_t total = total_vertices_.load();
        std::size_t slots =
            static_cast<std::size_t>((total + n_ - 1) / std::max(1, n_));
        combine_array_ = std::make_unique<CombineArray<P>>(slots, &tracker_);
      }
      std::vector<std::uint8_t> env(kEnvBytes);
      for (const auto& f : pick.files) {
        ReadStream in(f, kEnvBytes, cfg_.stream_buffer_b, &tracker_);
        while (!in.at_end()) {
          in.read_items(env.data(), 1);
          VertexId target = get_u64(env.data());
          combine_array_->fold(recoded_pos(target, n_),
                               decode_envelope_payload<P>(env.data()));
        }
        std::filesystem::remove(f);
      }
      std::uint8_t out[kEnvBytes > 0 ? kEnvBytes : 1];
      combine_array_->drain(pick.dest, n_, [&](VertexId target,
                                               const Message& m) {
        encode_envelope<P>(out, target, m);
        batch.payload.insert(batch.payload.end(), out, out + kEnvBytes);
      });
    }
  }

  // ---- receiving unit --------------------------------------------------------

  void receive_unit() {
    if (!opt_.load_from_artifacts) {
      receive_load_step();
      ledger_.grant_compute(1);
      auto& st = ur_stats(0);
      st.recv_done_ns = now_ns();
      control_->barrier(0);
      st.barrier_done_ns = now_ns();
      ledger_.grant_send(1);
    }
    for (std::uint64_t step = 1;; ++step) {
      if (!ledger_.wait_verdict(step - 1)) break;
      receive_step(step);
      ledger_.grant_compute(step + 1);
      auto& st = ur_stats(step);
      control_->barrier(step);
      st.barrier_done_ns = now_ns();
      ledger_.grant_send(step + 1);
    }
  }

  void expect_step(std::uint64_t got, std::uint64_t want) {
    if (got != want)
      throw ProtocolError("step isolation violated: step " +
                          std::to_string(got) + " batch during step " +
                          std::to_string(want));
  }

  void receive_load_step() {
    auto& st = ur_stats(0);
    std::vector<std::string> runs;
    std::vector<bool> tagged(n_, false);
    int tags = 0;
    int from = 0;
    Batch b;
    while (tags < n_) {
      if (!transport_.recv_data(from, b))
        throw ProtocolError("transport closed during loading");
      expect_step(b.superstep, 0);
      if (b.kind == BatchKind::kEndTag) {
        if (tagged[from])
          throw ProtocolError("duplicate end tag from worker " +
                              std::to_string(from));
        tagged[from] = true;
        ++tags;
        ++st.end_tags_received;
        continue;
      }
      TrackedAlloc hold(&tracker_, MemCategory::kBatchBuffer,
                        b.payload.size());
      std::string run =
          ims_dir() + "/load-run-" + std::to_string(runs.size());
      write_vertex_run<P>(b.payload, run, cfg_.stream_buffer_b, &tracker_);
      st.inbox_run_bytes += b.payload.size();
      runs.push_back(run);
    }
    st.inbox_runs += runs.size();
    build_state_from_runs(std::move(runs));
    st.recv_done_ns = now_ns();
  }

  void build_state_from_runs(std::vector<std::string> runs) {
    WriteStream a_out(a_path(), cfg_.stream_buffer_b, &tracker_);
    WriteStream se_out(scratch() + "/SE.bin", cfg_.stream_buffer_b, &tracker_);
    std::vector<std::uint8_t> row_buf(state_row_disk_bytes<P>());

    merge_vertex_runs<P>(
        std::move(runs), cfg_.merge_fanin_k, cfg_.stream_buffer_b, ims_dir(),
        &tracker_, [&](const std::vector<std::uint8_t>& rec) {
          StateRow<P> row;
          row.id = get_u64(rec.data());
          row.degree = get_u64(rec.data() + 8);
          row.active = rec[16] != 0;
          row.value = Codec<Value>::decode(rec.data() + 17);
          row.old_id = row.id;
          encode_state_row<P>(row_buf.data(), row);
          a_out.append(row_buf.data(), row_buf.size());
          se_out.append(rec.data() + 17 + Codec<Value>::size,
                        rec.size() - 17 - Codec<Value>::size);
          rows_.push_back(row);
        });
    a_out.close();
    se_out.close();
    rows_alloc_ = TrackedAlloc(&tracker_, MemCategory::kStateArray,
                               rows_.size() * sizeof(StateRow<P>));

    if (is_recoded_run()) {
      // Dense-id input loaded with the modulo hash: position must round-trip.
      for (std::uint64_t pos = 0; pos < rows_.size(); ++pos)
        if (rows_[pos].id != recoded_id(pos, rank_, n_))
          throw ConfigError(
              "recoded mode requires vertex ids 0..|V|-1 (found id " +
              std::to_string(rows_[pos].id) + " at position " +
              std::to_string(pos) + ")");
    }
  }

  void receive_step(std::uint64_t step) {
    auto& st = ur_stats(step);
    std::vector<std::string> runs;
    std::vector<bool> tagged(n_, false);
    int tags = 0;
    int from = 0;
    Batch b;

    std::shared_ptr<DigestArray<P>> next_digest;
    if (is_recoded_run()) {
      if constexpr (HasCombiner<P>)
        next_digest =
            std::make_shared<DigestArray<P>>(rows_.size(), &tracker_);
    }

    while (tags < n_) {
      if (!transport_.recv_data(from, b))
        throw ProtocolError("transport closed during step " +
                            std::to_string(step));
      expect_step(b.superstep, step);
      if (b.kind == BatchKind::kEndTag) {
        if (tagged[from])
          throw ProtocolError("duplicate end tag from worker " +
                              std::to_string(from));
        tagged[from] = true;
        ++tags;
        ++st.end_tags_received;
        continue;
      }
      if (b.payload.size() % kEnvBytes != 0)
        throw FramingError("data batch is not a whole number of messages");
      TrackedAlloc hold(&tracker_, MemCategory::kBatchBuffer, b.payload.size());
      if (is_recoded_run()) {
        if constexpr (HasCombiner<P>)
          digest_envelopes<P>(b.payload.data(), b.payload.size(), rank_, n_,
                              *next_digest);
      } else {
        sort_message_records(b.payload.data(), b.payload.size(),
                             Codec<Message>::size);
        std::string run = ims_dir() + "/run-" + std::to_string(step) + "-" +
                          std::to_string(runs.size());
        WriteStream out(run, cfg_.stream_buffer_b, &tracker_);
        out.append(b.payload.data(), b.payload.size());
        out.close();
        st.inbox_run_bytes += b.payload.size();
        runs.push_back(run);
      }
    }
    st.inbox_runs += runs.size();

    if (!is_recoded_run()) {
      MergeOptions mo;
      mo.payload_size = Codec<Message>::size;
      mo.fanin = cfg_.merge_fanin_k;
      mo.buffer_bytes = cfg_.stream_buffer_b;
      mo.tracker = &tracker_;
      mo.temp_dir = ims_dir();
      if constexpr (HasCombiner<P>) {
        mo.combiner = [](std::uint8_t* acc, const std::uint8_t* in) {
          Message merged = P::combine(Codec<Message>::decode(acc),
                                      Codec<Message>::decode(in));
          Codec<Message>::encode(acc, merged);
        };
      }
      MergeStats ms = kway_merge(runs, si_path(), mo);
      ++st.inbox_merge_calls;
      st.inbox_merge_passes += ms.passes;
    } else {
      if constexpr (HasCombiner<P>)
        publish_digest(step + 1, std::move(next_digest));
    }
    st.recv_done_ns = now_ns();
  }

  // ---- digest generation handoff -------------------------------------------

  std::shared_ptr<DigestArray<P>> take_digest(std::uint64_t step) {
    std::lock_guard<std::mutex> lk(digest_mu_);
    auto it = digests_.find(step);
    if (it == digests_.end()) return nullptr;
    auto d = std::move(it->second);
    digests_.erase(it);
    return d;
  }

  void publish_digest(std::uint64_t step, std::shared_ptr<DigestArray<P>> d) {
    std::lock_guard<std::mutex> lk(digest_mu_);
    digests_[step] = std::move(d);
  }

  // ---- loading: parse a byte range of the input text ------------------------

  void parse_and_route() {
    const std::string path = store_graph_path(cfg_.store_path);
    std::uint64_t file_size = std::filesystem::file_size(path);
    std::uint64_t lo = file_size * rank_ / n_;
    std::uint64_t hi = file_size * (rank_ + 1) / n_;

    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::uint64_t cursor = lo;
    if (lo > 0) {
      in.seekg(static_cast<std::streamoff>(lo - 1));
      std::string rest;
      std::getline(in, rest);
      cursor = lo - 1 + rest.size() + 1;
    }

    std::vector<std::uint8_t> record;
    std::vector<EdgeOf<P>> edges;
    std::string line;
    std::uint64_t local_line = 0;
    while (cursor < hi && std::getline(in, line)) {
      std::uint64_t line_start = cursor;
      cursor += line.size() + 1;
      ++local_line;
      if (line.empty()) continue;
      ParsedVertex pv;
      try {
        pv = parse_vertex_line(line, opt_.weighted, 0);
      } catch (const ParseError& e) {
        std::string msg = e.what();
        auto colon = msg.find(": ");
        throw ParseError(
            path + " line " + std::to_string(line_number_at(path, line_start)) +
            (colon == std::string::npos ? ": malformed vertex line"
                                        : msg.substr(colon)));
      }
      StateRow<P> row;
      row.id = pv.id;
      row.degree = pv.adj.size();
      row.active = true;
      edges.clear();
      for (const auto& [nbr, w] : pv.adj) {
        EdgeOf<P> e;
        e.neighbor = nbr;
        if constexpr (!std::is_same_v<Weight, Empty>)
          e.weight = static_cast<Weight>(w);
        edges.push_back(e);
      }
      record.clear();
      append_vertex_record<P>(record, row, edges);
      int dest = hash_partition(pv.id, n_, hash_mode_);
      ring_->append(dest, record.data(), record.size());
    }
  }

  // ---- result dump -----------------------------------------------------------

  void dump_results() {
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.output_path);
    std::string part = cfg_.output_path + "/part-" + std::to_string(rank_);
    std::ofstream out(part, std::ios::trunc);
    if (!out) throw IoError("cannot write " + part);
    for (const auto& row : rows_)
      out << row.old_id << '\t' << P::format_value(row.value) << '\n';
    if (!out.good()) throw IoError("failed writing " + part);
  }

  // ---- per-unit stats --------------------------------------------------------

  StepStats& uc_stats(std::uint64_t s) { return grow(uc_steps_, s); }
  StepStats& us_stats(std::uint64_t s) { return grow(us_steps_, s); }
  StepStats& ur_stats(std::uint64_t s) { return grow(ur_steps_, s); }

  static StepStats& grow(std::vector<StepStats>& v, std::uint64_t s) {
    while (v.size() <= s) {
      v.push_back({});
      v.back().step = v.size() - 1;
    }
    return v[s];
  }

  void track_bsend(std::uint64_t bytes) {
    std::uint64_t prev = stats_.bsend_peak_bytes;
    if (bytes > prev) stats_.bsend_peak_bytes = bytes;
  }

 public:
  // Folds the unit-local series into the worker stats; run() calls this,
  // exposed for tests that drive units directly.
  void collect_stats() {
    stats_.absorb(uc_steps_);
    stats_.absorb(us_steps_);
    stats_.absorb(ur_steps_);
    uc_steps_.clear();
    us_steps_.clear();
    ur_steps_.clear();
  }

 private:
  JobConfig cfg_;
  int rank_;
  int n_;
  Transport& transport_;
  P program_;
  Options opt_;
  PartitionMode hash_mode_;

  SuperstepLedger ledger_;
  std::unique_ptr<OmsRing> ring_;
  ControlPlane* control_ = nullptr;

  std::vector<StateRow<P>> rows_;
  TrackedAlloc rows_alloc_;
  std::atomic<std::uint64_t> total_vertices_{0};

  std::mutex digest_mu_;
  std::map<std::uint64_t, std::shared_ptr<DigestArray<P>>> digests_;
  std::unique_ptr<CombineArray<P>> combine_array_;

  MemoryTracker tracker_;
  WorkerStats stats_;
  std::vector<StepStats> uc_steps_, us_steps_, ur_steps_;

  std::mutex error_mu_;
  std::exception_ptr error_;
};

}  // namespace dg

#endif
