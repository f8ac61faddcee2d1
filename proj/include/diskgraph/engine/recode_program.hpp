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

#ifndef DISKGRAPH_ENGINE_RECODE_PROGRAM_HPP
#define DISKGRAPH_ENGINE_RECODE_PROGRAM_HPP

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diskgraph/engine/program.hpp"
#include "diskgraph/engine/records.hpp"
#include "diskgraph/hash.hpp"
#include "diskgraph/io/write_stream.hpp"

namespace dg {

// Renumbers a graph so new ids are 0..|V|-1 with new_id = n*pos + worker,
// and rewrites every adjacency list in terms of new ids. Runs as an
// ordinary job in normal mode (old-id hashing). Directed graphs take
// three supersteps (request, reply, rewrite); undirected graphs announce
// directly and take two. Edge weights are re-attached from the old edge
// stream while rewriting, so item order inside each list is preserved.
template <class W = Empty>
struct RecodeProgram {
  using Value = std::uint64_t;  // unused
  using Weight = W;
  using Message = IdPair;  // (old id of subject, new id) / (requester, 0)

  static constexpr bool kHasCombiner = false;

  bool directed = true;

  std::unique_ptr<WriteStream> rec_out;
  std::size_t buffer_bytes = 64 * 1024;
  std::uint64_t items_written = 0;

  RecodeProgram() = default;
  RecodeProgram(RecodeProgram&&) = default;
  RecodeProgram& operator=(RecodeProgram&&) = default;
  // Copies carry configuration only; each worker opens its own stream.
  RecodeProgram(const RecodeProgram& o)
      : directed(o.directed), buffer_bytes(o.buffer_bytes) {}
  RecodeProgram& operator=(const RecodeProgram& o) {
    directed = o.directed;
    buffer_bytes = o.buffer_bytes;
    return *this;
  }

  std::uint64_t rewrite_step() const { return directed ? 3 : 2; }

  static std::string rec_tmp_path(const std::string& scratch) {
    return scratch + "/SE_rec.tmp";
  }
  static std::string rec_final_path(const std::string& scratch) {
    return scratch + "/SE_rec.bin";
  }
  static std::string a_rec_path(const std::string& scratch) {
    return scratch + "/A_rec.bin";
  }

  void on_superstep_begin(const SuperstepContext<RecodeProgram>& ctx,
                          const std::string& scratch) {
    if (ctx.superstep == rewrite_step())
      rec_out = std::make_unique<WriteStream>(rec_tmp_path(scratch),
                                              buffer_bytes);
  }

  void on_superstep_end(const SuperstepContext<RecodeProgram>& ctx,
                        const std::string& scratch) {
    (void)scratch;
    if (ctx.superstep == rewrite_step() && rec_out) rec_out->close();
  }

  void compute(VertexRef<RecodeProgram>& v,
               std::span<const EdgeOf<RecodeProgram>> edges,
               std::span<const Message> msgs,
               SuperstepContext<RecodeProgram>& ctx) {
    const VertexId new_id =
        recoded_id(v.position(), ctx.worker, ctx.num_workers);

    if (directed && ctx.superstep == 1) {
      // Ask every out-neighbor for its new id.
      for (const auto& e : edges) ctx.send(e.neighbor, {v.id(), 0});
      return;
    }
    if (directed && ctx.superstep == 2) {
      for (const auto& m : msgs) ctx.send(m.first, {v.id(), new_id});
      return;
    }
    if (!directed && ctx.superstep == 1) {
      for (const auto& e : edges) ctx.send(e.neighbor, {v.id(), new_id});
      return;
    }

    // Rewrite step: map old neighbor ids to new ones, keeping list order
    // and weights from the old edge stream.
    std::unordered_map<VertexId, VertexId> old_to_new;
    old_to_new.reserve(msgs.size());
    for (const auto& m : msgs) old_to_new[m.first] = m.second;

    std::uint8_t item[edge_item_bytes<RecodeProgram>()];
    for (const auto& e : edges) {
      auto it = old_to_new.find(e.neighbor);
      if (it == old_to_new.end())
        throw Error("dangling neighbor id " + std::to_string(e.neighbor) +
                    " in adjacency list of vertex " + std::to_string(v.id()));
      EdgeOf<RecodeProgram> rec_edge;
      rec_edge.neighbor = it->second;
      rec_edge.weight = e.weight;
      encode_edge_item<RecodeProgram>(item, rec_edge);
      rec_out->append(item, sizeof(item));
      ++items_written;
    }
    v.vote_to_halt();
  }

  // Persists the renumbered state array (old-id column plus degree) and
  // promotes the rewritten edge stream; called once per worker after the
  // job finishes.
  template <class Row>
  void on_job_complete(const std::vector<Row>& rows,
                       const std::string& scratch) {
    WriteStream a_out(a_rec_path(scratch), buffer_bytes);
    std::uint8_t rec[kRecodedRowBytes];
    for (const auto& row : rows) {
      put_u64(rec, row.id);  // original id: the job ran on old ids
      put_u64(rec + 8, row.degree);
      a_out.append(rec, sizeof(rec));
    }
    a_out.close();
    if (!std::filesystem::exists(rec_tmp_path(scratch))) {
      // No rewrite pass ran (a worker can own zero vertices).
      WriteStream empty(rec_tmp_path(scratch), buffer_bytes);
      empty.close();
    }
    std::filesystem::rename(rec_tmp_path(scratch), rec_final_path(scratch));
  }

  static std::string format_value(const Value& v) { return std::to_string(v); }
};

}  // namespace dg

#endif
