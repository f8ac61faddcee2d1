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

#ifndef DISKGRAPH_ENGINE_LOAD_MERGE_HPP
#define DISKGRAPH_ENGINE_LOAD_MERGE_HPP

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <memory>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "diskgraph/common.hpp"
#include "diskgraph/engine/records.hpp"
#include "diskgraph/io/read_stream.hpp"
#include "diskgraph/io/write_stream.hpp"

namespace dg {

// Loading ships whole vertex records (state plus adjacency list), which
// are variable-size; this is the record-level counterpart of the
// message-run merge. Runs are files of records in ascending-id order.

template <class P>
class VertexRecordRun {
 public:
  VertexRecordRun(const std::string& path, std::size_t buffer_bytes,
                  MemoryTracker* tracker)
      : stream_(path, 1, buffer_bytes, tracker) {
    advance();
  }

  bool done() const { return done_; }
  VertexId id() const { return get_u64(rec_.data()); }
  const std::vector<std::uint8_t>& record() const { return rec_; }

  void advance() {
    if (stream_.byte_pos() >= stream_.file_bytes()) {
      done_ = true;
      return;
    }
    std::uint8_t head[16];
    stream_.read_bytes(head, 16);
    std::uint64_t degree = get_u64(head + 8);
    std::size_t total = vertex_record_bytes<P>(degree);
    rec_.resize(total);
    std::memcpy(rec_.data(), head, 16);
    stream_.read_bytes(rec_.data() + 16, total - 16);
  }

 private:
  ReadStream stream_;
  std::vector<std::uint8_t> rec_;
  bool done_ = false;
};

// Sorts the records inside one received batch by vertex id (stable) and
// writes them as a run file.
template <class P>
void write_vertex_run(const std::vector<std::uint8_t>& payload,
                      const std::string& run_path, std::size_t buffer_bytes,
                      MemoryTracker* tracker) {
  struct View {
    std::uint64_t off;
    std::uint64_t len;
    VertexId id;
  };
  std::vector<View> views;
  std::uint64_t off = 0;
  while (off < payload.size()) {
    if (off + 16 > payload.size())
      throw FramingError("truncated vertex record in load batch");
    VertexId id = get_u64(payload.data() + off);
    std::uint64_t degree = get_u64(payload.data() + off + 8);
    std::uint64_t len = vertex_record_bytes<P>(degree);
    if (off + len > payload.size())
      throw FramingError("truncated vertex record in load batch");
    views.push_back({off, len, id});
    off += len;
  }
  std::stable_sort(views.begin(), views.end(),
                   [](const View& a, const View& b) { return a.id < b.id; });
  WriteStream out(run_path, buffer_bytes, tracker);
  for (const auto& v : views) out.append(payload.data() + v.off, v.len);
  out.close();
}

// K-way merge of vertex-record runs in ascending id order; duplicate ids
// across the input are a load error. Multi-pass when runs exceed `fanin`.
template <class P>
void merge_vertex_runs(
    std::vector<std::string> runs, std::size_t fanin, std::size_t buffer_bytes,
    const std::string& temp_dir, MemoryTracker* tracker,
    const std::function<void(const std::vector<std::uint8_t>&)>& record_fn) {
  std::uint64_t temp_seq = 0;
  while (runs.size() > fanin) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i < runs.size(); i += fanin) {
      std::size_t hi = std::min(runs.size(), i + fanin);
      std::vector<std::string> batch(runs.begin() + i, runs.begin() + hi);
      std::string tmp =
          temp_dir + "/vrun-" + std::to_string(++temp_seq);
      {
        WriteStream out(tmp, buffer_bytes, tracker);
        merge_vertex_runs<P>(std::move(batch), fanin, buffer_bytes, temp_dir,
                             tracker, [&](const std::vector<std::uint8_t>& rec) {
                               out.append(rec.data(), rec.size());
                             });
        out.close();
      }
      next.push_back(tmp);
    }
    runs = std::move(next);
  }

  std::vector<std::unique_ptr<VertexRecordRun<P>>> readers;
  for (const auto& r : runs)
    readers.push_back(
        std::make_unique<VertexRecordRun<P>>(r, buffer_bytes, tracker));

  struct Entry {
    VertexId id;
    std::size_t run;
    bool operator>(const Entry& o) const {
      return id != o.id ? id > o.id : run > o.run;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  for (std::size_t i = 0; i < readers.size(); ++i)
    if (!readers[i]->done()) heap.push({readers[i]->id(), i});

  bool have_prev = false;
  VertexId prev = 0;
  while (!heap.empty()) {
    Entry top = heap.top();
    heap.pop();
    auto& rd = *readers[top.run];
    if (have_prev && rd.id() == prev)
      throw Error("duplicate vertex id " + std::to_string(rd.id()) +
                  " in input graph");
    if (have_prev && rd.id() < prev)
      throw CorruptionError("vertex run out of order");
    prev = rd.id();
    have_prev = true;
    record_fn(rd.record());
    rd.advance();
    if (!rd.done()) heap.push({rd.id(), top.run});
  }
  readers.clear();
  for (const auto& r : runs) std::filesystem::remove(r);
}

}  // namespace dg

#endif
