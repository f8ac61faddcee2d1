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

#include "diskgraph/io/merge.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <memory>
#include <numeric>
#include <queue>

#include "diskgraph/common.hpp"
#include "diskgraph/io/read_stream.hpp"
#include "diskgraph/io/write_stream.hpp"

namespace dg {

namespace {

class RunReader {
 public:
  RunReader(const std::string& path, std::size_t record_size,
            std::size_t buffer_bytes, MemoryTracker* tracker)
      : path_(path), stream_(path, record_size, buffer_bytes, tracker) {
    if (stream_.file_bytes() % record_size != 0)
      throw CorruptionError("run file size not a record multiple: " + path);
    cur_.resize(record_size);
    advance();
  }

  bool done() const { return done_; }
  const std::uint8_t* record() const { return cur_.data(); }
  std::uint64_t key() const { return get_u64(cur_.data()); }

  void advance() {
    if (stream_.at_end()) {
      done_ = true;
      return;
    }
    std::uint64_t prev = done_ || first_ ? 0 : key();
    bool had_prev = !first_ && !done_;
    stream_.read_items(cur_.data(), 1);
    first_ = false;
    if (had_prev && key() < prev)
      throw ProtocolError("unsorted merge run: " + path_);
  }

  std::uint64_t bytes_read() const { return stream_.bytes_read(); }

 private:
  std::string path_;
  ReadStream stream_;
  std::vector<std::uint8_t> cur_;
  bool first_ = true;
  bool done_ = false;
};

struct HeapEntry {
  std::uint64_t key;
  std::size_t run;
  bool operator>(const HeapEntry& o) const {
    return key != o.key ? key > o.key : run > o.run;
  }
};

// Merges one batch of runs into `sink`, folding equal targets when a
// combiner is present.
void merge_batch(const std::vector<std::string>& runs, const MergeOptions& opt,
                 const RecordSink& sink, MergeStats& stats) {
  const std::size_t rec_size = 8 + opt.payload_size;
  std::vector<std::unique_ptr<RunReader>> readers;
  readers.reserve(runs.size());
  for (const auto& r : runs)
    readers.push_back(std::make_unique<RunReader>(r, rec_size,
                                                  opt.buffer_bytes,
                                                  opt.tracker));
  stats.max_fanin = std::max<std::uint64_t>(stats.max_fanin, readers.size());

  std::priority_queue<HeapEntry, std::vector<HeapEntry>,
                      std::greater<HeapEntry>>
      heap;
  for (std::size_t i = 0; i < readers.size(); ++i)
    if (!readers[i]->done()) heap.push({readers[i]->key(), i});

  std::vector<std::uint8_t> acc(rec_size);
  bool acc_valid = false;

  auto flush_acc = [&] {
    if (acc_valid) {
      sink(acc.data());
      ++stats.records_out;
      acc_valid = false;
    }
  };

  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    RunReader& rd = *readers[top.run];
    const std::uint8_t* rec = rd.record();
    if (opt.combiner) {
      if (acc_valid && get_u64(acc.data()) == top.key) {
        opt.combiner(acc.data() + 8, rec + 8);
      } else {
        flush_acc();
        std::memcpy(acc.data(), rec, rec_size);
        acc_valid = true;
      }
    } else {
      sink(rec);
      ++stats.records_out;
    }
    rd.advance();
    if (!rd.done()) heap.push({rd.key(), top.run});
  }
  flush_acc();
  for (auto& r : readers) stats.bytes_in += r->bytes_read();
}

MergeStats merge_impl(std::vector<std::string> runs, const std::string& out_path,
                      const RecordSink* final_sink, const MergeOptions& opt) {
  MergeStats stats;
  std::vector<std::string> temps;
  const std::string temp_dir =
      opt.temp_dir.empty()
          ? (out_path.empty() ? std::string(".")
                              : std::filesystem::path(out_path).parent_path()
                                    .string())
          : opt.temp_dir;

  if (runs.empty()) {
    if (!out_path.empty()) WriteStream(out_path, opt.buffer_bytes).close();
    return stats;
  }

  bool first_pass = true;
  std::uint64_t temp_seq = 0;
  while (runs.size() > opt.fanin) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i < runs.size(); i += opt.fanin) {
      std::size_t hi = std::min(runs.size(), i + opt.fanin);
      std::vector<std::string> batch(runs.begin() + i, runs.begin() + hi);
      char name[32];
      std::snprintf(name, sizeof(name), "/mrg-%06llu",
                    static_cast<unsigned long long>(++temp_seq));
      std::string tmp = temp_dir + name;
      {
        WriteStream out(tmp, opt.buffer_bytes, opt.tracker);
        RecordSink sink = [&](const std::uint8_t* rec) {
          out.append(rec, 8 + opt.payload_size);
        };
        merge_batch(batch, opt, sink, stats);
        stats.bytes_out += out.bytes_written();
        out.close();
      }
      for (const auto& b : batch)
        if (!first_pass || opt.delete_inputs) std::filesystem::remove(b);
      next.push_back(tmp);
    }
    ++stats.passes;
    first_pass = false;
    runs = std::move(next);
  }

  // Final pass over at most `fanin` runs.
  if (final_sink) {
    merge_batch(runs, opt, *final_sink, stats);
  } else {
    WriteStream out(out_path, opt.buffer_bytes, opt.tracker);
    RecordSink sink = [&](const std::uint8_t* rec) {
      out.append(rec, 8 + opt.payload_size);
    };
    merge_batch(runs, opt, sink, stats);
    stats.bytes_out += out.bytes_written();
    out.close();
  }
  ++stats.passes;
  for (const auto& r : runs)
    if (!first_pass || opt.delete_inputs) std::filesystem::remove(r);
  return stats;
}

}  // namespace

MergeStats kway_merge(const std::vector<std::string>& runs,
                      const std::string& out_path, const MergeOptions& opt) {
  return merge_impl(runs, out_path, nullptr, opt);
}

MergeStats kway_merge_to_sink(const std::vector<std::string>& runs,
                              const RecordSink& sink, const MergeOptions& opt) {
  return merge_impl(runs, "", &sink, opt);
}

void sort_message_records(std::uint8_t* data, std::size_t bytes,
                          std::size_t payload_size) {
  const std::size_t rec = 8 + payload_size;
  if (bytes % rec != 0)
    throw CorruptionError("message buffer size not a record multiple");
  const std::size_t n = bytes / rec;
  std::vector<std::uint32_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  std::stable_sort(index.begin(), index.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return get_u64(data + a * rec) < get_u64(data + b * rec);
                   });
  std::vector<std::uint8_t> tmp(bytes);
  for (std::size_t i = 0; i < n; ++i)
    std::memcpy(tmp.data() + i * rec, data + index[i] * rec, rec);
  std::memcpy(data, tmp.data(), bytes);
}

void sort_message_file(const std::string& path, std::size_t payload_size,
                       MemoryTracker* tracker) {
  std::uint64_t size = std::filesystem::file_size(path);
  std::vector<std::uint8_t> buf(size);
  TrackedAlloc alloc(tracker, MemCategory::kScratch, size);
  {
    ReadStream in(path, 1, 64 * 1024);
    in.read_items(buf.data(), size);
  }
  sort_message_records(buf.data(), size, payload_size);
  WriteStream out(path, 64 * 1024);
  out.append(buf.data(), size);
  out.close();
}

}  // namespace dg
