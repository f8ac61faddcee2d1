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

#ifndef DISKGRAPH_ENGINE_OMS_RING_HPP
#define DISKGRAPH_ENGINE_OMS_RING_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "diskgraph/io/split_stream.hpp"
#include "diskgraph/memory_tracker.hpp"

namespace dg {

// One outgoing message stream per destination worker, ordered into a
// ring. The computing unit appends; the sending unit scans from the last
// pick position so consecutive picks favor different destinations.
class OmsRing {
 public:
  OmsRing(const std::string& parent_dir, int num_workers, int self_rank,
          std::uint64_t split_bytes, std::size_t buffer_bytes,
          MemoryTracker* tracker) {
    streams_.reserve(num_workers);
    for (int i = 0; i < num_workers; ++i)
      streams_.push_back(std::make_unique<SplitStream>(
          parent_dir + "/" + std::to_string(i), split_bytes, buffer_bytes,
          tracker));
    // Different workers start scanning at different ring positions.
    scan_pos_ = self_rank;
  }

  SplitStream& stream(int dest) { return *streams_[dest]; }
  int size() const { return static_cast<int>(streams_.size()); }

  void append(int dest, const std::uint8_t* item, std::size_t n) {
    streams_[dest]->append(item, n);
  }

  // Closes every tail and snapshots per-destination no_w as the watermark
  // of `step`: files at or below it belong to steps <= step.
  void finalize_step(std::uint64_t step) {
    std::vector<std::uint64_t> wm(streams_.size());
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      streams_[i]->finalize();
      wm[i] = streams_[i]->fully_written();
    }
    std::lock_guard<std::mutex> lk(mu_);
    if (watermarks_.size() <= step) watermarks_.resize(step + 1);
    watermarks_[step] = std::move(wm);
  }

  // Upper bound on fetchable files of `step` for one destination: the
  // step watermark once the compute pass ended, the live no_w before.
  std::uint64_t send_limit(int dest, std::uint64_t step,
                           bool compute_finished) const {
    if (compute_finished) {
      std::lock_guard<std::mutex> lk(mu_);
      if (step < watermarks_.size() && !watermarks_[step].empty())
        return watermarks_[step][dest];
    }
    return streams_[dest]->fully_written();
  }

  struct Pick {
    int dest;
    std::vector<std::string> files;  // one file, or the whole pending range
  };

  // Scans the ring from the position after the previous pick. `take_all`
  // grabs every pending file of the destination (combiner path); otherwise
  // exactly one file is taken. Returns nullopt when no stream has a
  // pending file within its limit.
  std::optional<Pick> scan(std::uint64_t step, bool compute_finished,
                           bool take_all) {
    const int n = size();
    for (int t = 1; t <= n; ++t) {
      int j = (scan_pos_ + t) % n;
      std::uint64_t limit = send_limit(j, step, compute_finished);
      if (streams_[j]->consumed() >= limit) continue;
      Pick pick;
      pick.dest = j;
      do {
        auto f = streams_[j]->fetch_next();
        if (!f) break;
        pick.files.push_back(std::move(*f));
      } while (take_all && streams_[j]->consumed() < limit);
      scan_pos_ = j;
      return pick;
    }
    return std::nullopt;
  }

  // True when every stream is drained up to its `step` watermark.
  bool drained(std::uint64_t step) const {
    for (int j = 0; j < size(); ++j)
      if (streams_[j]->consumed() < send_limit(j, step, true)) return false;
    return true;
  }

  std::uint64_t bytes_appended() const {
    std::uint64_t total = 0;
    for (const auto& s : streams_) total += s->bytes_appended();
    return total;
  }
  std::uint64_t files_closed() const {
    std::uint64_t total = 0;
    for (const auto& s : streams_) total += s->fully_written();
    return total;
  }

 private:
  std::vector<std::unique_ptr<SplitStream>> streams_;
  mutable std::mutex mu_;  // guards watermarks_
  std::vector<std::vector<std::uint64_t>> watermarks_;
  int scan_pos_ = 0;
};

}  // namespace dg

#endif
