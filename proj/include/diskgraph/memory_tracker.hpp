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

#ifndef DISKGRAPH_MEMORY_TRACKER_HPP
#define DISKGRAPH_MEMORY_TRACKER_HPP

#include <array>
#include <atomic>
#include <cstdint>

namespace dg {

// Accounting for the structures the engine deliberately keeps resident:
// the vertex-state array, the digest/combine arrays of the recoded mode,
// stream buffers, and batch buffers. The big streams (edges, messages)
// must never show up here.
enum class MemCategory : int {
  kStateArray = 0,  // vertex states incl. the old-id column
  kDigestArray,     // recoded-mode incoming digest arrays (two generations)
  kCombineArray,    // recoded-mode outgoing combine array
  kStreamBuffer,    // read/write stream buffers of size b
  kBatchBuffer,     // send/receive batch staging
  kScratch,         // per-vertex adjacency/message staging, sort indexes
  kCount
};

class MemoryTracker {
 public:
  void add(MemCategory c, std::uint64_t bytes) {
    std::uint64_t cat_now =
        by_cat_[idx(c)].fetch_add(bytes, std::memory_order_relaxed) + bytes;
    raise(cat_peak_[idx(c)], cat_now);
    std::uint64_t now =
        total_.fetch_add(bytes, std::memory_order_relaxed) + bytes;
    raise(peak_, now);
  }

  void sub(MemCategory c, std::uint64_t bytes) {
    by_cat_[idx(c)].fetch_sub(bytes, std::memory_order_relaxed);
    total_.fetch_sub(bytes, std::memory_order_relaxed);
  }

  std::uint64_t current() const { return total_.load(std::memory_order_relaxed); }
  std::uint64_t peak() const { return peak_.load(std::memory_order_relaxed); }
  std::uint64_t current(MemCategory c) const {
    return by_cat_[idx(c)].load(std::memory_order_relaxed);
  }
  std::uint64_t peak(MemCategory c) const {
    return cat_peak_[idx(c)].load(std::memory_order_relaxed);
  }

 private:
  static int idx(MemCategory c) { return static_cast<int>(c); }
  static void raise(std::atomic<std::uint64_t>& slot, std::uint64_t value) {
    std::uint64_t seen = slot.load(std::memory_order_relaxed);
    while (value > seen &&
           !slot.compare_exchange_weak(seen, value, std::memory_order_relaxed)) {
    }
  }
  std::array<std::atomic<std::uint64_t>, static_cast<int>(MemCategory::kCount)>
      by_cat_{};
  std::array<std::atomic<std::uint64_t>, static_cast<int>(MemCategory::kCount)>
      cat_peak_{};
  std::atomic<std::uint64_t> total_{0};
  std::atomic<std::uint64_t> peak_{0};
};

// RAII registration of one tracked allocation.
class TrackedAlloc {
 public:
  TrackedAlloc() = default;
  TrackedAlloc(MemoryTracker* t, MemCategory c, std::uint64_t bytes)
      : tracker_(t), cat_(c), bytes_(bytes) {
    if (tracker_) tracker_->add(cat_, bytes_);
  }
  TrackedAlloc(const TrackedAlloc&) = delete;
  TrackedAlloc& operator=(const TrackedAlloc&) = delete;
  TrackedAlloc(TrackedAlloc&& o) noexcept { *this = std::move(o); }
  TrackedAlloc& operator=(TrackedAlloc&& o) noexcept {
    release();
    tracker_ = o.tracker_;
    cat_ = o.cat_;
    bytes_ = o.bytes_;
    o.tracker_ = nullptr;
    o.bytes_ = 0;
    return *this;
  }
  ~TrackedAlloc() { release(); }

  void resize(std::uint64_t bytes) {
    if (!tracker_) {
      bytes_ = bytes;
      return;
    }
    if (bytes > bytes_) tracker_->add(cat_, bytes - bytes_);
    if (bytes < bytes_) tracker_->sub(cat_, bytes_ - bytes);
    bytes_ = bytes;
  }

  void release() {
    if (tracker_) tracker_->sub(cat_, bytes_);
    tracker_ = nullptr;
    bytes_ = 0;
  }

 private:
  MemoryTracker* tracker_ = nullptr;
  MemCategory cat_ = MemCategory::kScratch;
  std::uint64_t bytes_ = 0;
};

}  // namespace dg

#endif
