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

#ifndef DISKGRAPH_IO_READ_STREAM_HPP
#define DISKGRAPH_IO_READ_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "diskgraph/memory_tracker.hpp"

namespace dg {

// Buffered sequential reader over a file of fixed-size items, with a
// skip(num_items) that touches the disk only when the target position
// falls outside the in-memory buffer. Single-threaded use only.
//
// Refill accounting: refills are bounded by the refill count of one full
// sequential scan, because every refill window starts at or after the end
// of the previous one.
class ReadStream {
 public:
  ReadStream(const std::string& path, std::size_t item_size,
             std::size_t buffer_bytes, MemoryTracker* tracker = nullptr);
  ReadStream(const ReadStream&) = delete;
  ReadStream& operator=(const ReadStream&) = delete;
  ~ReadStream();

  std::size_t item_size() const { return item_size_; }
  std::uint64_t file_bytes() const { return file_bytes_; }
  std::uint64_t num_items() const { return file_bytes_ / item_size_; }

  // Items consumed or skipped so far.
  std::uint64_t item_pos() const { return item_pos_; }
  bool at_end() const { return item_pos_ * item_size_ >= file_bytes_; }

  // Reads exactly `count` items into `out` (count * item_size bytes).
  // Throws CorruptionError if the stream ends early.
  void read_items(std::uint8_t* out, std::uint64_t count);
  void read_items(std::vector<std::uint8_t>& out, std::uint64_t count);

  // Advances past `count` items. If the target stays inside the current
  // buffer no file access happens; otherwise the file offset jumps and
  // the buffer is refilled once (unless the target is at or past EOF, in
  // which case the cursor parks at the end).
  void skip_items(std::uint64_t count);

  // Raw byte interface used by variable-size record readers.
  void read_bytes(std::uint8_t* out, std::uint64_t n);
  std::uint64_t byte_pos() const { return item_pos_ * item_size_ + sub_item_; }

  // instrumentation
  std::uint64_t refill_count() const { return refills_; }
  std::uint64_t bytes_read() const { return bytes_read_; }
  std::uint64_t skip_calls() const { return skip_calls_; }
  std::uint64_t items_skipped() const { return items_skipped_; }
  const std::vector<std::uint64_t>& skip_log() const { return skip_log_; }
  void enable_skip_log(bool on) { log_skips_ = on; }

 private:
  void refill_at(std::uint64_t file_off);
  std::uint64_t abs_cursor() const { return buf_file_off_ + cursor_; }

  int fd_ = -1;
  std::string path_;
  std::size_t item_size_;
  std::uint64_t file_bytes_ = 0;

  std::vector<std::uint8_t> buf_;
  std::size_t buf_cap_;
  std::size_t fill_ = 0;            // valid bytes in buf_
  std::size_t cursor_ = 0;          // read position within buf_
  std::uint64_t buf_file_off_ = 0;  // file offset of buf_[0]
  std::uint64_t item_pos_ = 0;
  std::uint64_t sub_item_ = 0;  // byte offset inside the current item

  std::uint64_t refills_ = 0;
  std::uint64_t bytes_read_ = 0;
  std::uint64_t skip_calls_ = 0;
  std::uint64_t items_skipped_ = 0;
  bool log_skips_ = false;
  std::vector<std::uint64_t> skip_log_;
  TrackedAlloc alloc_;
};

}  // namespace dg

#endif
