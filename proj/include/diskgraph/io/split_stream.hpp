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

#ifndef DISKGRAPH_IO_SPLIT_STREAM_HPP
#define DISKGRAPH_IO_SPLIT_STREAM_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "diskgraph/io/write_stream.hpp"
#include "diskgraph/memory_tracker.hpp"

namespace dg {

// A logical stream broken into files part-000001, part-000002, ... inside
// one directory, so the head can be consumed while the tail is appended.
// Each closed file holds at most `split_bytes`, unless it contains a
// single item larger than that.
//
// Threading contract: exactly one appender thread and one fetcher thread.
// no_w / no_s are the only shared state; the fetcher never touches the
// open tail file.
class SplitStream {
 public:
  SplitStream(const std::string& dir, std::uint64_t split_bytes,
              std::size_t buffer_bytes, MemoryTracker* tracker = nullptr);
  ~SplitStream();

  // appender side ---------------------------------------------------------
  void append(const std::uint8_t* item, std::size_t n);
  // Closes the current tail (if non-empty) so it becomes fetchable. The
  // next append opens a fresh file, so this doubles as a per-superstep
  // finalize.
  void finalize();

  // fetcher side ------------------------------------------------------------
  // Returns the path of the next fully-written file and advances no_s,
  // or nullopt when none is pending. The caller owns (and may delete)
  // the returned file.
  std::optional<std::string> fetch_next();

  std::uint64_t fully_written() const {
    return no_w_.load(std::memory_order_acquire);
  }
  std::uint64_t consumed() const {
    return no_s_.load(std::memory_order_acquire);
  }
  std::uint64_t bytes_appended() const { return bytes_appended_; }
  std::uint64_t items_appended() const { return items_appended_; }

  // Invoked (from the appender thread) every time a file is closed.
  void set_file_ready_callback(std::function<void()> cb) {
    on_file_ready_ = std::move(cb);
  }

  const std::string& dir() const { return dir_; }
  std::string file_path(std::uint64_t seq) const;

 private:
  void open_tail();
  void close_tail();

  std::string dir_;
  std::uint64_t split_bytes_;
  std::size_t buffer_bytes_;
  MemoryTracker* tracker_;

  std::unique_ptr<WriteStream> tail_;
  std::uint64_t tail_bytes_ = 0;
  std::uint64_t tail_seq_ = 0;  // sequence number of the open tail

  std::atomic<std::uint64_t> no_w_{0};  // last fully-written file
  std::atomic<std::uint64_t> no_s_{0};  // last consumed file

  std::uint64_t bytes_appended_ = 0;
  std::uint64_t items_appended_ = 0;
  std::function<void()> on_file_ready_;
};

}  // namespace dg

#endif
