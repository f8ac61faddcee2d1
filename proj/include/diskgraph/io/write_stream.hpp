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

#ifndef DISKGRAPH_IO_WRITE_STREAM_HPP
#define DISKGRAPH_IO_WRITE_STREAM_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "diskgraph/memory_tracker.hpp"

namespace dg {

// Buffered append-only writer. Flushes only on a full buffer or close.
// Single-threaded use only.
class WriteStream {
 public:
  WriteStream(const std::string& path, std::size_t buffer_bytes,
              MemoryTracker* tracker = nullptr);
  WriteStream(const WriteStream&) = delete;
  WriteStream& operator=(const WriteStream&) = delete;
  ~WriteStream();

  void append(const std::uint8_t* data, std::size_t n);
  void close();

  bool is_open() const { return fd_ >= 0; }
  std::uint64_t bytes_written() const { return bytes_; }
  std::uint64_t flush_count() const { return flushes_; }
  const std::string& path() const { return path_; }

 private:
  void flush_buffer();
  void raw_write(const std::uint8_t* data, std::size_t n);

  int fd_ = -1;
  std::string path_;
  std::vector<std::uint8_t> buf_;
  std::size_t used_ = 0;
  std::uint64_t bytes_ = 0;
  std::uint64_t flushes_ = 0;
  TrackedAlloc alloc_;
};

}  // namespace dg

#endif
