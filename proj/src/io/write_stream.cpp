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

#include "diskgraph/io/write_stream.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "diskgraph/common.hpp"

namespace dg {

WriteStream::WriteStream(const std::string& path, std::size_t buffer_bytes,
                         MemoryTracker* tracker)
    : path_(path) {
  if (buffer_bytes == 0) throw ConfigError("write stream: buffer must be > 0");
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd_ < 0)
    throw IoError("cannot create " + path + ": " + std::strerror(errno));
  buf_.resize(buffer_bytes);
  alloc_ = TrackedAlloc(tracker, MemCategory::kStreamBuffer, buffer_bytes);
}

WriteStream::~WriteStream() {
  try {
    close();
  } catch (...) {
  }
}

void WriteStream::raw_write(const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::write(fd_, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError("write failed on " + path_ + ": " + std::strerror(errno));
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

void WriteStream::flush_buffer() {
  if (used_ == 0) return;
  raw_write(buf_.data(), used_);
  used_ = 0;
  ++flushes_;
}

void WriteStream::append(const std::uint8_t* data, std::size_t n) {
  bytes_ += n;
  if (used_ + n > buf_.size()) flush_buffer();
  if (n >= buf_.size()) {
    // Oversized item: bypass the buffer with one direct write.
    raw_write(data, n);
    ++flushes_;
    return;
  }
  std::memcpy(buf_.data() + used_, data, n);
  used_ += n;
}

void WriteStream::close() {
  if (fd_ < 0) return;
  flush_buffer();
  if (::close(fd_) != 0) {
    fd_ = -1;
    throw IoError("close failed on " + path_);
  }
  fd_ = -1;
}

}  // namespace dg
