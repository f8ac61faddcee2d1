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

#include "diskgraph/io/read_stream.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "diskgraph/common.hpp"

namespace dg {

ReadStream::ReadStream(const std::string& path, std::size_t item_size,
                       std::size_t buffer_bytes, MemoryTracker* tracker)
    : path_(path), item_size_(item_size), buf_cap_(buffer_bytes) {
  if (item_size_ == 0) throw ConfigError("read stream: item size must be > 0");
  if (buf_cap_ == 0) throw ConfigError("read stream: buffer must be > 0");
  fd_ = ::open(path.c_str(), O_RDONLY);
  if (fd_ < 0)
    throw IoError("cannot open " + path + ": " + std::strerror(errno));
  struct stat st{};
  if (::fstat(fd_, &st) != 0) {
    ::close(fd_);
    throw IoError("fstat failed on " + path);
  }
  file_bytes_ = static_cast<std::uint64_t>(st.st_size);
  buf_.resize(buf_cap_);
  alloc_ = TrackedAlloc(tracker, MemCategory::kStreamBuffer, buf_cap_);
}

ReadStream::~ReadStream() {
  if (fd_ >= 0) ::close(fd_);
}

void ReadStream::refill_at(std::uint64_t file_off) {
  buf_file_off_ = file_off;
  cursor_ = 0;
  fill_ = 0;
  if (file_off >= file_bytes_) return;
  std::size_t want = buf_cap_;
  std::uint8_t* dst = buf_.data();
  while (want > 0) {
    ssize_t n = ::pread(fd_, dst, want, static_cast<off_t>(file_off + fill_));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("read failed on " + path_ + ": " + std::strerror(errno));
    }
    if (n == 0) break;
    fill_ += static_cast<std::size_t>(n);
    dst += n;
    want -= static_cast<std::size_t>(n);
  }
  ++refills_;
  bytes_read_ += fill_;
}

void ReadStream::read_bytes(std::uint8_t* out, std::uint64_t n) {
  std::uint64_t got = 0;
  while (got < n) {
    if (cursor_ >= fill_) {
      std::uint64_t next_off = buf_file_off_ + fill_;
      if (next_off >= file_bytes_)
        throw CorruptionError("unexpected end of stream in " + path_);
      refill_at(next_off);
      if (fill_ == 0)
        throw CorruptionError("unexpected end of stream in " + path_);
    }
    std::size_t take = std::min<std::size_t>(fill_ - cursor_,
                                             static_cast<std::size_t>(n - got));
    std::memcpy(out + got, buf_.data() + cursor_, take);
    cursor_ += take;
    got += take;
  }
  std::uint64_t total = sub_item_ + n;
  item_pos_ += total / item_size_;
  sub_item_ = total % item_size_;
}

void ReadStream::read_items(std::uint8_t* out, std::uint64_t count) {
  if (count == 0) return;
  read_bytes(out, count * item_size_);
}

void ReadStream::read_items(std::vector<std::uint8_t>& out,
                            std::uint64_t count) {
  out.resize(count * item_size_);
  read_items(out.data(), count);
}

void ReadStream::skip_items(std::uint64_t count) {
  ++skip_calls_;
  items_skipped_ += count;
  if (log_skips_) skip_log_.push_back(count);
  if (count == 0) return;
  std::uint64_t target = abs_cursor() + count * item_size_;
  item_pos_ += count;
  if (target <= buf_file_off_ + fill_) {
    cursor_ = static_cast<std::size_t>(target - buf_file_off_);
    return;
  }
  if (target >= file_bytes_) {
    // Park at end; a subsequent read reports corruption.
    buf_file_off_ = file_bytes_;
    cursor_ = 0;
    fill_ = 0;
    return;
  }
  refill_at(target);
}

}  // namespace dg
