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

#include "diskgraph/io/split_stream.hpp"

#include <cstdio>
#include <filesystem>

#include "diskgraph/common.hpp"

namespace dg {

SplitStream::SplitStream(const std::string& dir, std::uint64_t split_bytes,
                         std::size_t buffer_bytes, MemoryTracker* tracker)
    : dir_(dir),
      split_bytes_(split_bytes),
      buffer_bytes_(buffer_bytes),
      tracker_(tracker) {
  if (split_bytes_ == 0) throw ConfigError("split stream: split size must be > 0");
  std::filesystem::create_directories(dir_);
}

SplitStream::~SplitStream() {
  try {
    if (tail_) tail_->close();
  } catch (...) {
  }
}

std::string SplitStream::file_path(std::uint64_t seq) const {
  char name[32];
  std::snprintf(name, sizeof(name), "part-%06llu",
                static_cast<unsigned long long>(seq));
  return dir_ + "/" + name;
}

void SplitStream::open_tail() {
  tail_seq_ = no_w_.load(std::memory_order_relaxed) + 1;
  tail_ = std::make_unique<WriteStream>(file_path(tail_seq_), buffer_bytes_,
                                        tracker_);
  tail_bytes_ = 0;
}

void SplitStream::close_tail() {
  tail_->close();
  tail_.reset();
  no_w_.fetch_add(1, std::memory_order_release);
  if (on_file_ready_) on_file_ready_();
}

void SplitStream::append(const std::uint8_t* item, std::size_t n) {
  if (tail_ && tail_bytes_ > 0 && tail_bytes_ + n > split_bytes_) close_tail();
  if (!tail_) open_tail();
  tail_->append(item, n);
  tail_bytes_ += n;
  bytes_appended_ += n;
  ++items_appended_;
}

void SplitStream::finalize() {
  if (tail_ && tail_bytes_ > 0) {
    close_tail();
  } else if (tail_) {
    // Empty open tail: drop it rather than publishing an empty file.
    std::string p = tail_->path();
    tail_->close();
    tail_.reset();
    std::filesystem::remove(p);
  }
}

std::optional<std::string> SplitStream::fetch_next() {
  std::uint64_t s = no_s_.load(std::memory_order_relaxed);
  if (s >= no_w_.load(std::memory_order_acquire)) return std::nullopt;
  no_s_.store(s + 1, std::memory_order_release);
  return file_path(s + 1);
}

}  // namespace dg
