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

#ifndef DISKGRAPH_IO_MERGE_HPP
#define DISKGRAPH_IO_MERGE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "diskgraph/memory_tracker.hpp"

namespace dg {

// In-place fold of one serialized message payload into an accumulator.
using CombineFn = std::function<void(std::uint8_t* acc, const std::uint8_t* in)>;

// Consumer of merged records (8-byte target + payload).
using RecordSink = std::function<void(const std::uint8_t* rec)>;

struct MergeOptions {
  std::size_t payload_size = 0;           // bytes per message payload
  std::size_t fanin = 1000;               // k
  std::size_t buffer_bytes = 64 * 1024;   // b, per run/output buffer
  CombineFn combiner;                     // empty = keep duplicates (run-stable)
  MemoryTracker* tracker = nullptr;
  bool delete_inputs = true;
  std::string temp_dir;                   // for intermediate passes
};

struct MergeStats {
  std::uint64_t passes = 0;
  std::uint64_t max_fanin = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  std::uint64_t records_out = 0;
};

// Merges sorted runs of fixed-size message records into one run sorted by
// target id, in at most ceil(log_k(#runs)) passes, holding (k+1) stream
// buffers. With a combiner, every distinct target appears exactly once in
// the output, folded over its group. Without one, records with equal
// targets keep run order (stable by run index). Runs that are not sorted
// raise ProtocolError.
MergeStats kway_merge(const std::vector<std::string>& runs,
                      const std::string& out_path, const MergeOptions& opt);

// Same, but the final pass is streamed into `sink` instead of a file.
MergeStats kway_merge_to_sink(const std::vector<std::string>& runs,
                              const RecordSink& sink, const MergeOptions& opt);

// Sorts one unsorted file of message records wholly in memory (files
// produced by a splittable stream are bounded by the split size) and
// rewrites it in place, making it usable as a merge run.
void sort_message_file(const std::string& path, std::size_t payload_size,
                       MemoryTracker* tracker = nullptr);

// Sorts records in place inside a raw buffer of n records.
void sort_message_records(std::uint8_t* data, std::size_t bytes,
                          std::size_t payload_size);

}  // namespace dg

#endif
