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

#ifndef DISKGRAPH_CONFIG_HPP
#define DISKGRAPH_CONFIG_HPP

#include <cstdint>
#include <string>

namespace dg {

enum class RunMode { kNormal, kRecoded };
enum class TransportKind { kProcessSockets, kSimulated };

// Full description of one job. Serializes to a flat key=value file, one
// key per line, which is how worker processes receive it.
struct JobConfig {
  int num_workers = 1;
  std::size_t stream_buffer_b = 64 * 1024;       // b
  std::uint64_t split_size_B = 8 * 1024 * 1024;  // file-chunk bound
  std::size_t merge_fanin_k = 1000;              // k
  RunMode mode = RunMode::kNormal;
  TransportKind transport = TransportKind::kSimulated;

  std::string store_path;   // shared store directory (graph + manifest)
  std::string output_path;  // result parts + stats
  std::string local_root;   // per-worker scratch parent; "" = <store>/_local

  std::string algorithm;  // pagerank | hashmin | sssp | echo
  std::uint64_t steps = 10;          // pagerank / echo rounds
  std::uint64_t max_steps = 100000;  // safety cap for convergence jobs
  std::uint64_t source = 0;          // sssp source vertex

  std::uint64_t seed = 0;            // simulated-transport delay seed
  std::uint32_t sim_delay_us = 0;    // max per-batch delay, 0 = none
  std::size_t channel_capacity = 4;  // in-flight batches per channel

  // Binary to exec for socket-mode workers; defaults to /proc/self/exe.
  std::string worker_binary;

  std::string local_dir(int rank) const;
  std::string scratch_dir(int rank) const;  // wiped per job

  void validate(std::size_t max_item_bytes) const;

  void save(const std::string& path) const;
  static JobConfig load(const std::string& path);
};

}  // namespace dg

#endif
