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

#ifndef DISKGRAPH_HASH_HPP
#define DISKGRAPH_HASH_HPP

#include <cassert>
#include <cstdint>

#include "diskgraph/common.hpp"

namespace dg {

// SplitMix64 finalizer. Partitioning must be identical across workers,
// runs and implementations, so the constants are pinned here.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

enum class PartitionMode { kNormal, kRecoded };

// Owner worker of a vertex. Recoded ids are dense (0..|V|-1), so plain
// modulo both balances and keeps id -> array position a closed form.
inline int hash_partition(VertexId id, int num_workers, PartitionMode mode) {
  assert(num_workers >= 1);
  if (mode == PartitionMode::kRecoded) {
    return static_cast<int>(id % static_cast<std::uint64_t>(num_workers));
  }
  return static_cast<int>(mix64(id) % static_cast<std::uint64_t>(num_workers));
}

// Dense-id <-> array-position bijection for the recoded mode.
inline VertexId recoded_id(std::uint64_t pos, int worker, int num_workers) {
  return pos * static_cast<std::uint64_t>(num_workers) +
         static_cast<std::uint64_t>(worker);
}

inline std::uint64_t recoded_pos(VertexId id, int num_workers) {
  return id / static_cast<std::uint64_t>(num_workers);
}

}  // namespace dg

#endif
