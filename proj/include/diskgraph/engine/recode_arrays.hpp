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

#ifndef DISKGRAPH_ENGINE_RECODE_ARRAYS_HPP
#define DISKGRAPH_ENGINE_RECODE_ARRAYS_HPP

#include <cstdint>
#include <vector>

#include "diskgraph/engine/program.hpp"
#include "diskgraph/hash.hpp"
#include "diskgraph/memory_tracker.hpp"

namespace dg {

// In-memory digest of incoming messages for the recoded mode: one slot
// per owned vertex, indexed by state-array position. A slot equal to the
// combiner identity means "no message"; a genuine fold that lands exactly
// on the identity is therefore indistinguishable from silence. Programs
// must pick identities outside their message range (min with +inf, sums
// of positive terms).
template <class P>
class DigestArray {
  using Message = typename P::Message;

 public:
  DigestArray(std::size_t slots, MemoryTracker* tracker)
      : slots_(slots, P::identity()),
        alloc_(tracker, MemCategory::kDigestArray, slots * sizeof(Message)) {}

  std::size_t size() const { return slots_.size(); }

  void fold(std::size_t pos, const Message& m) {
    slots_[pos] = P::combine(slots_[pos], m);
  }

  bool has_message(std::size_t pos) const {
    return !(slots_[pos] == P::identity());
  }

  const Message& at(std::size_t pos) const { return slots_[pos]; }

 private:
  std::vector<Message> slots_;
  TrackedAlloc alloc_;
};

// Folds a serialized batch of envelopes into the digest of the owning
// worker. Targets that hash elsewhere mean the routing layer misbehaved.
template <class P>
void digest_envelopes(const std::uint8_t* payload, std::size_t bytes,
                      int rank, int num_workers, DigestArray<P>& digest) {
  const std::size_t env = 8 + Codec<typename P::Message>::size;
  if (bytes % env != 0)
    throw FramingError("data batch is not a whole number of messages");
  for (std::size_t off = 0; off < bytes; off += env) {
    VertexId target = get_u64(payload + off);
    if (hash_partition(target, num_workers, PartitionMode::kRecoded) != rank)
      throw ProtocolError("message for vertex " + std::to_string(target) +
                          " routed to worker " + std::to_string(rank));
    std::uint64_t pos = recoded_pos(target, num_workers);
    if (pos >= digest.size())
      throw ProtocolError("message for unknown vertex id " +
                          std::to_string(target));
    digest.fold(pos,
                Codec<typename P::Message>::decode(payload + off + 8));
  }
}

// Outgoing combine array, reused across destinations. Drain walks every
// slot in position order and resets the ones it emits, so the array is
// all-identity between picks and memory stays O(max owned vertices).
template <class P>
class CombineArray {
  using Message = typename P::Message;

 public:
  CombineArray(std::size_t slots, MemoryTracker* tracker)
      : slots_(slots, P::identity()),
        alloc_(tracker, MemCategory::kCombineArray, slots * sizeof(Message)) {}

  std::size_t size() const { return slots_.size(); }

  void fold(std::size_t pos, const Message& m) {
    slots_[pos] = P::combine(slots_[pos], m);
  }

  // Emits (target = n*pos + dest, payload) for every non-identity slot in
  // ascending position order, resetting each drained slot.
  template <class EmitFn>
  void drain(int dest, int num_workers, EmitFn&& emit) {
    for (std::size_t pos = 0; pos < slots_.size(); ++pos) {
      if (!(slots_[pos] == P::identity())) {
        emit(recoded_id(pos, dest, num_workers), slots_[pos]);
        slots_[pos] = P::identity();
      }
    }
  }

  bool all_identity() const {
    for (const auto& s : slots_)
      if (!(s == P::identity())) return false;
    return true;
  }

 private:
  std::vector<Message> slots_;
  TrackedAlloc alloc_;
};

}  // namespace dg

#endif
