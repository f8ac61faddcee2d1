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

#ifndef DISKGRAPH_COMM_FRAME_HPP
#define DISKGRAPH_COMM_FRAME_HPP

#include <cstdint>
#include <vector>

#include "diskgraph/common.hpp"

namespace dg {

// Wire frame: 1-byte kind, 8-byte superstep, 8-byte payload length,
// payload bytes; all little-endian.
enum class BatchKind : std::uint8_t { kData = 0, kEndTag = 1, kControl = 2 };

struct Batch {
  BatchKind kind = BatchKind::kData;
  std::uint64_t superstep = 0;
  std::vector<std::uint8_t> payload;
};

constexpr std::size_t kFrameHeaderBytes = 1 + 8 + 8;

inline void encode_frame_header(std::uint8_t* p, const Batch& b) {
  p[0] = static_cast<std::uint8_t>(b.kind);
  put_u64(p + 1, b.superstep);
  put_u64(p + 9, static_cast<std::uint64_t>(b.payload.size()));
}

// First payload byte of a control batch selects the coordination queue.
enum class ControlType : std::uint8_t {
  kAllreduceRequest = 0,
  kAllreduceResult = 1,
  kBarrierRequest = 2,
  kBarrierRelease = 3,
};

// Per-step global flags and the aggregator state exchanged between the
// computing units.
struct ControlRecord {
  bool any_message_sent = false;
  bool any_vertex_active = false;
  double aggregate = 0.0;
  std::uint64_t vertex_count = 0;  // summed; carries |V| out of loading

  static constexpr std::size_t kWireBytes = 1 + 1 + 8 + 8;

  void encode(std::uint8_t* p) const {
    p[0] = any_message_sent ? 1 : 0;
    p[1] = any_vertex_active ? 1 : 0;
    put_f64(p + 2, aggregate);
    put_u64(p + 10, vertex_count);
  }
  static ControlRecord decode(const std::uint8_t* p) {
    ControlRecord r;
    r.any_message_sent = p[0] != 0;
    r.any_vertex_active = p[1] != 0;
    r.aggregate = get_f64(p + 2);
    r.vertex_count = get_u64(p + 10);
    return r;
  }
};

// Associative, commutative merge of the user aggregate slot.
using AggregateMergeFn = double (*)(double, double);

inline ControlRecord merge_control(const ControlRecord& a,
                                   const ControlRecord& b,
                                   AggregateMergeFn agg_merge) {
  ControlRecord r;
  r.any_message_sent = a.any_message_sent || b.any_message_sent;
  r.any_vertex_active = a.any_vertex_active || b.any_vertex_active;
  r.aggregate = agg_merge(a.aggregate, b.aggregate);
  r.vertex_count = a.vertex_count + b.vertex_count;
  return r;
}

}  // namespace dg

#endif
