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

#ifndef DISKGRAPH_ENGINE_RECORDS_HPP
#define DISKGRAPH_ENGINE_RECORDS_HPP

#include <cstdint>
#include <vector>

#include "diskgraph/common.hpp"
#include "diskgraph/engine/program.hpp"

namespace dg {

// On-disk layouts, all little-endian:
//   state row    : id u64 | value | active u8 | degree u64
//   edge item    : neighbor u64 | weight
//   envelope     : target u64 | message
//   vertex record: id u64 | degree u64 | active u8 | value | edge items...
// The vertex record is the self-framing unit shipped during loading.

template <class P>
struct StateRow {
  VertexId id = 0;
  VertexId old_id = 0;  // original id in recoded mode; equals id otherwise
  typename P::Value value{};
  bool active = true;
  std::uint64_t degree = 0;
};

template <class P>
constexpr std::size_t state_row_disk_bytes() {
  return 8 + Codec<typename P::Value>::size + 1 + 8;
}

template <class P>
constexpr std::size_t edge_item_bytes() {
  return 8 + Codec<typename P::Weight>::size;
}

template <class P>
constexpr std::size_t envelope_bytes() {
  return 8 + Codec<typename P::Message>::size;
}

// old_id u64 | degree u64, in state-array order
constexpr std::size_t kRecodedRowBytes = 16;

template <class P>
void encode_state_row(std::uint8_t* p, const StateRow<P>& r) {
  put_u64(p, r.id);
  Codec<typename P::Value>::encode(p + 8, r.value);
  p[8 + Codec<typename P::Value>::size] = r.active ? 1 : 0;
  put_u64(p + 9 + Codec<typename P::Value>::size, r.degree);
}

template <class P>
StateRow<P> decode_state_row(const std::uint8_t* p) {
  StateRow<P> r;
  r.id = get_u64(p);
  r.old_id = r.id;
  r.value = Codec<typename P::Value>::decode(p + 8);
  r.active = p[8 + Codec<typename P::Value>::size] != 0;
  r.degree = get_u64(p + 9 + Codec<typename P::Value>::size);
  return r;
}

template <class P>
void encode_edge_item(std::uint8_t* p, const EdgeOf<P>& e) {
  put_u64(p, e.neighbor);
  Codec<typename P::Weight>::encode(p + 8, e.weight);
}

template <class P>
EdgeOf<P> decode_edge_item(const std::uint8_t* p) {
  EdgeOf<P> e;
  e.neighbor = get_u64(p);
  e.weight = Codec<typename P::Weight>::decode(p + 8);
  return e;
}

template <class P>
void encode_envelope(std::uint8_t* p, VertexId target,
                     const typename P::Message& m) {
  put_u64(p, target);
  Codec<typename P::Message>::encode(p + 8, m);
}

template <class P>
typename P::Message decode_envelope_payload(const std::uint8_t* p) {
  return Codec<typename P::Message>::decode(p + 8);
}

template <class P>
std::size_t vertex_record_bytes(std::uint64_t degree) {
  return 17 + Codec<typename P::Value>::size + degree * edge_item_bytes<P>();
}

// Serializes a vertex record into `out` (appended).
template <class P>
void append_vertex_record(std::vector<std::uint8_t>& out, const StateRow<P>& r,
                          const std::vector<EdgeOf<P>>& edges) {
  std::size_t base = out.size();
  out.resize(base + vertex_record_bytes<P>(edges.size()));
  std::uint8_t* p = out.data() + base;
  put_u64(p, r.id);
  put_u64(p + 8, static_cast<std::uint64_t>(edges.size()));
  p[16] = r.active ? 1 : 0;
  Codec<typename P::Value>::encode(p + 17, r.value);
  p += 17 + Codec<typename P::Value>::size;
  for (const auto& e : edges) {
    encode_edge_item<P>(p, e);
    p += edge_item_bytes<P>();
  }
}

}  // namespace dg

#endif
