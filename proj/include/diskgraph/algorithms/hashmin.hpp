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

#ifndef DISKGRAPH_ALGORITHMS_HASHMIN_HPP
#define DISKGRAPH_ALGORITHMS_HASHMIN_HPP

#include <algorithm>
#include <limits>
#include <span>
#include <string>

#include "diskgraph/engine/program.hpp"

namespace dg {

// Connected components on an undirected graph: every vertex repeatedly
// adopts and forwards the minimum id seen in its component. The component
// label is non-increasing and converges within diameter+1 steps. Labels
// are original ids, so a run on a renumbered graph reports the same
// component names as a run on the raw one.
template <class W = Empty>
struct HashMin {
  using Value = std::uint64_t;  // current component id
  using Weight = W;
  using Message = std::uint64_t;

  static constexpr bool kHasCombiner = true;
  static Message combine(const Message& a, const Message& b) {
    return std::min(a, b);
  }
  static Message identity() {
    return std::numeric_limits<std::uint64_t>::max();
  }

  void compute(VertexRef<HashMin>& v, std::span<const EdgeOf<HashMin>> edges,
               std::span<const Message> msgs, SuperstepContext<HashMin>& ctx) {
    if (ctx.superstep == 1) {
      v.value() = v.original_id();
      for (const auto& e : edges) ctx.send(e.neighbor, v.value());
    } else {
      Message best = identity();
      for (Message m : msgs) best = std::min(best, m);
      if (best < v.value()) {
        v.value() = best;
        for (const auto& e : edges) ctx.send(e.neighbor, best);
      }
    }
    v.vote_to_halt();
  }

  static std::string format_value(const Value& v) { return std::to_string(v); }
};

}  // namespace dg

#endif
