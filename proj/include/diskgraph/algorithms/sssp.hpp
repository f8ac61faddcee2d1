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

#ifndef DISKGRAPH_ALGORITHMS_SSSP_HPP
#define DISKGRAPH_ALGORITHMS_SSSP_HPP

#include <algorithm>
#include <cstdio>
#include <limits>
#include <span>
#include <string>

#include "diskgraph/engine/program.hpp"

namespace dg {

// Single-source shortest paths with non-negative weights; on a graph
// whose edges all weigh 1 this is breadth-first search. Unreached
// vertices keep +inf and print as "inf". The source is the ORIGINAL id
// when the graph has been renumbered.
template <class W = Empty>
struct Sssp {
  using Value = double;
  using Weight = W;
  using Message = double;

  static constexpr bool kHasCombiner = true;
  static Message combine(const Message& a, const Message& b) {
    return std::min(a, b);
  }
  static Message identity() {
    return std::numeric_limits<double>::infinity();
  }

  VertexId source = 0;

  static double edge_weight(const EdgeOf<Sssp>& e) {
    if constexpr (std::is_same_v<W, Empty>)
      return 1.0;
    else
      return static_cast<double>(e.weight);
  }

  void compute(VertexRef<Sssp>& v, std::span<const EdgeOf<Sssp>> edges,
               std::span<const Message> msgs, SuperstepContext<Sssp>& ctx) {
    if (ctx.superstep == 1) {
      if (v.original_id() == source) {
        v.value() = 0.0;
        for (const auto& e : edges)
          ctx.send(e.neighbor, v.value() + edge_weight(e));
      } else {
        v.value() = identity();
      }
    } else {
      Message best = identity();
      for (Message m : msgs) best = std::min(best, m);
      if (best < v.value()) {
        v.value() = best;
        for (const auto& e : edges)
          ctx.send(e.neighbor, v.value() + edge_weight(e));
      }
    }
    v.vote_to_halt();
  }

  static std::string format_value(const Value& v) {
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
};

}  // namespace dg

#endif
