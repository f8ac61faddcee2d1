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

#ifndef DISKGRAPH_ALGORITHMS_PAGERANK_HPP
#define DISKGRAPH_ALGORITHMS_PAGERANK_HPP

#include <cstdio>
#include <span>
#include <string>

#include "diskgraph/engine/program.hpp"

namespace dg {

// Fixed-round PageRank. Step 1 seeds every rank with 1/|V|; later steps
// compute 0.15/|V| + 0.85 * sum(msgs) and keep distributing rank/degree
// to out-neighbors until the configured round count. Vertices with no
// out-edges leak their rank (no dangling redistribution).
template <class W = Empty>
struct PageRank {
  using Value = double;
  using Weight = W;
  using Message = double;

  static constexpr bool kHasCombiner = true;
  static Message combine(const Message& a, const Message& b) { return a + b; }
  static Message identity() { return 0.0; }

  std::uint64_t rounds = 10;

  void compute(VertexRef<PageRank>& v, std::span<const EdgeOf<PageRank>> edges,
               std::span<const Message> msgs, SuperstepContext<PageRank>& ctx) {
    if (ctx.superstep == 1) {
      v.value() = 1.0 / static_cast<double>(ctx.num_vertices);
    } else {
      double sum = 0.0;
      for (double m : msgs) sum += m;
      v.value() = 0.15 / static_cast<double>(ctx.num_vertices) + 0.85 * sum;
    }
    if (ctx.superstep < rounds) {
      double share = v.value() / static_cast<double>(v.degree());
      for (const auto& e : edges) ctx.send(e.neighbor, share);
    } else {
      v.vote_to_halt();
    }
  }

  static std::string format_value(const Value& v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
};

}  // namespace dg

#endif
