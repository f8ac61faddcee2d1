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

#ifndef DISKGRAPH_ALGORITHMS_ECHO_HPP
#define DISKGRAPH_ALGORITHMS_ECHO_HPP

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "diskgraph/engine/program.hpp"

namespace dg {

// Combiner-free test program: every vertex broadcasts its id to its
// neighbors for `rounds` steps and keeps an order-insensitive digest of
// the ids received last. Exercises the one-file-at-a-time sending path
// and multi-message inboxes, which combinable programs never do.
template <class W = Empty>
struct Echo {
  using Value = std::uint64_t;  // digest of the received id multiset
  using Weight = W;
  using Message = std::uint64_t;

  static constexpr bool kHasCombiner = false;

  std::uint64_t rounds = 2;

  static std::uint64_t digest(std::vector<std::uint64_t> ids) {
    std::sort(ids.begin(), ids.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint64_t x : ids) {
      h ^= x;
      h *= 1099511628211ULL;
    }
    return h;
  }

  void compute(VertexRef<Echo>& v, std::span<const EdgeOf<Echo>> edges,
               std::span<const Message> msgs, SuperstepContext<Echo>& ctx) {
    if (!msgs.empty())
      v.value() = digest(std::vector<std::uint64_t>(msgs.begin(), msgs.end()));
    if (ctx.superstep <= rounds) {
      for (const auto& e : edges) ctx.send(e.neighbor, v.id());
    } else {
      v.vote_to_halt();
    }
  }

  static std::string format_value(const Value& v) { return std::to_string(v); }
};

}  // namespace dg

#endif
