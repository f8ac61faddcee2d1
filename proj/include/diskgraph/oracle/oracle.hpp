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

#ifndef DISKGRAPH_ORACLE_ORACLE_HPP
#define DISKGRAPH_ORACLE_ORACLE_HPP

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "diskgraph/common.hpp"
#include "diskgraph/engine/program.hpp"

namespace dg {

// Single-process, fully in-memory synchronous execution with the same
// program semantics as the engine: message delivery at the next step,
// reactivation on receipt, termination when everything is halted and no
// message is pending. Ground truth for the equivalence tests; messages
// reach compute() in ascending sender-id order for determinism.
template <class P>
class Oracle {
 public:
  using Value = typename P::Value;
  using Message = typename P::Message;
  using Edge = EdgeOf<P>;

  struct Vertex {
    Value value{};
    bool active = true;
    std::vector<Edge> edges;
  };

  struct Result {
    std::map<VertexId, Value> values;
    std::uint64_t steps = 0;
    bool step_limit_hit = false;  // partial result
    std::uint64_t messages_sent = 0;
  };

  explicit Oracle(P program) : program_(std::move(program)) {}

  void add_vertex(VertexId id, std::vector<Edge> edges) {
    Vertex v;
    v.edges = std::move(edges);
    if (!graph_.emplace(id, std::move(v)).second)
      throw Error("duplicate vertex id " + std::to_string(id));
  }

  void add_vertex(VertexId id, const std::vector<VertexId>& nbrs) {
    std::vector<Edge> edges(nbrs.size());
    for (std::size_t i = 0; i < nbrs.size(); ++i) edges[i].neighbor = nbrs[i];
    add_vertex(id, std::move(edges));
  }

  // Observes every message as (step, sender, target, payload).
  std::function<void(std::uint64_t, VertexId, VertexId, const Message&)>
      message_probe;

  Result run(std::uint64_t max_steps = 100000) {
    Result result;
    std::map<VertexId, std::vector<std::pair<VertexId, Message>>> pending;
    double aggregated = 0.0;

    for (std::uint64_t step = 1;; ++step) {
      if (step > max_steps) {
        result.step_limit_hit = true;
        break;
      }
      std::map<VertexId, std::vector<std::pair<VertexId, Message>>> next;
      bool any_msg = false;
      bool any_active = false;
      double agg_next = 0.0;
      bool agg_touched = false;

      for (auto& [id, v] : graph_) {
        auto inbox = pending.find(id);
        bool has_msgs = inbox != pending.end() && !inbox->second.empty();
        if (!v.active && !has_msgs) continue;

        std::vector<Message> msgs;
        if (has_msgs) {
          auto& raw = inbox->second;
          std::stable_sort(raw.begin(), raw.end(),
                           [](const auto& a, const auto& b) {
                             return a.first < b.first;
                           });
          if constexpr (HasCombiner<P>) {
            Message folded = raw.front().second;
            for (std::size_t i = 1; i < raw.size(); ++i)
              folded = P::combine(folded, raw[i].second);
            msgs.push_back(folded);
          } else {
            for (auto& [sender, m] : raw) msgs.push_back(m);
          }
        }

        SuperstepContext<P> ctx;
        ctx.superstep = step;
        ctx.num_vertices = graph_.size();
        ctx.num_workers = 1;
        ctx.worker = 0;
        ctx.aggregated = aggregated;
        VertexId sender = id;
        ctx.send_fn = [&](VertexId target, const Message& m) {
          if (graph_.find(target) == graph_.end())
            throw ProtocolError("message for unknown vertex id " +
                                std::to_string(target));
          next[target].emplace_back(sender, m);
          any_msg = true;
          ++result.messages_sent;
          if (message_probe) message_probe(step, sender, target, m);
        };
        ctx.aggregate_fn = [&](double x) {
          agg_next = agg_touched ? program_merge_aggregate<P>(agg_next, x) : x;
          agg_touched = true;
        };

        v.active = true;
        VertexRef<P> ref(id, id, 0, v.edges.size(), v.value, v.active);
        program_.compute(ref, v.edges, msgs, ctx);
        any_active = any_active || v.active;
      }

      result.steps = step;
      aggregated = agg_next;
      pending = std::move(next);
      if (!any_msg && !any_active) break;
    }

    for (const auto& [id, v] : graph_) result.values[id] = v.value;
    return result;
  }

 private:
  P program_;
  std::map<VertexId, Vertex> graph_;
};

}  // namespace dg

#endif
