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

#ifndef DISKGRAPH_ENGINE_PROGRAM_HPP
#define DISKGRAPH_ENGINE_PROGRAM_HPP

#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "diskgraph/common.hpp"

namespace dg {

// A vertex program supplies, as nested types, the vertex value, the edge
// payload (Empty when unweighted) and the message payload; all three go
// through Codec<> and are fixed-size. A program with a combiner declares
//
//   static constexpr bool kHasCombiner = true;
//   static Message combine(const Message&, const Message&);   // assoc+comm
//   static Message identity();                                // neutral
//
// and may then run in recoded mode. compute() never touches engine state
// other than its own vertex and the context it is handed; one worker runs
// at most one compute() at a time.

template <class P>
struct EdgeOf {
  VertexId neighbor = 0;
  [[no_unique_address]] typename P::Weight weight{};
};

template <class P>
class VertexRef {
 public:
  VertexRef(VertexId id, VertexId old_id, std::uint64_t pos,
            std::uint64_t degree, typename P::Value& value, bool& active)
      : id_(id), old_id_(old_id), pos_(pos), degree_(degree), value_(value),
        active_(active) {}

  VertexId id() const { return id_; }
  VertexId original_id() const { return old_id_; }
  std::uint64_t position() const { return pos_; }  // index in the state array
  std::uint64_t degree() const { return degree_; }
  typename P::Value& value() { return value_; }
  const typename P::Value& value() const { return value_; }
  void vote_to_halt() { active_ = false; }
  bool active() const { return active_; }

 private:
  VertexId id_;
  VertexId old_id_;
  std::uint64_t pos_;
  std::uint64_t degree_;
  typename P::Value& value_;
  bool& active_;
};

template <class P>
class SuperstepContext {
 public:
  using SendFn = std::function<void(VertexId, const typename P::Message&)>;

  std::uint64_t superstep = 1;
  std::uint64_t num_vertices = 0;
  int num_workers = 1;
  int worker = 0;
  double aggregated = 0.0;  // merged contributions of the previous step

  void send(VertexId target, const typename P::Message& m) { send_fn(target, m); }
  void aggregate(double x) { aggregate_fn(x); }

  SendFn send_fn;
  std::function<void(double)> aggregate_fn;
};

// ---- optional-member detection ------------------------------------------

template <class P>
concept HasCombiner = requires { { P::kHasCombiner } -> std::convertible_to<bool>; } &&
                      P::kHasCombiner;

template <class P>
concept HasAggregateMerge = requires(double a, double b) {
  { P::merge_aggregate(a, b) } -> std::convertible_to<double>;
};

template <class P>
concept HasStepHooks = requires(P p, const SuperstepContext<P>& ctx,
                                const std::string& dir) {
  p.on_superstep_begin(ctx, dir);
  p.on_superstep_end(ctx, dir);
};

template <class P, class Row>
concept HasJobCompleteHook = requires(P p, const std::vector<Row>& rows,
                                      const std::string& dir) {
  p.on_job_complete(rows, dir);
};

template <class P>
double program_merge_aggregate(double a, double b) {
  if constexpr (HasAggregateMerge<P>)
    return P::merge_aggregate(a, b);
  else
    return a + b;
}

template <class P>
typename P::Message combiner_identity() {
  static_assert(HasCombiner<P>, "program has no combiner");
  return P::identity();
}

}  // namespace dg

#endif
