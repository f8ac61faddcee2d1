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

#include "diskgraph/comm/control_plane.hpp"

#include <map>

#include "diskgraph/common.hpp"

namespace dg {

namespace {

Batch make_control(ControlType type, std::uint64_t step,
                   const ControlRecord* rec) {
  Batch b;
  b.kind = BatchKind::kControl;
  b.superstep = step;
  b.payload.resize(1 + (rec ? ControlRecord::kWireBytes : 0));
  b.payload[0] = static_cast<std::uint8_t>(type);
  if (rec) rec->encode(b.payload.data() + 1);
  return b;
}

}  // namespace

ControlPlane::ControlPlane(Transport& transport, AggregateMergeFn agg_merge)
    : transport_(transport), agg_merge_(agg_merge) {
  if (transport_.rank() == 0) {
    allreduce_service_ = std::thread([this] {
      serve(ControlQueue::kCoordAllreduce, ControlType::kAllreduceRequest,
            ControlType::kAllreduceResult);
    });
    barrier_service_ = std::thread([this] {
      serve(ControlQueue::kCoordBarrier, ControlType::kBarrierRequest,
            ControlType::kBarrierRelease);
    });
  }
}

ControlPlane::~ControlPlane() { stop(); }

void ControlPlane::stop() {
  if (allreduce_service_.joinable()) allreduce_service_.join();
  if (barrier_service_.joinable()) barrier_service_.join();
}

void ControlPlane::serve(ControlQueue queue, ControlType request,
                         ControlType reply) {
  const int n = transport_.num_workers();
  struct Pending {
    int count = 0;
    ControlRecord merged;
  };
  std::map<std::uint64_t, Pending> pending;
  int from = 0;
  Batch b;
  while (transport_.recv_control(queue, from, b)) {
    if (b.payload.empty() ||
        b.payload[0] != static_cast<std::uint8_t>(request))
      throw ProtocolError("unexpected control batch on coordinator queue");
    Pending& p = pending[b.superstep];
    if (request == ControlType::kAllreduceRequest) {
      ControlRecord rec = ControlRecord::decode(b.payload.data() + 1);
      p.merged = p.count == 0 ? rec : merge_control(p.merged, rec, agg_merge_);
    }
    if (++p.count == n) {
      const ControlRecord* rec =
          request == ControlType::kAllreduceRequest ? &p.merged : nullptr;
      for (int w = 0; w < n; ++w)
        transport_.send(w, make_control(reply, b.superstep, rec));
      pending.erase(b.superstep);
    }
  }
}

ControlRecord ControlPlane::allreduce(std::uint64_t step,
                                      const ControlRecord& local) {
  transport_.send(0, make_control(ControlType::kAllreduceRequest, step, &local));
  int from = 0;
  Batch b;
  if (!transport_.recv_control(ControlQueue::kAllreduceResult, from, b))
    throw ProtocolError("transport closed during allreduce");
  if (b.superstep != step)
    throw ProtocolError("allreduce result for wrong step");
  return ControlRecord::decode(b.payload.data() + 1);
}

void ControlPlane::barrier(std::uint64_t step) {
  transport_.send(0, make_control(ControlType::kBarrierRequest, step, nullptr));
  int from = 0;
  Batch b;
  if (!transport_.recv_control(ControlQueue::kBarrierRelease, from, b))
    throw ProtocolError("transport closed during barrier");
  if (b.superstep != step) throw ProtocolError("barrier release for wrong step");
}

}  // namespace dg
