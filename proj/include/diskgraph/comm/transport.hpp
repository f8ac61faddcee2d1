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

#ifndef DISKGRAPH_COMM_TRANSPORT_HPP
#define DISKGRAPH_COMM_TRANSPORT_HPP

#include <cstdint>
#include <optional>

#include "diskgraph/comm/frame.hpp"

namespace dg {

// Control batches are demultiplexed by their ControlType byte into four
// queues so that the computing unit (allreduce), the receiving unit
// (barrier) and the coordinator never steal each other's traffic.
enum class ControlQueue : int {
  kCoordAllreduce = 0,  // requests, consumed by the coordinator (worker 0)
  kCoordBarrier = 1,    // requests, consumed by the coordinator (worker 0)
  kAllreduceResult = 2,
  kBarrierRelease = 3,
};

inline ControlQueue control_queue_for(ControlType t) {
  switch (t) {
    case ControlType::kAllreduceRequest:
      return ControlQueue::kCoordAllreduce;
    case ControlType::kBarrierRequest:
      return ControlQueue::kCoordBarrier;
    case ControlType::kAllreduceResult:
      return ControlQueue::kAllreduceResult;
    case ControlType::kBarrierRelease:
      return ControlQueue::kBarrierRelease;
  }
  return ControlQueue::kAllreduceResult;
}

// Point-to-point batch transport between the workers of one job.
//
// Guarantees: per-channel FIFO delivery within the data category
// (kData/kEndTag) and within each control queue; reliable exactly-once
// delivery; bounded in-flight data batches per channel (senders block).
//
// Threading: send() may be called concurrently from several threads;
// recv_data() has a single consumer (the receiving unit), and each
// control queue has a single consumer.
class Transport {
 public:
  virtual ~Transport() = default;

  virtual int rank() const = 0;
  virtual int num_workers() const = 0;

  // Blocks on backpressure; never drops a batch.
  virtual void send(int to, const Batch& batch) = 0;

  // Next data batch from any channel (per-channel order preserved).
  // Returns false when the transport is shut down and drained.
  virtual bool recv_data(int& from, Batch& batch) = 0;

  // Next batch on one control queue; false on shutdown.
  virtual bool recv_control(ControlQueue q, int& from, Batch& batch) = 0;

  // Wakes every blocked receiver/sender; subsequent recv calls drain
  // queued batches and then return false.
  virtual void shutdown() = 0;
};

}  // namespace dg

#endif
