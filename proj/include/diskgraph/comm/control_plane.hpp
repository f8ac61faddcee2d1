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

#ifndef DISKGRAPH_COMM_CONTROL_PLANE_HPP
#define DISKGRAPH_COMM_CONTROL_PLANE_HPP

#include <thread>

#include "diskgraph/comm/frame.hpp"
#include "diskgraph/comm/transport.hpp"

namespace dg {

// Coordinator-based global synchronization over the regular transport.
// Worker 0 runs two service threads that collect one request per worker
// per step and broadcast the merged result / release. Requests for
// different steps may be in flight at once (the computing unit can run
// one step ahead of the receiving unit).
class ControlPlane {
 public:
  ControlPlane(Transport& transport, AggregateMergeFn agg_merge);
  ~ControlPlane();

  ControlPlane(const ControlPlane&) = delete;
  ControlPlane& operator=(const ControlPlane&) = delete;

  // Called once per step by the computing unit. Returns the identical
  // merged record on every worker, without waiting for the step's data
  // transmission to finish.
  ControlRecord allreduce(std::uint64_t step, const ControlRecord& local);

  // Called once per step by the receiving unit after it has counted all
  // end tags; returns only after every worker has entered.
  void barrier(std::uint64_t step);

  // Joins the coordinator threads; call after Transport::shutdown().
  void stop();

 private:
  void serve(ControlQueue queue, ControlType request, ControlType reply);

  Transport& transport_;
  AggregateMergeFn agg_merge_;
  std::thread allreduce_service_;
  std::thread barrier_service_;
};

}  // namespace dg

#endif
