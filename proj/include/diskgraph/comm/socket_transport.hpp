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

#ifndef DISKGRAPH_COMM_SOCKET_TRANSPORT_HPP
#define DISKGRAPH_COMM_SOCKET_TRANSPORT_HPP

#include <array>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "diskgraph/comm/transport.hpp"

namespace dg {

// TCP transport between worker processes on one host. Workers rendezvous
// through an endpoints directory: each binds an ephemeral loopback port,
// publishes "<rank>.addr", and connects to every lower rank while
// accepting from every higher rank. One socket per unordered pair;
// messages to self go through an in-memory loopback queue.
class SocketTransport : public Transport {
 public:
  SocketTransport(int rank, int num_workers, const std::string& endpoints_dir,
                  std::size_t channel_capacity = 4,
                  int rendezvous_timeout_ms = 30000);
  ~SocketTransport() override;

  int rank() const override { return rank_; }
  int num_workers() const override { return n_; }
  void send(int to, const Batch& batch) override;
  bool recv_data(int& from, Batch& batch) override;
  bool recv_control(ControlQueue q, int& from, Batch& batch) override;
  void shutdown() override;

 private:
  struct Peer {
    int fd = -1;
    std::mutex write_mu;
    std::thread pump;
  };

  void pump_loop(int peer);
  void enqueue_data(int from, Batch&& b);
  void enqueue_control(int from, Batch&& b);
  void write_frame(int to, const Batch& b);

  int rank_;
  int n_;
  std::size_t capacity_;
  std::vector<std::unique_ptr<Peer>> peers_;
  int listen_fd_ = -1;

  std::mutex mu_;
  std::condition_variable data_cv_;
  std::condition_variable control_cv_;
  std::condition_variable send_cv_;
  std::vector<std::deque<Batch>> data_queues_;  // per sender
  std::array<std::deque<std::pair<int, Batch>>, 4> control_queues_;
  int rr_next_ = 0;  // round-robin scan origin over data queues
  int open_channels_ = 0;
  bool down_ = false;
};

}  // namespace dg

#endif
