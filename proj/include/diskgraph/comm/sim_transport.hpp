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

#ifndef DISKGRAPH_COMM_SIM_TRANSPORT_HPP
#define DISKGRAPH_COMM_SIM_TRANSPORT_HPP

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "diskgraph/comm/transport.hpp"

namespace dg {

class SimEndpoint;

// In-process transport for a cluster of worker threads, with seeded
// random per-batch delivery delays. Delays are chained per channel, so
// per-channel FIFO order always holds while cross-channel interleaving
// varies with the seed.
class SimNetwork {
 public:
  // max_delay_us = 0 disables delays entirely.
  SimNetwork(int num_workers, std::uint64_t seed = 0,
             std::uint32_t max_delay_us = 0, std::size_t channel_capacity = 4);
  ~SimNetwork();

  Transport& endpoint(int rank);
  void shutdown_all();

 private:
  friend class SimEndpoint;
  using Clock = std::chrono::steady_clock;

  struct Item {
    int from;
    Batch batch;
    Clock::time_point available;
  };

  struct Channel {
    std::deque<Item> items;
    Clock::time_point last_available{};
    std::mt19937_64 rng;
    // Per-channel delay ceiling (us); links are heterogeneous so some
    // channels lag far behind others under the same seed.
    std::uint32_t delay_ceiling_us = 0;
  };

  Channel& data_channel(int from, int to) { return data_channels_[from * n_ + to]; }
  Clock::time_point next_available(Channel& ch);

  int n_;
  std::uint32_t max_delay_us_;
  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable send_cv_;
  std::vector<std::unique_ptr<std::condition_variable>> data_cv_;     // per receiver
  std::vector<std::unique_ptr<std::condition_variable>> control_cv_;  // per receiver
  std::vector<Channel> data_channels_;                  // [from * n + to]
  std::vector<std::array<Channel, 4>> control_channels_;  // [to][queue]
  bool down_ = false;

  std::vector<std::unique_ptr<SimEndpoint>> endpoints_;
};

}  // namespace dg

#endif
