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

#include "diskgraph/comm/sim_transport.hpp"

#include "diskgraph/common.hpp"

namespace dg {

class SimEndpoint : public Transport {
 public:
  SimEndpoint(SimNetwork* net, int rank) : net_(net), rank_(rank) {}

  int rank() const override { return rank_; }
  int num_workers() const override { return net_->n_; }

  void send(int to, const Batch& batch) override {
    SimNetwork& net = *net_;
    std::unique_lock<std::mutex> lk(net.mu_);
    if (batch.kind == BatchKind::kControl) {
      if (batch.payload.empty())
        throw ProtocolError("control batch without a type byte");
      auto q = control_queue_for(static_cast<ControlType>(batch.payload[0]));
      auto& ch = net.control_channels_[to][static_cast<int>(q)];
      ch.items.push_back({rank_, batch, net.next_available(ch)});
      net.control_cv_[to]->notify_all();
      return;
    }
    auto& ch = net.data_channel(rank_, to);
    net.send_cv_.wait(lk, [&] {
      return net.down_ || ch.items.size() < net.capacity_;
    });
    if (net.down_) throw ProtocolError("transport is shut down");
    ch.items.push_back({rank_, batch, net.next_available(ch)});
    net.data_cv_[to]->notify_all();
  }

  bool recv_data(int& from, Batch& batch) override {
    SimNetwork& net = *net_;
    std::unique_lock<std::mutex> lk(net.mu_);
    for (;;) {
      auto now = SimNetwork::Clock::now();
      SimNetwork::Channel* best = nullptr;
      bool any_pending = false;
      SimNetwork::Clock::time_point next_wake{};
      for (int j = 0; j < net.n_; ++j) {
        auto& ch = net.data_channel(j, rank_);
        if (ch.items.empty()) continue;
        any_pending = true;
        auto avail = ch.items.front().available;
        if (avail <= now) {
          if (!best || avail < best->items.front().available) best = &ch;
        } else if (next_wake == SimNetwork::Clock::time_point{} ||
                   avail < next_wake) {
          next_wake = avail;
        }
      }
      if (best) {
        from = best->items.front().from;
        batch = std::move(best->items.front().batch);
        best->items.pop_front();
        net.send_cv_.notify_all();
        return true;
      }
      if (net.down_ && !any_pending) return false;
      if (any_pending) {
        net.data_cv_[rank_]->wait_until(lk, next_wake);
      } else {
        net.data_cv_[rank_]->wait(lk);
      }
    }
  }

  bool recv_control(ControlQueue q, int& from, Batch& batch) override {
    SimNetwork& net = *net_;
    std::unique_lock<std::mutex> lk(net.mu_);
    auto& ch = net.control_channels_[rank_][static_cast<int>(q)];
    for (;;) {
      if (!ch.items.empty()) {
        auto avail = ch.items.front().available;
        if (avail <= SimNetwork::Clock::now()) {
          from = ch.items.front().from;
          batch = std::move(ch.items.front().batch);
          ch.items.pop_front();
          return true;
        }
        net.control_cv_[rank_]->wait_until(lk, avail);
        continue;
      }
      if (net.down_) return false;
      net.control_cv_[rank_]->wait(lk);
    }
  }

  void shutdown() override { net_->shutdown_all(); }

 private:
  SimNetwork* net_;
  int rank_;
};

SimNetwork::SimNetwork(int num_workers, std::uint64_t seed,
                       std::uint32_t max_delay_us, std::size_t channel_capacity)
    : n_(num_workers),
      max_delay_us_(max_delay_us),
      capacity_(channel_capacity) {
  data_channels_.resize(static_cast<std::size_t>(n_) * n_);
  control_channels_.resize(n_);
  for (int f = 0; f < n_; ++f)
    for (int t = 0; t < n_; ++t) {
      Channel& ch = data_channel(f, t);
      ch.rng.seed(seed * 0x9e3779b97f4a7c15ULL +
                  static_cast<std::uint64_t>(f) * n_ + t + 1);
      // heterogeneous links: ceiling anywhere in [max/4, 2*max]
      if (max_delay_us_ > 0)
        ch.delay_ceiling_us = max_delay_us_ / 4 +
                              ch.rng() % (2 * max_delay_us_ -
                                          max_delay_us_ / 4 + 1);
    }
  for (int t = 0; t < n_; ++t)
    for (int q = 0; q < 4; ++q) {
      Channel& ch = control_channels_[t][q];
      ch.rng.seed(seed ^ (0xc0ffee + t * 4 + q));
      ch.delay_ceiling_us = max_delay_us_;
    }
  for (int r = 0; r < n_; ++r) {
    data_cv_.push_back(std::make_unique<std::condition_variable>());
    control_cv_.push_back(std::make_unique<std::condition_variable>());
  }
  for (int r = 0; r < n_; ++r)
    endpoints_.push_back(std::make_unique<SimEndpoint>(this, r));
}

SimNetwork::~SimNetwork() { shutdown_all(); }

Transport& SimNetwork::endpoint(int rank) { return *endpoints_[rank]; }

SimNetwork::Clock::time_point SimNetwork::next_available(Channel& ch) {
  auto now = Clock::now();
  auto base = std::max(now, ch.last_available);
  if (max_delay_us_ > 0 && ch.delay_ceiling_us > 0) {
    std::uniform_int_distribution<std::uint32_t> d(0, ch.delay_ceiling_us);
    base += std::chrono::microseconds(d(ch.rng));
  }
  ch.last_available = base;
  return base;
}

void SimNetwork::shutdown_all() {
  std::lock_guard<std::mutex> lk(mu_);
  down_ = true;
  send_cv_.notify_all();
  for (auto& cv : data_cv_) cv->notify_all();
  for (auto& cv : control_cv_) cv->notify_all();
}

}  // namespace dg
