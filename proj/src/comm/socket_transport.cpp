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

#include "diskgraph/comm/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "diskgraph/common.hpp"

namespace dg {

namespace {

void read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  while (n > 0) {
    ssize_t r = ::recv(fd, buf, n, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (r == 0) throw IoError("peer closed connection");
    buf += r;
    n -= static_cast<std::size_t>(r);
  }
}

void write_exact(int fd, const std::uint8_t* buf, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, buf, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("socket write failed: ") + std::strerror(errno));
    }
    buf += w;
    n -= static_cast<std::size_t>(w);
  }
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

SocketTransport::SocketTransport(int rank, int num_workers,
                                 const std::string& endpoints_dir,
                                 std::size_t channel_capacity,
                                 int rendezvous_timeout_ms)
    : rank_(rank), n_(num_workers), capacity_(channel_capacity) {
  using Clock = std::chrono::steady_clock;
  auto deadline =
      Clock::now() + std::chrono::milliseconds(rendezvous_timeout_ms);

  peers_.resize(n_);
  for (int i = 0; i < n_; ++i) peers_[i] = std::make_unique<Peer>();
  data_queues_.resize(n_);
  open_channels_ = n_ - 1;  // remote channels; loopback never closes

  std::filesystem::create_directories(endpoints_dir);

  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw IoError("cannot create listen socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw IoError("bind failed");
  if (::listen(listen_fd_, n_) != 0) throw IoError("listen failed");
  socklen_t alen = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &alen);
  std::uint16_t my_port = ntohs(addr.sin_port);

  {
    std::string tmp = endpoints_dir + "/" + std::to_string(rank_) + ".tmp";
    std::string fin = endpoints_dir + "/" + std::to_string(rank_) + ".addr";
    std::ofstream out(tmp);
    out << my_port << "\n";
    out.close();
    std::filesystem::rename(tmp, fin);
  }

  // Accept from higher ranks in a helper thread while we dial lower ranks.
  int expected_accepts = n_ - 1 - rank_;
  std::exception_ptr accept_error;
  std::thread acceptor([&] {
    try {
      for (int a = 0; a < expected_accepts; ++a) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) throw IoError("accept failed");
        set_nodelay(fd);
        std::uint8_t hello[4];
        read_exact(fd, hello, 4);
        int peer = static_cast<int>(get_u32(hello));
        peers_[peer]->fd = fd;
      }
    } catch (...) {
      accept_error = std::current_exception();
    }
  });

  try {
    for (int peer = 0; peer < rank_; ++peer) {
      std::uint16_t port = 0;
      std::string path = endpoints_dir + "/" + std::to_string(peer) + ".addr";
      while (Clock::now() < deadline) {
        std::ifstream in(path);
        if (in && (in >> port) && port != 0) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
      if (port == 0)
        throw IoError("rendezvous timeout waiting for worker " +
                      std::to_string(peer));
      int fd = ::socket(AF_INET, SOCK_STREAM, 0);
      sockaddr_in peer_addr{};
      peer_addr.sin_family = AF_INET;
      peer_addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
      peer_addr.sin_port = htons(port);
      while (::connect(fd, reinterpret_cast<sockaddr*>(&peer_addr),
                       sizeof(peer_addr)) != 0) {
        if (errno == EINTR) continue;
        if (Clock::now() >= deadline)
          throw IoError("connect timeout to worker " + std::to_string(peer));
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
      }
      set_nodelay(fd);
      std::uint8_t hello[4];
      put_u32(hello, static_cast<std::uint32_t>(rank_));
      write_exact(fd, hello, 4);
      peers_[peer]->fd = fd;
    }
    acceptor.join();
    if (accept_error) std::rethrow_exception(accept_error);
  } catch (...) {
    if (acceptor.joinable()) {
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
      listen_fd_ = -1;
      acceptor.join();
    }
    throw;
  }

  for (int peer = 0; peer < n_; ++peer) {
    if (peer == rank_) continue;
    peers_[peer]->pump = std::thread([this, peer] { pump_loop(peer); });
  }
}

SocketTransport::~SocketTransport() {
  shutdown();
  for (auto& p : peers_)
    if (p && p->pump.joinable()) p->pump.join();
  for (auto& p : peers_) {
    if (p && p->fd >= 0) ::close(p->fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void SocketTransport::write_frame(int to, const Batch& b) {
  Peer& p = *peers_[to];
  std::lock_guard<std::mutex> lk(p.write_mu);
  std::uint8_t hdr[kFrameHeaderBytes];
  encode_frame_header(hdr, b);
  write_exact(p.fd, hdr, sizeof(hdr));
  if (!b.payload.empty()) write_exact(p.fd, b.payload.data(), b.payload.size());
}

void SocketTransport::send(int to, const Batch& batch) {
  if (to == rank_) {
    Batch copy = batch;
    if (batch.kind == BatchKind::kControl)
      enqueue_control(rank_, std::move(copy));
    else
      enqueue_data(rank_, std::move(copy));
    return;
  }
  {
    std::unique_lock<std::mutex> lk(mu_);
    if (down_) throw ProtocolError("transport is shut down");
  }
  write_frame(to, batch);
}

void SocketTransport::enqueue_data(int from, Batch&& b) {
  std::unique_lock<std::mutex> lk(mu_);
  send_cv_.wait(lk, [&] {
    return down_ || data_queues_[from].size() < capacity_;
  });
  if (down_) return;
  data_queues_[from].push_back(std::move(b));
  data_cv_.notify_all();
}

void SocketTransport::enqueue_control(int from, Batch&& b) {
  std::lock_guard<std::mutex> lk(mu_);
  if (b.payload.empty())
    throw ProtocolError("control batch without a type byte");
  auto q = control_queue_for(static_cast<ControlType>(b.payload[0]));
  control_queues_[static_cast<int>(q)].emplace_back(from, std::move(b));
  control_cv_.notify_all();
}

void SocketTransport::pump_loop(int peer) {
  try {
    for (;;) {
      std::uint8_t hdr[kFrameHeaderBytes];
      read_exact(peers_[peer]->fd, hdr, sizeof(hdr));
      Batch b;
      b.kind = static_cast<BatchKind>(hdr[0]);
      b.superstep = get_u64(hdr + 1);
      std::uint64_t len = get_u64(hdr + 9);
      b.payload.resize(len);
      if (len > 0) read_exact(peers_[peer]->fd, b.payload.data(), len);
      if (b.kind == BatchKind::kControl)
        enqueue_control(peer, std::move(b));
      else
        enqueue_data(peer, std::move(b));
    }
  } catch (const IoError&) {
    // Peer gone or transport shut down: close this channel.
    std::lock_guard<std::mutex> lk(mu_);
    --open_channels_;
    data_cv_.notify_all();
    control_cv_.notify_all();
  }
}

bool SocketTransport::recv_data(int& from, Batch& batch) {
  std::unique_lock<std::mutex> lk(mu_);
  for (;;) {
    for (int i = 0; i < n_; ++i) {
      int j = (rr_next_ + i) % n_;
      if (!data_queues_[j].empty()) {
        from = j;
        batch = std::move(data_queues_[j].front());
        data_queues_[j].pop_front();
        rr_next_ = (j + 1) % n_;
        send_cv_.notify_all();
        return true;
      }
    }
    if (down_ || (n_ > 1 && open_channels_ == 0)) return false;
    data_cv_.wait(lk);
  }
}

bool SocketTransport::recv_control(ControlQueue q, int& from, Batch& batch) {
  std::unique_lock<std::mutex> lk(mu_);
  auto& queue = control_queues_[static_cast<int>(q)];
  for (;;) {
    if (!queue.empty()) {
      from = queue.front().first;
      batch = std::move(queue.front().second);
      queue.pop_front();
      return true;
    }
    if (down_ || (n_ > 1 && open_channels_ == 0)) return false;
    control_cv_.wait(lk);
  }
}

void SocketTransport::shutdown() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (down_) return;
    down_ = true;
  }
  for (auto& p : peers_) {
    if (p && p->fd >= 0) ::shutdown(p->fd, SHUT_RDWR);
  }
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard<std::mutex> lk(mu_);
  data_cv_.notify_all();
  control_cv_.notify_all();
  send_cv_.notify_all();
}

}  // namespace dg
