#include <chrono>
#include <cstdio>
#include <thread>

#include "diskgraph/algorithms/pagerank.hpp"
#include "harness.hpp"

using namespace dg;

int main() {
  dgtest::TempDir tmp("timing");
  auto g = dgtest::gen_digraph(400, 5.0, 99, false, false);
  auto man = g.put(tmp.sub("store"));
  auto cfg = dgtest::small_config(tmp.sub("store"), tmp.sub("out"), 3, "pagerank");
  cfg.steps = 3;
  cfg.split_size_B = 1024;
  cfg.sim_delay_us = 700;
  cfg.channel_capacity = 1;
  cfg.seed = 5;
  PageRank<Empty> pr;
  pr.rounds = 3;
  auto t0 = std::chrono::steady_clock::now();
  dgtest::SimHarness<PageRank<Empty>> h(cfg, man, pr);
  h.run();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  std::printf("wall=%lld ms\n", (long long)ms);
  for (int r = 0; r < 3; ++r) {
    auto s = h.worker(r).stats();
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      const auto& st = s.steps[i];
      std::printf(
          "w%d s%zu compute=[%lld,%lld] send=[%lld,%lld] recv=%lld barrier=%lld "
          "batches=%llu tags_recv=%llu\n",
          r, i, (long long)st.compute_begin_ns / 1000000,
          (long long)st.compute_end_ns / 1000000,
          (long long)st.send_begin_ns / 1000000,
          (long long)st.send_end_ns / 1000000,
          (long long)st.recv_done_ns / 1000000,
          (long long)st.barrier_done_ns / 1000000,
          (unsigned long long)st.data_batches_sent,
          (unsigned long long)st.end_tags_received);
    }
  }
  return 0;
}
