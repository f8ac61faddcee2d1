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

#ifndef DISKGRAPH_ENGINE_LEDGER_HPP
#define DISKGRAPH_ENGINE_LEDGER_HPP

#include <condition_variable>
#include <cstdint>
#include <mutex>

#include "diskgraph/common.hpp"

namespace dg {

// Step bookkeeping shared by the three units of one worker. Steps are
// numbered from 0 (the loading pass); user supersteps start at 1.
//
// Gating rules:
//   - the computing unit may run step i once `compute_allowed >= i`
//     (granted by the receiving unit when step i-1's tags are all in);
//   - the sending unit may transmit step i once `send_allowed >= i`
//     (granted after the step i-1 receiver barrier);
//   - both also wait for the termination verdict of step i-1, so no unit
//     blocks forever on a step that will never happen.
class SuperstepLedger {
 public:
  // Start values for a job that loads through the transport (text load):
  // everything begins at step 0. A job that loads locally starts at 1.
  void bootstrap(std::uint64_t first_step) {
    std::lock_guard<std::mutex> lk(mu_);
    compute_allowed_ = first_step;
    send_allowed_ = first_step;
    if (first_step > 0) uc_finished_ = 0;  // pretend-finished empty load step
  }

  void abort() {
    std::lock_guard<std::mutex> lk(mu_);
    aborted_ = true;
    cv_.notify_all();
  }
  bool aborted() const {
    std::lock_guard<std::mutex> lk(mu_);
    return aborted_;
  }

  // ---- computing unit ----------------------------------------------------

  // Returns false if the job stopped (or aborted) before step `s`.
  bool wait_compute_permit(std::uint64_t s) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] {
      return aborted_ || compute_allowed_ >= s ||
             (has_verdict_ && stop_ && verdict_step_ < s);
    });
    return !aborted_ && compute_allowed_ >= s && !(stop_ && verdict_step_ < s);
  }

  void mark_compute_finished(std::uint64_t s) {
    std::lock_guard<std::mutex> lk(mu_);
    uc_finished_ = static_cast<std::int64_t>(s);
    ++outbox_events_;  // wakes a ring scan waiting for the step to settle
    cv_.notify_all();
  }

  void publish_verdict(std::uint64_t s, bool stop) {
    std::lock_guard<std::mutex> lk(mu_);
    has_verdict_ = true;
    verdict_step_ = s;
    stop_ = stop;
    cv_.notify_all();
  }

  // ---- receiving unit ----------------------------------------------------

  void grant_compute(std::uint64_t s) {
    std::lock_guard<std::mutex> lk(mu_);
    compute_allowed_ = s;
    cv_.notify_all();
  }

  void grant_send(std::uint64_t s) {
    std::lock_guard<std::mutex> lk(mu_);
    send_allowed_ = s;
    cv_.notify_all();
  }

  // Blocks until the verdict for step `s` is known; true = job continues.
  bool wait_verdict(std::uint64_t s) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] {
      return aborted_ || (has_verdict_ && verdict_step_ >= s);
    });
    if (aborted_) return false;
    return !(stop_ && verdict_step_ <= s);
  }

  // ---- sending unit ------------------------------------------------------

  bool wait_send_permit(std::uint64_t s) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] {
      return aborted_ || send_allowed_ >= s ||
             (has_verdict_ && stop_ && verdict_step_ < s);
    });
    return !aborted_ && send_allowed_ >= s && !(stop_ && verdict_step_ < s);
  }

  bool compute_finished(std::uint64_t s) const {
    std::lock_guard<std::mutex> lk(mu_);
    return uc_finished_ >= static_cast<std::int64_t>(s);
  }

  // Outbox progress is an epoch counter bumped by file rolls and by the
  // compute pass finishing. The sender snapshots the epoch before a scan
  // and sleeps only while it is unchanged, so a roll between scan and
  // sleep is never lost.
  std::uint64_t outbox_epoch() const {
    std::lock_guard<std::mutex> lk(mu_);
    return outbox_events_;
  }

  void wait_outbox_change(std::uint64_t seen) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait(lk, [&] { return aborted_ || outbox_events_ != seen; });
  }

  void notify_outbox_event() {
    std::lock_guard<std::mutex> lk(mu_);
    ++outbox_events_;
    cv_.notify_all();
  }

  std::uint64_t compute_allowed() const {
    std::lock_guard<std::mutex> lk(mu_);
    return compute_allowed_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t compute_allowed_ = 0;
  std::uint64_t send_allowed_ = 0;
  std::int64_t uc_finished_ = -1;
  bool has_verdict_ = false;
  std::uint64_t verdict_step_ = 0;
  bool stop_ = false;
  bool aborted_ = false;
  std::uint64_t outbox_events_ = 0;
};

}  // namespace dg

#endif
