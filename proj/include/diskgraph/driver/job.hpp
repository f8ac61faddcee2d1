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

#ifndef DISKGRAPH_DRIVER_JOB_HPP
#define DISKGRAPH_DRIVER_JOB_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "diskgraph/config.hpp"
#include "diskgraph/graph/format.hpp"
#include "diskgraph/stats.hpp"

namespace dg {

// Runs one job end to end: with the simulated transport the workers are
// threads in this process; with sockets, worker processes are spawned
// (cfg.worker_binary, defaulting to this executable) and joined. Output
// parts land in cfg.output_path along with stats.json.
JobStats run_job(const JobConfig& cfg);

// Entry point of a spawned worker process (the hidden `worker`
// subcommand). Returns the process exit code.
int worker_process_main(const std::string& job_file, int rank);

// Renumbers the store's graph for `cfg.num_workers` workers and records
// the preprocessing in the manifest. Fails if artifacts already exist,
// unless forced.
JobStats run_recode(JobConfig cfg, bool force);

// Single-process reference run over the same store; writes one part file
// into cfg.output_path. Steps above cfg.max_steps flag a partial result.
JobStats run_oracle_job(const JobConfig& cfg);

struct VerifyReport {
  std::uint64_t compared = 0;
  std::uint64_t only_left = 0;
  std::uint64_t only_right = 0;
  std::uint64_t mismatches = 0;
  double max_abs_diff = 0.0;
  std::vector<std::string> samples;  // first few mismatching ids
};

// Joins two output directories (all part-* files) by vertex id and
// reports value differences beyond `tolerance`.
VerifyReport verify_outputs(const std::string& left, const std::string& right,
                            double tolerance);

}  // namespace dg

#endif
