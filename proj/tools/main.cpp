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

#include <string>

#include <CLI11.hpp>

#include "diskgraph/cli/commands.hpp"
#include "diskgraph/config.hpp"
#include "diskgraph/driver/job.hpp"

namespace {

void add_job_flags(CLI::App* cmd, dg::JobConfig& cfg, std::string& mode,
                   std::string& transport) {
  cmd->add_option("-n,--workers", cfg.num_workers, "worker count");
  cmd->add_option("--store", cfg.store_path, "shared store directory")
      ->required();
  cmd->add_option("--local", cfg.local_root,
                  "per-worker local disk root (default <store>/scratch)");
  cmd->add_option("--b", cfg.stream_buffer_b, "stream buffer bytes");
  cmd->add_option("--B", cfg.split_size_B, "message file split bytes");
  cmd->add_option("--k", cfg.merge_fanin_k, "merge fan-in");
  cmd->add_option("--mode", mode, "normal | recoded");
  cmd->add_option("--transport", transport, "sim | sockets");
  cmd->add_option("--seed", cfg.seed, "simulated-delay seed");
  cmd->add_option("--sim-delay-us", cfg.sim_delay_us,
                  "max simulated per-batch delay (us)");
}

void apply_mode_transport(dg::JobConfig& cfg, const std::string& mode,
                          const std::string& transport) {
  if (mode == "normal")
    cfg.mode = dg::RunMode::kNormal;
  else if (mode == "recoded")
    cfg.mode = dg::RunMode::kRecoded;
  else
    throw CLI::ValidationError("--mode", "expected normal|recoded");
  if (transport == "sim")
    cfg.transport = dg::TransportKind::kSimulated;
  else if (transport == "sockets")
    cfg.transport = dg::TransportKind::kProcessSockets;
  else
    throw CLI::ValidationError("--transport", "expected sim|sockets");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"out-of-core vertex-centric graph processing"};
  app.require_subcommand(1);

  // put
  std::string input, store;
  bool undirected = false, weighted = false;
  auto* put = app.add_subcommand("put", "validate a graph into the store");
  put->add_option("input", input, "graph text file")->required();
  put->add_option("--store", store, "store directory")->required();
  put->add_flag("--undirected", undirected, "undirected input");
  put->add_flag("--weighted", weighted, "edges carry weights");

  // shared job config
  dg::JobConfig cfg;
  std::string mode = "normal", transport = "sim";

  // recode
  bool force = false;
  auto* recode =
      app.add_subcommand("recode", "renumber vertex ids for recoded runs");
  add_job_flags(recode, cfg, mode, transport);
  recode->add_flag("--force", force, "redo even if artifacts exist");

  // run
  bool use_oracle = false;
  auto* run = app.add_subcommand("run", "run an algorithm");
  run->add_option("algorithm", cfg.algorithm,
                  "pagerank | hashmin | sssp | echo")
      ->required();
  add_job_flags(run, cfg, mode, transport);
  run->add_option("--out", cfg.output_path, "output directory")->required();
  run->add_option("--steps", cfg.steps, "rounds for pagerank/echo");
  run->add_option("--max-steps", cfg.max_steps, "superstep safety cap");
  run->add_option("--source", cfg.source, "sssp source vertex (original id)");
  run->add_flag("--oracle", use_oracle,
                "single-process in-memory reference run");

  // verify
  std::string left, right;
  double tolerance = 0.0;
  auto* verify = app.add_subcommand("verify", "compare two output directories");
  verify->add_option("left", left)->required();
  verify->add_option("right", right)->required();
  verify->add_option("--tolerance", tolerance, "numeric tolerance");

  // stats
  std::string stats_file;
  bool check = false;
  std::size_t fanin = 1000;
  auto* stats = app.add_subcommand("stats", "inspect a stats.json");
  stats->add_option("file", stats_file)->required();
  stats->add_flag("--check", check, "verify the per-step I/O pass bounds");
  stats->add_option("--k", fanin, "merge fan-in the job used");

  // worker (internal, spawned by `run --transport sockets`)
  std::string job_file;
  int rank = 0;
  auto* worker = app.add_subcommand("worker");
  worker->add_option("--rank", rank)->required();
  worker->add_option("--job", job_file)->required();

  CLI11_PARSE(app, argc, argv);

  if (put->parsed())
    return dg::cli::cmd_put(input, store, !undirected, weighted);
  if (recode->parsed()) {
    apply_mode_transport(cfg, "normal", transport);
    return dg::cli::cmd_recode(cfg, force);
  }
  if (run->parsed()) {
    apply_mode_transport(cfg, mode, transport);
    return dg::cli::cmd_run(cfg, use_oracle);
  }
  if (verify->parsed()) return dg::cli::cmd_verify(left, right, tolerance);
  if (stats->parsed()) return dg::cli::cmd_stats(stats_file, check, fanin);
  if (worker->parsed()) return dg::worker_process_main(job_file, rank);
  return 1;
}
