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

#include "diskgraph/driver/job.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "diskgraph/comm/socket_transport.hpp"
#include "diskgraph/driver/job_typed.hpp"

namespace dg {

namespace fs = std::filesystem;

namespace {

std::string self_executable() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw IoError("cannot resolve /proc/self/exe");
  buf[n] = '\0';
  return buf;
}

std::string endpoints_dir(const JobConfig& cfg) {
  std::string root =
      cfg.local_root.empty() ? cfg.store_path + "/scratch" : cfg.local_root;
  return root + "/endpoints";
}

std::string job_file_path(const JobConfig& cfg) {
  std::string root =
      cfg.local_root.empty() ? cfg.store_path + "/scratch" : cfg.local_root;
  return root + "/job.conf";
}

JobStats run_sockets_parent(const JobConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  std::string binary =
      cfg.worker_binary.empty() ? self_executable() : cfg.worker_binary;

  fs::remove_all(endpoints_dir(cfg));
  fs::create_directories(endpoints_dir(cfg));
  std::string job_file = job_file_path(cfg);
  cfg.save(job_file);

  std::vector<pid_t> pids;
  for (int r = 0; r < cfg.num_workers; ++r) {
    pid_t pid = ::fork();
    if (pid < 0) throw IoError("fork failed");
    if (pid == 0) {
      std::string rank = std::to_string(r);
      ::execl(binary.c_str(), binary.c_str(), "worker", "--rank", rank.c_str(),
              "--job", job_file.c_str(), static_cast<char*>(nullptr));
      std::perror("exec worker failed");
      ::_exit(127);
    }
    pids.push_back(pid);
  }

  bool failed = false;
  for (pid_t pid : pids) {
    int status = 0;
    if (::waitpid(pid, &status, 0) < 0) failed = true;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failed = true;
  }
  if (failed) throw Error("one or more worker processes failed");

  JobStats stats;
  for (int r = 0; r < cfg.num_workers; ++r) {
    JobStats one =
        JobStats::from_json_file(cfg.local_dir(r) + "/stats.json");
    stats.workers.push_back(one.workers.at(0));
  }
  stats.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  if (!cfg.output_path.empty())
    stats.write_json_file(cfg.output_path + "/stats.json");
  return stats;
}

}  // namespace

JobStats run_job(const JobConfig& cfg) {
  GraphManifest man = GraphManifest::load(store_manifest_path(cfg.store_path));
  if (cfg.transport == TransportKind::kSimulated) {
    return with_program(cfg, man, [&](auto program) {
      return run_sim_typed(cfg, man, std::move(program));
    });
  }
  return run_sockets_parent(cfg);
}

int worker_process_main(const std::string& job_file, int rank) {
  try {
    JobConfig cfg = JobConfig::load(job_file);
    GraphManifest man =
        GraphManifest::load(store_manifest_path(cfg.store_path));
    SocketTransport transport(rank, cfg.num_workers, endpoints_dir(cfg),
                              cfg.channel_capacity);
    with_program(cfg, man, [&](auto program) {
      using P = decltype(program);
      Worker<P> worker(cfg, rank, transport, std::move(program),
                       worker_options<P>(cfg, man));
      worker.run();
      JobStats one;
      one.workers.push_back(worker.stats());
      one.write_json_file(cfg.local_dir(rank) + "/stats.json");
      return JobStats{};
    });
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "worker " << rank << ": " << e.what() << "\n";
    return 1;
  }
}

JobStats run_recode(JobConfig cfg, bool force) {
  GraphManifest man = GraphManifest::load(store_manifest_path(cfg.store_path));
  if (man.recoded && !force)
    throw ConfigError(
        "store already holds recoded artifacts; pass --force to redo");

  cfg.algorithm = "recode";
  cfg.mode = RunMode::kNormal;
  cfg.output_path.clear();

  auto t0 = std::chrono::steady_clock::now();
  JobStats stats = run_job(cfg);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();

  man.recoded = true;
  man.recode_workers = cfg.num_workers;
  man.recode_ms = ms;
  man.save(store_manifest_path(cfg.store_path));
  return stats;
}

JobStats run_oracle_job(const JobConfig& cfg) {
  GraphManifest man = GraphManifest::load(store_manifest_path(cfg.store_path));
  return with_program(cfg, man, [&](auto program) {
    return run_oracle_typed(cfg, man, std::move(program));
  });
}

namespace {

std::map<VertexId, std::string> read_output_dir(const std::string& dir) {
  std::map<VertexId, std::string> values;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("part-", 0) != 0) continue;
    std::ifstream in(entry.path());
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError(name + " line " + std::to_string(lineno) +
                         ": expected id<TAB>value");
      VertexId id = 0;
      auto [p, ec] =
          std::from_chars(line.data(), line.data() + tab, id);
      if (ec != std::errc())
        throw ParseError(name + " line " + std::to_string(lineno) +
                         ": bad vertex id");
      if (!values.emplace(id, line.substr(tab + 1)).second)
        throw ParseError(name + ": duplicate vertex id " + std::to_string(id));
    }
  }
  return values;
}

bool values_equal(const std::string& a, const std::string& b, double tol,
                  double& diff) {
  diff = 0.0;
  if (a == b) return true;
  char* enda = nullptr;
  char* endb = nullptr;
  double da = std::strtod(a.c_str(), &enda);
  double db = std::strtod(b.c_str(), &endb);
  if (*enda != '\0' || *endb != '\0') return false;  // non-numeric mismatch
  if (std::isinf(da) || std::isinf(db)) return da == db;
  diff = std::fabs(da - db);
  return diff <= tol;
}

}  // namespace

VerifyReport verify_outputs(const std::string& left, const std::string& right,
                            double tolerance) {
  auto lv = read_output_dir(left);
  auto rv = read_output_dir(right);
  VerifyReport report;
  for (const auto& [id, value] : lv) {
    auto it = rv.find(id);
    if (it == rv.end()) {
      ++report.only_left;
      continue;
    }
    ++report.compared;
    double diff = 0.0;
    if (!values_equal(value, it->second, tolerance, diff)) {
      ++report.mismatches;
      if (report.samples.size() < 10)
        report.samples.push_back("id " + std::to_string(id) + ": " + value +
                                 " vs " + it->second);
    }
    report.max_abs_diff = std::max(report.max_abs_diff, diff);
  }
  report.only_right = rv.size() - report.compared;
  return report;
}

}  // namespace dg
