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

#include "diskgraph/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "diskgraph/common.hpp"

namespace dg {

std::string JobConfig::local_dir(int rank) const {
  std::string root = local_root.empty() ? store_path + "/scratch" : local_root;
  return root + "/" + std::to_string(rank);
}

std::string JobConfig::scratch_dir(int rank) const { return local_dir(rank); }

void JobConfig::validate(std::size_t max_item_bytes) const {
  if (num_workers < 1) throw ConfigError("num_workers must be >= 1");
  if (stream_buffer_b < max_item_bytes)
    throw ConfigError("stream buffer b (" + std::to_string(stream_buffer_b) +
                      ") smaller than largest item (" +
                      std::to_string(max_item_bytes) + " bytes)");
  if (split_size_B < stream_buffer_b)
    throw ConfigError("split size B must be >= stream buffer b");
  if (merge_fanin_k < 2) throw ConfigError("merge fan-in k must be >= 2");
  if (store_path.empty()) throw ConfigError("store path is required");
}

namespace {

std::string mode_name(RunMode m) {
  return m == RunMode::kNormal ? "normal" : "recoded";
}
std::string transport_name(TransportKind t) {
  return t == TransportKind::kSimulated ? "sim" : "sockets";
}

}  // namespace

void JobConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path);
  out << "num_workers=" << num_workers << "\n"
      << "b=" << stream_buffer_b << "\n"
      << "B=" << split_size_B << "\n"
      << "k=" << merge_fanin_k << "\n"
      << "mode=" << mode_name(mode) << "\n"
      << "transport=" << transport_name(transport) << "\n"
      << "store=" << store_path << "\n"
      << "out=" << output_path << "\n"
      << "local=" << local_root << "\n"
      << "algorithm=" << algorithm << "\n"
      << "steps=" << steps << "\n"
      << "max_steps=" << max_steps << "\n"
      << "source=" << source << "\n"
      << "seed=" << seed << "\n"
      << "sim_delay_us=" << sim_delay_us << "\n"
      << "channel_capacity=" << channel_capacity << "\n"
      << "worker_binary=" << worker_binary << "\n";
  if (!out.good()) throw IoError("failed writing config " + path);
}

JobConfig JobConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }

  JobConfig c;
  auto get = [&](const std::string& key, auto parse, auto& field) {
    auto it = kv.find(key);
    if (it != kv.end()) field = parse(it->second);
  };
  auto to_u64 = [](const std::string& s) { return std::stoull(s); };
  auto to_int = [](const std::string& s) { return std::stoi(s); };
  auto to_str = [](const std::string& s) { return s; };

  get("num_workers", to_int, c.num_workers);
  get("b", to_u64, c.stream_buffer_b);
  get("B", to_u64, c.split_size_B);
  get("k", to_u64, c.merge_fanin_k);
  get("steps", to_u64, c.steps);
  get("max_steps", to_u64, c.max_steps);
  get("source", to_u64, c.source);
  get("seed", to_u64, c.seed);
  std::uint64_t delay = c.sim_delay_us;
  get("sim_delay_us", to_u64, delay);
  c.sim_delay_us = static_cast<std::uint32_t>(delay);
  get("channel_capacity", to_u64, c.channel_capacity);
  get("store", to_str, c.store_path);
  get("out", to_str, c.output_path);
  get("local", to_str, c.local_root);
  get("algorithm", to_str, c.algorithm);
  get("worker_binary", to_str, c.worker_binary);
  if (auto it = kv.find("mode"); it != kv.end()) {
    if (it->second == "normal")
      c.mode = RunMode::kNormal;
    else if (it->second == "recoded")
      c.mode = RunMode::kRecoded;
    else
      throw ParseError("unknown mode: " + it->second);
  }
  if (auto it = kv.find("transport"); it != kv.end()) {
    if (it->second == "sim")
      c.transport = TransportKind::kSimulated;
    else if (it->second == "sockets")
      c.transport = TransportKind::kProcessSockets;
    else
      throw ParseError("unknown transport: " + it->second);
  }
  return c;
}

}  // namespace dg
