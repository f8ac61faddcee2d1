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

#include "diskgraph/graph/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dg {

namespace {

[[noreturn]] void bad_line(std::uint64_t lineno, const std::string& what) {
  throw ParseError("line " + std::to_string(lineno) + ": " + what);
}

const char* parse_u64(const char* p, const char* end, std::uint64_t& out,
                      std::uint64_t lineno, const char* what) {
  auto [ptr, ec] = std::from_chars(p, end, out);
  if (ec != std::errc() || ptr == p)
    bad_line(lineno, std::string("expected ") + what);
  return ptr;
}

}  // namespace

ParsedVertex parse_vertex_line(const std::string& line, bool weighted,
                               std::uint64_t lineno) {
  ParsedVertex v;
  const char* p = line.data();
  const char* end = p + line.size();

  p = parse_u64(p, end, v.id, lineno, "vertex id");
  if (p == end || *p != '\t') bad_line(lineno, "expected <TAB> after vertex id");
  ++p;

  std::uint64_t degree = 0;
  p = parse_u64(p, end, degree, lineno, "degree field");

  v.adj.reserve(degree);
  for (std::uint64_t i = 0; i < degree; ++i) {
    if (p == end || *p != ' ')
      bad_line(lineno, "degree larger than listed neighbors");
    ++p;
    std::uint64_t nbr = 0;
    p = parse_u64(p, end, nbr, lineno, "neighbor id");
    double w = 1.0;
    if (weighted) {
      if (p == end || *p != ' ') bad_line(lineno, "missing edge weight");
      ++p;
      char* wend = nullptr;
      w = std::strtod(p, &wend);
      if (wend == p) bad_line(lineno, "malformed edge weight");
      p = wend;
    }
    v.adj.emplace_back(nbr, w);
  }
  while (p != end && (*p == ' ' || *p == '\r')) ++p;
  if (p != end) bad_line(lineno, "trailing tokens beyond listed degree");
  return v;
}

std::string format_vertex_line(const ParsedVertex& v, bool weighted) {
  std::ostringstream out;
  out << v.id << '\t' << v.adj.size();
  char buf[64];
  for (const auto& [nbr, w] : v.adj) {
    out << ' ' << nbr;
    if (weighted) {
      std::snprintf(buf, sizeof(buf), "%.17g", w);
      out << ' ' << buf;
    }
  }
  return out.str();
}

std::uint64_t line_number_at(const std::string& path, std::uint64_t offset) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t line = 1, seen = 0;
  char chunk[1 << 16];
  while (seen < offset && in) {
    in.read(chunk, std::min<std::uint64_t>(sizeof(chunk), offset - seen));
    std::streamsize got = in.gcount();
    if (got <= 0) break;
    line += static_cast<std::uint64_t>(
        std::count(chunk, chunk + got, '\n'));
    seen += static_cast<std::uint64_t>(got);
  }
  return line;
}

void GraphManifest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path);
  out << "num_vertices=" << num_vertices << "\n"
      << "num_edges=" << num_edges << "\n"
      << "directed=" << (directed ? 1 : 0) << "\n"
      << "weighted=" << (weighted ? 1 : 0) << "\n"
      << "recoded=" << (recoded ? 1 : 0) << "\n"
      << "recode_workers=" << recode_workers << "\n"
      << "recode_ms=" << recode_ms << "\n";
}

GraphManifest GraphManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path +
                         " (did you run `put` first?)");
  GraphManifest m;
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    if (key == "num_vertices") m.num_vertices = std::stoull(val);
    else if (key == "num_edges") m.num_edges = std::stoull(val);
    else if (key == "directed") m.directed = val != "0";
    else if (key == "weighted") m.weighted = val != "0";
    else if (key == "recoded") m.recoded = val != "0";
    else if (key == "recode_workers") m.recode_workers = std::stoi(val);
    else if (key == "recode_ms") m.recode_ms = std::stoll(val);
  }
  return m;
}

GraphManifest put_graph(const std::string& input_path, const std::string& store,
                        bool directed, bool weighted) {
  std::ifstream in(input_path);
  if (!in) throw IoError("cannot read " + input_path);
  std::filesystem::create_directories(store);

  std::ofstream out(store_graph_path(store), std::ios::trunc);
  if (!out) throw IoError("cannot write " + store_graph_path(store));

  GraphManifest m;
  m.directed = directed;
  m.weighted = weighted;

  std::unordered_set<VertexId> seen;
  // Adjacency retained only to validate symmetry of undirected input.
  std::unordered_map<VertexId, std::vector<VertexId>> sym;

  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ParsedVertex v = parse_vertex_line(line, weighted, lineno);
    if (!seen.insert(v.id).second)
      throw ParseError("line " + std::to_string(lineno) +
                       ": duplicate vertex id " + std::to_string(v.id));
    if (weighted) {
      for (const auto& [nbr, w] : v.adj)
        if (w < 0)
          throw ConfigError("line " + std::to_string(lineno) +
                            ": negative edge weight on edge to " +
                            std::to_string(nbr));
    }
    if (!directed) {
      auto& lst = sym[v.id];
      for (const auto& [nbr, w] : v.adj) {
        (void)w;
        lst.push_back(nbr);
      }
    }
    m.num_vertices += 1;
    m.num_edges += v.adj.size();
    out << format_vertex_line(v, weighted) << "\n";
  }
  if (!out.good()) throw IoError("failed writing normalized graph");
  out.close();

  if (!directed) {
    for (auto& [id, lst] : sym) std::sort(lst.begin(), lst.end());
    for (const auto& [id, lst] : sym) {
      for (VertexId nbr : lst) {
        auto it = sym.find(nbr);
        bool back = it != sym.end() &&
                    std::binary_search(it->second.begin(), it->second.end(), id);
        if (!back)
          throw ParseError("undirected graph asymmetry: edge " +
                           std::to_string(id) + " -> " + std::to_string(nbr) +
                           " has no reverse edge");
      }
    }
  }

  m.save(store_manifest_path(store));
  return m;
}

}  // namespace dg
