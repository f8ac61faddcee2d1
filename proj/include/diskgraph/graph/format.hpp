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

#ifndef DISKGRAPH_GRAPH_FORMAT_HPP
#define DISKGRAPH_GRAPH_FORMAT_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diskgraph/common.hpp"

namespace dg {

// Input text format, one vertex per line:
//   id<TAB>degree<SPACE>nbr1 [w1] nbr2 [w2] ...
// Weights are present iff the graph is weighted.
struct ParsedVertex {
  VertexId id = 0;
  std::vector<std::pair<VertexId, double>> adj;
};

// Throws ParseError mentioning `lineno` on malformed input.
ParsedVertex parse_vertex_line(const std::string& line, bool weighted,
                               std::uint64_t lineno);

std::string format_vertex_line(const ParsedVertex& v, bool weighted);

// Exact global line number of a byte offset (error paths only).
std::uint64_t line_number_at(const std::string& path, std::uint64_t offset);

// Shared-store manifest, key=value format.
struct GraphManifest {
  std::uint64_t num_vertices = 0;
  std::uint64_t num_edges = 0;  // total adjacency items
  bool directed = true;
  bool weighted = false;
  bool recoded = false;     // recoded state array + edge streams exist
  int recode_workers = 0;   // worker count the recoded artifacts assume
  std::int64_t recode_ms = -1;

  void save(const std::string& path) const;
  static GraphManifest load(const std::string& path);
};

inline std::string store_graph_path(const std::string& store) {
  return store + "/graph.txt";
}
inline std::string store_manifest_path(const std::string& store) {
  return store + "/manifest";
}

// Validates an input file, writes the normalized copy plus the manifest
// into the store directory. Duplicate ids, bad degrees, negative weights
// and (for undirected graphs) asymmetric adjacency are rejected with the
// offending line or id.
GraphManifest put_graph(const std::string& input_path, const std::string& store,
                        bool directed, bool weighted);

}  // namespace dg

#endif
