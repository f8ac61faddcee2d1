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

#ifndef DISKGRAPH_CLI_COMMANDS_HPP
#define DISKGRAPH_CLI_COMMANDS_HPP

#include <string>

#include "diskgraph/config.hpp"

namespace dg::cli {

int cmd_put(const std::string& input, const std::string& store, bool directed,
            bool weighted);
int cmd_recode(const JobConfig& cfg, bool force);
int cmd_run(const JobConfig& cfg, bool use_oracle);
int cmd_verify(const std::string& left, const std::string& right,
               double tolerance);
int cmd_stats(const std::string& stats_file, bool check, std::size_t fanin);

}  // namespace dg::cli

#endif
