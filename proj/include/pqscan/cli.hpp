// Copyright 2026 The pqscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// The pqscan command line: scan, report, migrate, eval.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace pqscan {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;   // IO or data errors
inline constexpr int kExitConfig = 2; // ruleset, flag or backend configuration

struct CliConfig {
    std::string subcommand;
    std::filesystem::path corpus_root;
    std::optional<std::filesystem::path> ruleset_path;
    std::filesystem::path out_dir;
    std::filesystem::path findings_path;
    std::filesystem::path run_dir;
    std::string format = "markdown";

    // migrate
    std::string kind_filter = "all"; // hash, pqc, all
    std::string backend;             // scripted:<id>, replay:<dir>, http:<url>
    std::string model_name;
    std::string auth_env;
    std::string dialect = "minimal";
    std::string mode = "edit";       // edit, agentic
    bool via_model = false;
    std::optional<std::filesystem::path> exemplars;
    std::optional<std::filesystem::path> record_dir;
    double timeout_s = 120;
    int max_retries = 2;
    int tool_budget = 32;

    unsigned jobs = 1;
    int verbosity = 0; // -1 quiet, 0 warnings, 1 notes
    bool force = false;
    std::string fixed_clock;
    std::optional<std::uint64_t> seed;
};

int cmd_scan(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_report(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_migrate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const CliConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pqscan
