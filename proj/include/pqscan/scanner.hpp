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

#include <pqscan/diagnostics.hpp>
#include <pqscan/lexer.hpp>
#include <pqscan/model.hpp>
#include <pqscan/parallel.hpp>
#include <pqscan/ruleset.hpp>

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace pqscan {

struct CallSite {
    SourceLocation location;
    ApiKind api_kind = ApiKind::CipherFactory;
    std::string matched_pattern_id;
    // Verbatim argument text with comments removed. For smali these are the
    // argument registers (the receiver of non-static invokes is excluded).
    std::vector<std::string> argument_exprs;
    std::vector<ByteRange> argument_ranges;
    ByteRange call;            // receiver (or `new`, or invoke opcode) through ')'/'}'
    ByteRange enclosing_scope; // method body, or the whole file
    // smali only: register holding the receiver of a non-static invoke
    std::string smali_receiver;

    bool operator==(const CallSite&) const = default;
};

bool call_site_less(const CallSite& a, const CallSite& b);

// Finds every trigger occurrence outside comments and strings. Results are
// ordered by (file, line, column).
std::vector<CallSite> scan_unit(const LexedUnit& unit, const Ruleset& rules, Diagnostics* diag = nullptr);
std::vector<CallSite> scan_unit(const SourceUnit& unit, const Ruleset& rules, Diagnostics* diag = nullptr);

struct ScanOptions {
    std::set<std::string> ignore_dirs {"build", ".git"};
    std::uintmax_t max_file_bytes = 8u * 1024u * 1024u;
    unsigned jobs = 1;
};

// Reads every recognized source file below `app_root` (hidden and ignored
// directories skipped), sorted by normalized relative path. Unreadable and
// oversized files become warnings.
std::vector<SourceUnit> load_app_sources(const std::filesystem::path& app_root, const std::string& app_id,
    const ScanOptions& options, Diagnostics& diag);

std::vector<CallSite> scan_app(const std::filesystem::path& app_root, const std::string& app_id, const Ruleset& rules,
    const ScanOptions& options, Diagnostics& diag);

// App ids of a corpus: the non-hidden, non-ignored top-level directories,
// sorted.
std::vector<std::string> list_apps(const std::filesystem::path& corpus_root, const ScanOptions& options);

} // namespace pqscan
