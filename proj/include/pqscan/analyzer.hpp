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

// Scanner + resolver + classifier, end to end, for units, apps and corpora.

#include <pqscan/classifier.hpp>
#include <pqscan/dataflow.hpp>
#include <pqscan/diagnostics.hpp>
#include <pqscan/model.hpp>
#include <pqscan/ruleset.hpp>
#include <pqscan/scanner.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace pqscan {

// Pattern ids of findings that come from PQC reference detection rather than
// a trigger.
inline constexpr std::string_view kPqcImportPattern = "pqc-import";
inline constexpr std::string_view kPqcQualifiedPattern = "pqc-qualified-name";
inline constexpr std::string_view kPqcSmaliPattern = "pqc-smali-ref";

// Findings for the units of one app (the constant table spans all of them),
// sorted with finding_less.
std::vector<Finding> analyze_units(const std::vector<SourceUnit>& units, const Ruleset& rules, Diagnostics& diag,
    unsigned jobs = 1);

std::vector<Finding> analyze_app(const std::filesystem::path& app_root, const std::string& app_id,
    const Ruleset& rules, const ScanOptions& options, Diagnostics& diag);

struct CorpusScan {
    std::vector<std::string> apps;
    std::vector<Finding> findings;
};

CorpusScan analyze_corpus(const std::filesystem::path& corpus_root, const Ruleset& rules, const ScanOptions& options,
    Diagnostics& diag);

} // namespace pqscan
