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

// Corpus-level aggregation in the shape of a readiness table, and its
// renderings.

#include <pqscan/model.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

// Row key for algorithm-bearing findings that have no spec.
inline constexpr std::string_view kUnresolvedRowKey = "UNRESOLVED";

struct ReportRow {
    std::string algorithm_key;
    std::size_t instance_count = 0;
    std::size_t app_count = 0;
    // The most conservative label among the row's findings.
    SafetyLabel safety;

    bool operator==(const ReportRow&) const = default;
};

struct AppSummary {
    std::size_t vulnerable_count = 0;
    std::size_t safe_count = 0;
    std::size_t conditional_count = 0;
    std::size_t unknown_count = 0;
    std::map<MisuseFlag, std::size_t> misuse_counts; // every flag, zero included
    std::size_t pqc_reference_count = 0;

    bool operator==(const AppSummary&) const = default;
};

struct CorpusReport {
    std::string generated_at;
    std::string corpus_root;
    std::size_t total_apps = 0;
    std::size_t total_findings = 0;
    std::vector<ReportRow> rows;
    std::map<std::string, AppSummary> per_app;

    bool operator==(const CorpusReport&) const = default;
};

// Rows cover findings that name an algorithm (misuse-only findings are
// counted per app but have no row). `apps` lists every walked app, so apps
// without findings still count toward total_apps.
CorpusReport aggregate(const std::vector<Finding>& findings, const std::vector<std::string>& apps = {},
    std::string corpus_root = {}, std::string generated_at = {});

// Vulnerable, Unknown, Conditional, Safe: earlier is more conservative.
int conservativeness(Label label);

enum class ReportFormat { Json, Csv, Markdown };

std::string render(const CorpusReport& report, ReportFormat format);
std::string_view report_extension(ReportFormat format);

// ✓, ✗, ✓*, ?
std::string_view label_symbol(Label label);

} // namespace pqscan
