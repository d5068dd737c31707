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

// Post-migration checks V1..V7 and the run-level summary.

#include <pqscan/migration.hpp>
#include <pqscan/patch.hpp>
#include <pqscan/ruleset.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

enum class CheckId {
    V1_applies,
    V2_target_eliminated,
    V3_no_new_vulnerable,
    V4_imports_resolve,
    V5_no_placeholders,
    V6_dependency_declared,
    V7_well_formed,
};

enum class Verdict { Pass, Fail, Skip };

std::string_view to_string(CheckId id);
std::optional<CheckId> check_id_from_string(std::string_view s);
const std::vector<CheckId>& all_check_ids();
std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct CheckResult {
    CheckId check_id = CheckId::V1_applies;
    Verdict verdict = Verdict::Skip;
    std::string detail;

    bool operator==(const CheckResult&) const = default;
};

struct ValidationReport {
    std::string task_id;
    TaskKind kind = TaskKind::HashUpgrade;
    std::vector<CheckResult> checks; // V1..V7 in order

    bool overall() const;
    const CheckResult& check(CheckId id) const;
    bool operator==(const ValidationReport&) const = default;
};

struct ValidationOptions {
    // Empty means the ruleset's placeholder markers.
    std::vector<std::string> placeholder_markers;
    std::vector<std::string> manifest_globs {"build.gradle*"};
};

// `after` is absent when the patch could not be applied; V1 then fails with
// `failure` as detail and the remaining checks are skipped.
ValidationReport validate_patch(const MigrationTask& task, const FileSet& before, const std::optional<FileSet>& after,
    const Ruleset& rules, const ValidationOptions& options = {}, const std::string& failure = {});

std::string validation_to_json(const ValidationReport& report);
// Throws Error{SchemaError}.
ValidationReport validation_from_json(std::string_view text, std::string_view name = "<validation>");

inline constexpr std::string_view kPassCriterion =
    "a task passes when every check that is not skipped passes (V1..V7)";

struct KindSummary {
    std::size_t attempted = 0;
    std::size_t passed = 0;
    std::map<CheckId, std::size_t> failures; // every check, zero included

    double pass_rate() const { return attempted == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(attempted); }
    bool operator==(const KindSummary&) const = default;
};

struct EvalSummary {
    std::map<TaskKind, KindSummary> per_kind; // kinds with at least one task
    std::map<CheckId, std::size_t> failure_histogram; // every check, zero included

    bool operator==(const EvalSummary&) const = default;
};

EvalSummary score_run(const std::vector<ValidationReport>& reports);
// Requires exactly one report per task. Throws Error{InvalidArgument}.
EvalSummary score_run(const std::vector<MigrationTask>& tasks, const std::vector<ValidationReport>& reports);
std::string eval_to_json(const EvalSummary& summary);

// Helpers the checks are built from.

// 1-based line numbers of `after` that are not part of the common
// subsequence with `before`.
std::vector<int> added_lines(std::string_view before, std::string_view after);
// Capitalized identifiers on the given lines that are new (absent from
// `preexisting`) and neither imported, declared in the file or a
// same-package file, nor built in.
std::vector<std::string> unresolved_types(const LexedUnit& unit, const std::vector<int>& lines,
    const std::map<std::string, std::set<std::string>>& package_types, const std::set<std::string>& preexisting = {});
// Unbalanced brackets or unterminated literals, described; empty when fine.
std::string well_formedness_problem(const LexedUnit& unit);

} // namespace pqscan
