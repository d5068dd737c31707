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

#include <pqscan/report.hpp>

#include "json_util.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace pqscan {

namespace {

bool belongs_to_row(const Finding& f)
{
    return carries_algorithm(f.api_kind);
}

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string markdown_cell(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (c == '|')
            out += '\\';
        out += c;
    }
    return out;
}

json::ordered safety_json(const SafetyLabel& s)
{
    json::ordered j;
    j["label"] = std::string(to_string(s.label));
    if (s.condition)
        j["condition"] = *s.condition;
    j["rationale_rule_id"] = s.rationale_rule_id;
    return j;
}

} // namespace

int conservativeness(Label label)
{
    switch (label) {
    case Label::QuantumVulnerable: return 0;
    case Label::Unknown: return 1;
    case Label::ConditionallySafe: return 2;
    case Label::QuantumSafe: return 3;
    }
    return 1;
}

CorpusReport aggregate(const std::vector<Finding>& input, const std::vector<std::string>& apps,
    std::string corpus_root, std::string generated_at)
{
    std::vector<Finding> findings = input;
    std::sort(findings.begin(), findings.end(), finding_less);

    CorpusReport r;
    r.generated_at = std::move(generated_at);
    r.corpus_root = std::move(corpus_root);
    r.total_findings = findings.size();

    std::set<std::string> all_apps(apps.begin(), apps.end());
    for (const auto& f : findings)
        all_apps.insert(f.location.app_id);
    r.total_apps = all_apps.size();

    AppSummary empty;
    for (auto flag : all_misuse_flags())
        empty.misuse_counts[flag] = 0;
    for (const auto& app : all_apps)
        r.per_app[app] = empty;

    struct Acc {
        std::size_t instances = 0;
        std::set<std::string> apps;
        SafetyLabel safety;
        bool has_label = false;
    };
    std::map<std::string, Acc> rows;
    for (const auto& f : findings) {
        AppSummary& s = r.per_app[f.location.app_id];
        switch (f.safety.label) {
        case Label::QuantumVulnerable: ++s.vulnerable_count; break;
        case Label::QuantumSafe: ++s.safe_count; break;
        case Label::ConditionallySafe: ++s.conditional_count; break;
        case Label::Unknown: ++s.unknown_count; break;
        }
        for (auto flag : f.misuse_flags)
            ++s.misuse_counts[flag];
        if (f.api_kind == ApiKind::PqcLibraryReference)
            ++s.pqc_reference_count;

        if (!belongs_to_row(f))
            continue;
        const std::string key = f.spec ? canonical_algorithm_key(*f.spec) : std::string(kUnresolvedRowKey);
        Acc& acc = rows[key];
        ++acc.instances;
        acc.apps.insert(f.location.app_id);
        if (!acc.has_label || conservativeness(f.safety.label) < conservativeness(acc.safety.label)) {
            acc.safety = f.safety;
            acc.has_label = true;
        }
    }
    for (auto& [key, acc] : rows)
        r.rows.push_back({key, acc.instances, acc.apps.size(), acc.safety});
    std::sort(r.rows.begin(), r.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::make_tuple(b.instance_count, a.algorithm_key) < std::make_tuple(a.instance_count, b.algorithm_key);
    });
    return r;
}

std::string_view label_symbol(Label label)
{
    switch (label) {
    case Label::QuantumSafe: return "✓";
    case Label::QuantumVulnerable: return "✗";
    case Label::ConditionallySafe: return "✓*";
    case Label::Unknown: return "?";
    }
    return "?";
}

std::string_view report_extension(ReportFormat format)
{
    switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "md";
    }
    return "txt";
}

std::string render(const CorpusReport& report, ReportFormat format)
{
    switch (format) {
    case ReportFormat::Json: {
        json::ordered j;
        j["generated_at"] = report.generated_at;
        j["corpus_root"] = report.corpus_root;
        j["total_apps"] = report.total_apps;
        j["total_findings"] = report.total_findings;
        auto rows = json::ordered::array();
        for (const auto& row : report.rows) {
            json::ordered o;
            o["algorithm_key"] = row.algorithm_key;
            o["instance_count"] = row.instance_count;
            o["app_count"] = row.app_count;
            o["safety"] = safety_json(row.safety);
            rows.push_back(std::move(o));
        }
        j["rows"] = std::move(rows);
        json::ordered per_app = json::ordered::object();
        for (const auto& [app, s] : report.per_app) {
            json::ordered o;
            o["vulnerable_count"] = s.vulnerable_count;
            o["safe_count"] = s.safe_count;
            o["conditional_count"] = s.conditional_count;
            o["unknown_count"] = s.unknown_count;
            json::ordered m = json::ordered::object();
            for (const auto& [flag, n] : s.misuse_counts)
                m[std::string(to_string(flag))] = n;
            o["misuse_counts"] = std::move(m);
            o["pqc_reference_count"] = s.pqc_reference_count;
            per_app[app] = std::move(o);
        }
        j["per_app"] = std::move(per_app);
        return json::pretty(j);
    }
    case ReportFormat::Csv: {
        std::string out = "algorithm_key,instance_count,app_count,label,condition\n";
        for (const auto& row : report.rows) {
            out += csv_field(row.algorithm_key) + "," + std::to_string(row.instance_count) + ","
                + std::to_string(row.app_count) + "," + std::string(to_string(row.safety.label)) + ","
                + csv_field(row.safety.condition.value_or("")) + "\n";
        }
        return out;
    }
    case ReportFormat::Markdown: {
        std::string out = "| Algorithm | # of instances | # of Apps | Post-Quantum-Safe |\n";
        out += "|---|---:|---:|:---:|\n";
        for (const auto& row : report.rows) {
            out += "| " + markdown_cell(row.algorithm_key) + " | " + std::to_string(row.instance_count) + " | "
                + std::to_string(row.app_count) + " | " + std::string(label_symbol(row.safety.label)) + " |\n";
        }
        std::vector<std::string> notes;
        for (const auto& row : report.rows)
            if (row.safety.condition && std::find(notes.begin(), notes.end(), *row.safety.condition) == notes.end())
                notes.push_back(*row.safety.condition);
        if (!notes.empty())
            out += "\n";
        for (const auto& n : notes)
            out += "\\* " + markdown_cell(n) + "\n";
        return out;
    }
    }
    return {};
}

} // namespace pqscan
