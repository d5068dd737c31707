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

#include <pqscan/findings_io.hpp>

#include "json_util.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace pqscan {

namespace {

using json::ordered;

ordered location_json(const SourceLocation& loc)
{
    ordered j;
    j["app_id"] = loc.app_id;
    j["file_path"] = loc.file_path;
    j["line"] = loc.line;
    j["column"] = loc.column;
    return j;
}

struct Reader {
    int line;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorCode::SchemaError, "line " + std::to_string(line) + ": " + what);
    }

    const nlohmann::json& field(const nlohmann::json& obj, const char* key) const
    {
        if (!obj.is_object())
            fail(std::string("expected an object holding '") + key + "'");
        auto it = obj.find(key);
        if (it == obj.end())
            fail(std::string("missing field '") + key + "'");
        return *it;
    }

    std::string str(const nlohmann::json& obj, const char* key) const
    {
        const auto& v = field(obj, key);
        if (!v.is_string())
            fail(std::string("field '") + key + "' must be a string");
        return v.get<std::string>();
    }

    int integer(const nlohmann::json& obj, const char* key) const
    {
        const auto& v = field(obj, key);
        if (!v.is_number_integer())
            fail(std::string("field '") + key + "' must be an integer");
        return v.get<int>();
    }

    std::size_t size(const nlohmann::json& obj, const char* key) const
    {
        const auto& v = field(obj, key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(std::string("field '") + key + "' must be a non-negative integer");
        return v.get<std::size_t>();
    }

    SourceLocation location(const nlohmann::json& j) const
    {
        SourceLocation loc;
        loc.app_id = str(j, "app_id");
        loc.file_path = str(j, "file_path");
        loc.line = integer(j, "line");
        loc.column = integer(j, "column");
        return loc;
    }

    template <typename T, typename Parse>
    T enumerated(const nlohmann::json& obj, const char* key, Parse&& parse) const
    {
        const std::string s = str(obj, key);
        auto v = parse(s);
        if (!v)
            fail(std::string("unknown ") + key + " '" + s + "'");
        return *v;
    }
};

} // namespace

std::string finding_to_json(const Finding& f)
{
    ordered j;
    j["location"] = location_json(f.location);
    j["api_kind"] = std::string(to_string(f.api_kind));
    j["pattern_id"] = f.pattern_id;
    j["resolution"] = std::string(to_string(f.resolution));
    if (f.spec) {
        ordered s;
        s["primitive"] = primitive_name(f.spec->primitive);
        if (f.spec->mode)
            s["mode"] = mode_name(*f.spec->mode);
        if (f.spec->padding)
            s["padding"] = padding_name(*f.spec->padding);
        if (f.spec->key_bits)
            s["key_bits"] = *f.spec->key_bits;
        s["raw"] = f.spec->raw;
        j["spec"] = std::move(s);
    }
    ordered safety;
    safety["label"] = std::string(to_string(f.safety.label));
    if (f.safety.condition)
        safety["condition"] = *f.safety.condition;
    safety["rationale_rule_id"] = f.safety.rationale_rule_id;
    j["safety"] = std::move(safety);
    auto flags = ordered::array();
    for (auto flag : f.misuse_flags)
        flags.push_back(std::string(to_string(flag)));
    j["misuse_flags"] = std::move(flags);
    j["evidence"] = f.evidence;
    auto trace = ordered::array();
    for (const auto& step : f.trace) {
        ordered s;
        s["location"] = location_json(step.location);
        s["rule"] = std::string(to_string(step.rule));
        trace.push_back(std::move(s));
    }
    j["trace"] = std::move(trace);
    if (f.origin) {
        ordered o;
        o["file_path"] = f.origin->file_path;
        o["offset"] = f.origin->offset;
        o["length"] = f.origin->length;
        o["line"] = f.origin->line;
        o["column"] = f.origin->column;
        j["origin"] = std::move(o);
    }
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Finding finding_from_json(std::string_view line, int line_number)
{
    Reader r {line_number};
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        r.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object())
        r.fail("record is not an object");
    Finding f;
    f.location = r.location(r.field(j, "location"));
    f.api_kind = r.enumerated<ApiKind>(j, "api_kind", api_kind_from_string);
    f.pattern_id = r.str(j, "pattern_id");
    f.resolution = r.enumerated<ResolutionStatus>(j, "resolution", resolution_status_from_string);
    if (j.contains("spec")) {
        const auto& s = j["spec"];
        AlgorithmSpec spec;
        spec.primitive = primitive_from_name(r.str(s, "primitive"));
        if (s.contains("mode"))
            spec.mode = mode_from_name(r.str(s, "mode"));
        if (s.contains("padding"))
            spec.padding = padding_from_name(r.str(s, "padding"));
        if (s.contains("key_bits"))
            spec.key_bits = r.integer(s, "key_bits");
        spec.raw = r.str(s, "raw");
        f.spec = std::move(spec);
    }
    if (f.spec.has_value() == (f.resolution == ResolutionStatus::Unresolved))
        r.fail("spec must be present exactly when the resolution is not Unresolved");
    const auto& safety = r.field(j, "safety");
    f.safety.label = r.enumerated<Label>(safety, "label", label_from_string);
    if (safety.contains("condition"))
        f.safety.condition = r.str(safety, "condition");
    f.safety.rationale_rule_id = r.str(safety, "rationale_rule_id");
    const auto& flags = r.field(j, "misuse_flags");
    if (!flags.is_array())
        r.fail("misuse_flags must be an array");
    for (const auto& flag : flags) {
        if (!flag.is_string())
            r.fail("misuse flag must be a string");
        auto v = misuse_flag_from_string(flag.get<std::string>());
        if (!v)
            r.fail("unknown misuse flag '" + flag.get<std::string>() + "'");
        f.misuse_flags.insert(*v);
    }
    f.evidence = r.str(j, "evidence");
    const auto& trace = r.field(j, "trace");
    if (!trace.is_array())
        r.fail("trace must be an array");
    for (const auto& step : trace) {
        ResolutionStep s;
        s.location = r.location(r.field(step, "location"));
        s.rule = r.enumerated<ResolutionRule>(step, "rule", resolution_rule_from_string);
        f.trace.push_back(std::move(s));
    }
    if (j.contains("origin")) {
        const auto& o = j["origin"];
        TextSpan span;
        span.file_path = r.str(o, "file_path");
        span.offset = r.size(o, "offset");
        span.length = r.size(o, "length");
        span.line = r.integer(o, "line");
        span.column = r.integer(o, "column");
        f.origin = std::move(span);
    }
    return f;
}

std::string header_to_json(const FindingsHeader& h)
{
    ordered j;
    j["schema_version"] = h.schema_version;
    j["corpus_root"] = h.corpus_root;
    j["apps"] = h.apps;
    j["generated_at"] = h.generated_at;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void persist_findings(const std::vector<Finding>& findings, const std::filesystem::path& path,
    const FindingsHeader& header)
{
    std::string text = header_to_json(header) + "\n";
    for (const auto& f : findings)
        text += finding_to_json(f) + "\n";
    json::write_file(path, text);
}

FindingsFile parse_findings(std::string_view text, std::string_view name)
{
    FindingsFile out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos)
            continue;
        if (line_no == 1 && line.find("\"schema_version\"") != std::string_view::npos) {
            Reader r {line_no};
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorCode::SchemaError, std::string(name) + ": line 1: invalid header: " + e.what());
            }
            out.header.schema_version = r.str(j, "schema_version");
            const auto& v = out.header.schema_version;
            const int major = std::atoi(v.substr(0, v.find('.')).c_str());
            const int ours = std::atoi(std::string(kFindingsSchemaVersion.substr(0, kFindingsSchemaVersion.find('.'))).c_str());
            if (major > ours)
                throw Error(ErrorCode::SchemaVersionMismatch,
                    std::string(name) + ": schema " + v + " is newer than supported " + std::string(kFindingsSchemaVersion));
            if (j.contains("corpus_root"))
                out.header.corpus_root = r.str(j, "corpus_root");
            if (j.contains("generated_at"))
                out.header.generated_at = r.str(j, "generated_at");
            if (j.contains("apps")) {
                if (!j["apps"].is_array())
                    r.fail("apps must be an array");
                for (const auto& a : j["apps"]) {
                    if (!a.is_string())
                        r.fail("apps must hold strings");
                    out.header.apps.push_back(a.get<std::string>());
                }
            }
            out.has_header = true;
            continue;
        }
        try {
            out.findings.push_back(finding_from_json(line, line_no));
        } catch (const Error& e) {
            std::string what = e.what();
            const std::string prefix = std::string(to_string(ErrorCode::SchemaError)) + ": ";
            if (what.starts_with(prefix))
                what.erase(0, prefix.size());
            throw Error(ErrorCode::SchemaError, std::string(name) + ": " + what);
        }
    }
    return out;
}

FindingsFile load_findings_file(const std::filesystem::path& path)
{
    return parse_findings(json::read_file(path), path.string());
}

std::vector<Finding> load_findings(const std::filesystem::path& path)
{
    return load_findings_file(path).findings;
}

std::string timestamp_or(const std::string& fixed)
{
    if (!fixed.empty())
        return fixed;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm {};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace pqscan
