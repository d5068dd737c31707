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

#include <pqscan/validation.hpp>

#include <pqscan/analyzer.hpp>

#include "json_util.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace pqscan {

namespace {

const std::set<std::string, std::less<>>& builtin_types()
{
    static const std::set<std::string, std::less<>> names {
        // java.lang
        "Appendable", "ArithmeticException", "ArrayIndexOutOfBoundsException", "AutoCloseable", "Boolean", "Byte",
        "CharSequence", "Character", "Class", "ClassCastException", "ClassNotFoundException", "Cloneable",
        "Comparable", "Deprecated", "Double", "Enum", "Error", "Exception", "Float", "FunctionalInterface",
        "IllegalArgumentException", "IllegalStateException", "IndexOutOfBoundsException", "Integer",
        "InterruptedException", "Iterable", "Long", "Math", "NullPointerException", "Number",
        "NumberFormatException", "Object", "Override", "Process", "Record", "Runnable", "Runtime",
        "RuntimeException", "SafeVarargs", "SecurityException", "Short", "StackTraceElement", "StrictMath",
        "String", "StringBuffer", "StringBuilder", "SuppressWarnings", "System", "Thread", "ThreadLocal",
        "Throwable", "UnsupportedOperationException", "Void",
        // kotlin
        "Any", "Array", "BooleanArray", "ByteArray", "Char", "CharArray", "Collection", "Comparator", "DoubleArray",
        "FloatArray", "Int", "IntArray", "JvmField", "JvmOverloads", "JvmStatic", "Lazy", "List", "LongArray",
        "Map", "MutableList", "MutableMap", "MutableSet", "Nothing", "Pair", "Sequence", "Set", "ShortArray",
        "Suppress", "Throws", "Triple", "UByte", "UInt", "ULong", "Unit",
    };
    return names;
}

bool capitalized(std::string_view s)
{
    return s.size() > 1 && std::isupper(static_cast<unsigned char>(s[0]));
}

std::map<int, std::string_view> line_heads(const LexedUnit& unit)
{
    std::map<int, std::string_view> heads;
    for (const auto& t : unit.tokens())
        heads.try_emplace(t.line, t.text);
    return heads;
}

struct FileFacts {
    std::string package;
    std::set<std::string> imported;
    std::set<std::string> declared;
};

FileFacts file_facts(const LexedUnit& unit)
{
    FileFacts facts;
    const auto& toks = unit.tokens();
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        const bool line_start = i == 0 || toks[i - 1].line != t.line;
        if (line_start && (t.is_ident("package") || t.is_ident("import"))) {
            std::string dotted;
            std::string last;
            std::string alias;
            std::size_t j = i + 1;
            if (j < toks.size() && toks[j].is_ident("static"))
                ++j;
            for (; j < toks.size() && toks[j].line == t.line && !toks[j].is(";"); ++j) {
                if (toks[j].is_ident("as") && j + 1 < toks.size()) {
                    alias = std::string(toks[j + 1].text);
                    break;
                }
                dotted += toks[j].text;
                if (toks[j].kind == TokenKind::Identifier)
                    last = std::string(toks[j].text);
                else if (toks[j].is("*"))
                    last.clear();
            }
            if (t.is_ident("package"))
                facts.package = dotted;
            else if (!alias.empty())
                facts.imported.insert(alias);
            else if (!last.empty() && !dotted.ends_with("*"))
                facts.imported.insert(last);
            continue;
        }
        if (t.kind != TokenKind::Identifier || i == 0)
            continue;
        const Token& prev = toks[i - 1];
        static const std::set<std::string_view> introducers {"class", "interface", "enum", "object", "record",
            "typealias", "val", "var", "fun"};
        if (prev.kind == TokenKind::Identifier && introducers.contains(prev.text)) {
            facts.declared.insert(std::string(t.text));
            continue;
        }
        if (i + 1 < toks.size() && (prev.kind == TokenKind::Identifier || prev.is(">") || prev.is("]"))) {
            const Token& next = toks[i + 1];
            if (next.is("=") || next.is(";") || next.is(",") || next.is(")") || next.is(":"))
                facts.declared.insert(std::string(t.text));
        }
    }
    return facts;
}

bool is_source(std::string_view path)
{
    auto lang = language_for_path(path);
    return lang && *lang != Language::Smali;
}

std::vector<Finding> rescan(const std::string& app_id, const FileSet& files, const Ruleset& rules)
{
    Diagnostics diag;
    std::vector<SourceUnit> units;
    for (const auto& [path, content] : files)
        if (language_for_path(path))
            units.push_back(make_source_unit(app_id, path, content, diag));
    return analyze_units(units, rules, diag);
}

bool matches_target(const MigrationTask& task, const Finding& f)
{
    auto kind = task_kind_for(f);
    if (!kind || *kind != task.kind)
        return false;
    return task.kind != TaskKind::HashUpgrade || f.spec->primitive.kind == task.from;
}

using VulnKey = std::tuple<std::string, ApiKind, std::string>;

std::map<VulnKey, std::size_t> vulnerable_counts(const std::vector<Finding>& findings)
{
    std::map<VulnKey, std::size_t> out;
    for (const auto& f : findings)
        if (f.safety.label == Label::QuantumVulnerable)
            ++out[{f.location.file_path, f.api_kind, f.spec ? canonical_algorithm_key(*f.spec) : f.pattern_id}];
    return out;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string join(const std::vector<std::string>& items, std::size_t limit = 5)
{
    std::string out;
    for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
        if (i)
            out += ", ";
        out += items[i];
    }
    if (items.size() > limit)
        out += ", ... (" + std::to_string(items.size()) + " total)";
    return out;
}

// Lines of added `{}` pairs that form an empty body of a non-interface method.
std::vector<int> empty_method_lines(const LexedUnit& unit, const std::set<int>& lines)
{
    static const std::set<std::string_view> control {"if", "for", "while", "switch", "catch", "synchronized",
        "when", "try", "else", "do", "finally"};
    std::vector<int> out;
    const auto& toks = unit.tokens();
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
        if (!toks[i].is("{") || !toks[i + 1].is("}") || !lines.contains(toks[i].line))
            continue;
        std::size_t j = i - 1;
        // Java throws clause.
        std::size_t k = j;
        while (k > 0 && (toks[k].kind == TokenKind::Identifier || toks[k].is(".") || toks[k].is(",")))
            --k;
        if (k < j && toks[k + 1].is_ident("throws"))
            j = k;
        if (!toks[j].is(")"))
            continue;
        std::size_t open = j;
        int depth = 0;
        for (;; --open) {
            if (toks[open].is(")"))
                ++depth;
            else if (toks[open].is("(") && --depth == 0)
                break;
            if (open == 0)
                break;
        }
        if (depth != 0 || open == 0)
            continue;
        const Token& name = toks[open - 1];
        if (name.kind != TokenKind::Identifier || control.contains(name.text))
            continue;
        if (open >= 2 && (toks[open - 2].is_ident("new") || toks[open - 2].is(".")))
            continue;
        if (open < 2)
            continue;
        if (unit.inside_interface(toks[i].offset))
            continue;
        out.push_back(toks[i].line);
    }
    return out;
}

CheckResult make(CheckId id, Verdict v, std::string detail)
{
    return {id, v, std::move(detail)};
}

} // namespace

std::string_view to_string(CheckId id)
{
    switch (id) {
    case CheckId::V1_applies: return "V1_applies";
    case CheckId::V2_target_eliminated: return "V2_target_eliminated";
    case CheckId::V3_no_new_vulnerable: return "V3_no_new_vulnerable";
    case CheckId::V4_imports_resolve: return "V4_imports_resolve";
    case CheckId::V5_no_placeholders: return "V5_no_placeholders";
    case CheckId::V6_dependency_declared: return "V6_dependency_declared";
    case CheckId::V7_well_formed: return "V7_well_formed";
    }
    return "V1_applies";
}

const std::vector<CheckId>& all_check_ids()
{
    static const std::vector<CheckId> ids {CheckId::V1_applies, CheckId::V2_target_eliminated,
        CheckId::V3_no_new_vulnerable, CheckId::V4_imports_resolve, CheckId::V5_no_placeholders,
        CheckId::V6_dependency_declared, CheckId::V7_well_formed};
    return ids;
}

std::optional<CheckId> check_id_from_string(std::string_view s)
{
    for (auto id : all_check_ids())
        if (to_string(id) == s)
            return id;
    return std::nullopt;
}

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skip: return "skip";
    }
    return "skip";
}

std::optional<Verdict> verdict_from_string(std::string_view s)
{
    for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::Skip})
        if (to_string(v) == s)
            return v;
    return std::nullopt;
}

bool ValidationReport::overall() const
{
    return !checks.empty()
        && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.verdict != Verdict::Fail; });
}

const CheckResult& ValidationReport::check(CheckId id) const
{
    for (const auto& c : checks)
        if (c.check_id == id)
            return c;
    throw Error(ErrorCode::InvalidArgument, task_id + ": no result for " + std::string(to_string(id)));
}

std::vector<int> added_lines(std::string_view before, std::string_view after)
{
    std::vector<int> out;
    const FilePatch fp = diff_file("f", before, after, 0);
    for (const auto& h : fp.hunks) {
        int line = h.new_count > 0 ? h.new_start : h.new_start + 1;
        for (const auto& l : h.lines) {
            if (l.kind == '+')
                out.push_back(line);
            if (l.kind != '-')
                ++line;
        }
    }
    return out;
}

std::vector<std::string> unresolved_types(const LexedUnit& unit, const std::vector<int>& lines,
    const std::map<std::string, std::set<std::string>>& package_types, const std::set<std::string>& preexisting)
{
    const std::set<int> wanted(lines.begin(), lines.end());
    const FileFacts facts = file_facts(unit);
    const auto heads = line_heads(unit);
    const std::set<std::string>* siblings = nullptr;
    if (auto it = package_types.find(facts.package); it != package_types.end())
        siblings = &it->second;

    std::set<std::string> missing;
    const auto& toks = unit.tokens();
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind != TokenKind::Identifier || !wanted.contains(t.line) || !capitalized(t.text))
            continue;
        if (auto h = heads.find(t.line); h != heads.end() && (h->second == "import" || h->second == "package"))
            continue;
        if (i > 0 && (toks[i - 1].is(".") || toks[i - 1].is("?.")))
            continue;
        const std::string name(t.text);
        if (preexisting.contains(name))
            continue;
        if (facts.imported.contains(name) || facts.declared.contains(name) || builtin_types().contains(name)
            || (siblings && siblings->contains(name)))
            continue;
        missing.insert(name);
    }
    return {missing.begin(), missing.end()};
}

std::string well_formedness_problem(const LexedUnit& unit)
{
    const MaskedSource& m = unit.masked();
    if (m.unterminated_string)
        return "unterminated string literal";
    if (m.unterminated_comment)
        return "unterminated block comment";
    // smali writes array types as a lone '[' and pairs directives instead.
    const bool smali = unit.unit().language == Language::Smali;
    if (smali) {
        bool in_method = false;
        int number = 0;
        for (const auto& line : split_lines(m.text)) {
            ++number;
            const auto first = line.find_first_not_of(" \t");
            const std::string_view t = first == std::string::npos ? std::string_view() : std::string_view(line).substr(first);
            if (t.starts_with(".method")) {
                if (in_method)
                    return "nested .method at line " + std::to_string(number);
                in_method = true;
            } else if (t.starts_with(".end method")) {
                if (!in_method)
                    return "stray .end method at line " + std::to_string(number);
                in_method = false;
            }
        }
        if (in_method)
            return "unterminated .method";
    }
    std::vector<std::pair<char, std::size_t>> stack;
    for (std::size_t i = 0; i < m.text.size(); ++i) {
        const char c = m.text[i];
        if (m.in_literal(i) || (smali && (c == '[' || c == ']')))
            continue;
        if (c == '(' || c == '[' || c == '{') {
            stack.push_back({c, i});
        } else if (c == ')' || c == ']' || c == '}') {
            const char want = c == ')' ? '(' : c == ']' ? '[' : '{';
            if (stack.empty() || stack.back().first != want)
                return std::string("unbalanced '") + c + "' at line " + std::to_string(unit.lines().position(i).first);
            stack.pop_back();
        }
    }
    if (!stack.empty())
        return std::string("unclosed '") + stack.back().first + "' from line "
            + std::to_string(unit.lines().position(stack.back().second).first);
    return {};
}

ValidationReport validate_patch(const MigrationTask& task, const FileSet& before, const std::optional<FileSet>& after,
    const Ruleset& rules, const ValidationOptions& options, const std::string& failure)
{
    ValidationReport r;
    r.task_id = task.task_id;
    r.kind = task.kind;
    if (!after) {
        r.checks.push_back(make(CheckId::V1_applies, Verdict::Fail, failure.empty() ? "no patch applied" : failure));
        for (auto id : all_check_ids())
            if (id != CheckId::V1_applies)
                r.checks.push_back(make(id, Verdict::Skip, "patch not applied"));
        return r;
    }
    const FileSet& post = *after;

    std::vector<std::string> changed;
    for (const auto& [path, content] : post) {
        auto b = before.find(path);
        if (b == before.end() || b->second != content)
            changed.push_back(path);
    }
    r.checks.push_back(make(CheckId::V1_applies, Verdict::Pass,
        changed.empty() ? "applied; no file changed" : "applied; changed " + join(changed)));

    const auto pre_findings = rescan(task.app_id, before, rules);
    const auto post_findings = rescan(task.app_id, post, rules);

    std::vector<std::string> remaining;
    for (const auto& f : post_findings)
        if (matches_target(task, f))
            remaining.push_back(f.location.file_path + ":" + std::to_string(f.location.line));
    r.checks.push_back(remaining.empty()
            ? make(CheckId::V2_target_eliminated, Verdict::Pass, "no target finding remains")
            : make(CheckId::V2_target_eliminated, Verdict::Fail, "target findings remain at " + join(remaining)));

    const auto vb = vulnerable_counts(pre_findings);
    std::vector<std::string> introduced;
    for (const auto& [key, n] : vulnerable_counts(post_findings)) {
        auto it = vb.find(key);
        if (n > (it == vb.end() ? 0 : it->second))
            introduced.push_back(std::get<2>(key) + " in " + std::get<0>(key));
    }
    r.checks.push_back(introduced.empty()
            ? make(CheckId::V3_no_new_vulnerable, Verdict::Pass, "no new quantum-vulnerable finding")
            : make(CheckId::V3_no_new_vulnerable, Verdict::Fail, "new quantum-vulnerable uses: " + join(introduced)));

    std::map<std::string, std::unique_ptr<LexedUnit>> lexed;
    for (const auto& path : changed) {
        auto lang = language_for_path(path);
        lexed[path] = std::make_unique<LexedUnit>(
            SourceUnit {task.app_id, path, lang ? *lang : lexing_language_for_path(path), post.at(path)});
    }
    std::map<std::string, std::vector<int>> added_by_file;
    for (const auto& path : changed) {
        auto b = before.find(path);
        added_by_file[path] = added_lines(b == before.end() ? std::string_view() : std::string_view(b->second), post.at(path));
    }

    std::map<std::string, std::set<std::string>> package_types;
    for (const auto& [path, content] : post) {
        if (!is_source(path))
            continue;
        LexedUnit u(SourceUnit {task.app_id, path, *language_for_path(path), content});
        const FileFacts facts = file_facts(u);
        const auto& toks = u.tokens();
        for (std::size_t i = 1; i < toks.size(); ++i) {
            static const std::set<std::string_view> kw {"class", "interface", "enum", "object", "record"};
            if (toks[i].kind == TokenKind::Identifier && toks[i - 1].kind == TokenKind::Identifier
                && kw.contains(toks[i - 1].text))
                package_types[facts.package].insert(std::string(toks[i].text));
        }
    }
    std::vector<std::string> unresolved;
    bool any_source = false;
    for (const auto& path : changed) {
        if (!is_source(path))
            continue;
        any_source = true;
        std::set<std::string> preexisting;
        if (auto b = before.find(path); b != before.end()) {
            LexedUnit old(SourceUnit {task.app_id, path, *language_for_path(path), b->second});
            for (const auto& t : old.tokens())
                if (t.kind == TokenKind::Identifier)
                    preexisting.insert(std::string(t.text));
        }
        for (const auto& name : unresolved_types(*lexed[path], added_by_file[path], package_types, preexisting))
            unresolved.push_back(name + " (" + path + ")");
    }
    if (!any_source)
        r.checks.push_back(make(CheckId::V4_imports_resolve, Verdict::Pass, "no Java or Kotlin source changed"));
    else
        r.checks.push_back(unresolved.empty()
                ? make(CheckId::V4_imports_resolve, Verdict::Pass, "every new type reference resolves")
                : make(CheckId::V4_imports_resolve, Verdict::Fail, "unresolved types: " + join(unresolved)));

    const auto& markers = options.placeholder_markers.empty() ? rules.placeholder_markers : options.placeholder_markers;
    std::vector<std::string> placeholders;
    for (const auto& path : changed) {
        const LexedUnit& u = *lexed[path];
        for (int line : added_by_file[path]) {
            const std::string text = lower(u.lines().line_text(u.content(), line));
            for (const auto& m : markers)
                if (text.find(lower(m)) != std::string::npos)
                    placeholders.push_back("'" + m + "' at " + path + ":" + std::to_string(line));
        }
        if (is_source(path)) {
            const std::set<int> lines(added_by_file[path].begin(), added_by_file[path].end());
            for (int line : empty_method_lines(u, lines))
                placeholders.push_back("empty method body at " + path + ":" + std::to_string(line));
        }
    }
    r.checks.push_back(placeholders.empty()
            ? make(CheckId::V5_no_placeholders, Verdict::Pass, "no placeholder in changed lines")
            : make(CheckId::V5_no_placeholders, Verdict::Fail, "placeholders: " + join(placeholders)));

    if (!is_pqc(task.kind) || !task.expected_dependency_marker) {
        r.checks.push_back(make(CheckId::V6_dependency_declared, Verdict::Skip, "not a PQC task"));
    } else {
        const std::string& marker = *task.expected_dependency_marker;
        std::vector<std::string> manifests;
        bool found = false;
        for (const auto& [path, content] : post) {
            if (!is_manifest(path, options.manifest_globs))
                continue;
            manifests.push_back(path);
            LexedUnit u(SourceUnit {task.app_id, path, Language::Kotlin, content});
            // Commented-out declarations do not count.
            for (const auto& lit : u.masked().literals)
                if (content.substr(lit.begin, lit.size()).find(marker) != std::string::npos)
                    found = true;
        }
        if (found)
            r.checks.push_back(make(CheckId::V6_dependency_declared, Verdict::Pass, marker + " declared"));
        else if (manifests.empty())
            r.checks.push_back(make(CheckId::V6_dependency_declared, Verdict::Fail, "no build manifest in the task context"));
        else
            r.checks.push_back(make(CheckId::V6_dependency_declared, Verdict::Fail,
                marker + " is not declared in " + join(manifests)));
    }

    std::vector<std::string> malformed;
    for (const auto& path : changed)
        if (auto problem = well_formedness_problem(*lexed[path]); !problem.empty())
            malformed.push_back(path + ": " + problem);
    r.checks.push_back(malformed.empty()
            ? make(CheckId::V7_well_formed, Verdict::Pass, "changed files are well formed")
            : make(CheckId::V7_well_formed, Verdict::Fail, join(malformed)));
    return r;
}

std::string validation_to_json(const ValidationReport& r)
{
    json::ordered j;
    j["task_id"] = r.task_id;
    j["kind"] = std::string(to_string(r.kind));
    j["overall"] = r.overall() ? "pass" : "fail";
    auto checks = json::ordered::array();
    for (const auto& c : r.checks) {
        json::ordered o;
        o["check_id"] = std::string(to_string(c.check_id));
        o["verdict"] = std::string(to_string(c.verdict));
        o["detail"] = c.detail;
        checks.push_back(std::move(o));
    }
    j["checks"] = std::move(checks);
    return json::pretty(j);
}

ValidationReport validation_from_json(std::string_view text, std::string_view name)
{
    auto fail = [&](const std::string& what) -> ValidationReport {
        throw Error(ErrorCode::SchemaError, std::string(name) + ": " + what);
    };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        return fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("task_id") || !j["task_id"].is_string() || !j.contains("kind")
        || !j["kind"].is_string() || !j.contains("checks") || !j["checks"].is_array())
        return fail("expected task_id, kind and checks");
    ValidationReport r;
    r.task_id = j["task_id"].get<std::string>();
    auto kind = task_kind_from_string(j["kind"].get<std::string>());
    if (!kind)
        return fail("unknown task kind");
    r.kind = *kind;
    for (const auto& c : j["checks"]) {
        if (!c.is_object() || !c.contains("check_id") || !c.contains("verdict") || !c["check_id"].is_string()
            || !c["verdict"].is_string())
            return fail("malformed check");
        auto id = check_id_from_string(c["check_id"].get<std::string>());
        auto v = verdict_from_string(c["verdict"].get<std::string>());
        if (!id || !v)
            return fail("unknown check id or verdict");
        r.checks.push_back({*id, *v, c.contains("detail") && c["detail"].is_string() ? c["detail"].get<std::string>() : ""});
    }
    if (r.checks.size() != all_check_ids().size())
        return fail("expected " + std::to_string(all_check_ids().size()) + " checks");
    for (std::size_t i = 0; i < r.checks.size(); ++i)
        if (r.checks[i].check_id != all_check_ids()[i])
            return fail("checks out of order");
    return r;
}

EvalSummary score_run(const std::vector<ValidationReport>& reports)
{
    EvalSummary s;
    for (auto id : all_check_ids())
        s.failure_histogram[id] = 0;
    for (const auto& r : reports) {
        KindSummary& k = s.per_kind[r.kind];
        if (k.failures.empty())
            for (auto id : all_check_ids())
                k.failures[id] = 0;
        ++k.attempted;
        if (r.overall())
            ++k.passed;
        for (const auto& c : r.checks) {
            if (c.verdict != Verdict::Fail)
                continue;
            ++k.failures[c.check_id];
            ++s.failure_histogram[c.check_id];
        }
    }
    return s;
}

EvalSummary score_run(const std::vector<MigrationTask>& tasks, const std::vector<ValidationReport>& reports)
{
    std::set<std::string> ids;
    for (const auto& t : tasks)
        ids.insert(t.task_id);
    std::set<std::string> seen;
    for (const auto& r : reports) {
        if (!ids.contains(r.task_id))
            throw Error(ErrorCode::InvalidArgument, "report for unknown task " + r.task_id);
        if (!seen.insert(r.task_id).second)
            throw Error(ErrorCode::InvalidArgument, "two reports for task " + r.task_id);
    }
    if (seen.size() != ids.size())
        throw Error(ErrorCode::InvalidArgument, "some tasks have no report");
    return score_run(reports);
}

std::string eval_to_json(const EvalSummary& s)
{
    json::ordered j;
    j["pass_criterion"] = std::string(kPassCriterion);
    std::size_t total = 0;
    for (const auto& [kind, k] : s.per_kind)
        total += k.attempted;
    j["total_tasks"] = total;
    json::ordered kinds = json::ordered::object();
    for (const auto& [kind, k] : s.per_kind) {
        json::ordered o;
        o["attempted"] = k.attempted;
        o["passed"] = k.passed;
        o["pass_rate"] = k.pass_rate();
        json::ordered f = json::ordered::object();
        for (const auto& [id, n] : k.failures)
            f[std::string(to_string(id))] = n;
        o["failures"] = std::move(f);
        kinds[std::string(to_string(kind))] = std::move(o);
    }
    j["per_kind"] = std::move(kinds);
    json::ordered h = json::ordered::object();
    for (const auto& [id, n] : s.failure_histogram)
        h[std::string(to_string(id))] = n;
    j["failure_histogram"] = std::move(h);
    return json::pretty(j);
}

} // namespace pqscan
