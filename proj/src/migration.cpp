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

#include <pqscan/migration.hpp>

#include "json_util.hpp"

#include <algorithm>
#include <fnmatch.h>
#include <numeric>
#include <set>
#include <tuple>

namespace pqscan {

namespace fs = std::filesystem;

namespace {

std::string display_name(PrimitiveKind k)
{
    switch (k) {
    case PrimitiveKind::SHA1: return "SHA-1";
    case PrimitiveKind::SHA256: return "SHA-256";
    case PrimitiveKind::SHA512: return "SHA-512";
    case PrimitiveKind::MD5: return "MD5";
    case PrimitiveKind::KYBER: return "Kyber (ML-KEM)";
    case PrimitiveKind::DILITHIUM: return "Dilithium (ML-DSA)";
    default: return primitive_name(Primitive(k));
    }
}

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

std::vector<std::string> find_manifests(const fs::path& app_root, const std::vector<std::string>& globs)
{
    std::vector<std::string> out;
    std::error_code ec;
    if (!fs::is_directory(app_root, ec))
        return out;
    fs::recursive_directory_iterator it(app_root, fs::directory_options::skip_permission_denied, ec), end;
    for (; !ec && it != end; it.increment(ec)) {
        const std::string name = it->path().filename().string();
        if (it->is_directory(ec)) {
            if (name.starts_with(".") || name == "build")
                it.disable_recursion_pending();
            continue;
        }
        if (!is_manifest(name, globs))
            continue;
        auto rel = normalize_relative_path(fs::relative(it->path(), app_root, ec).generic_string());
        if (rel)
            out.push_back(*rel);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool same_site(const Finding& a, const Finding& b)
{
    return a.location == b.location && a.pattern_id == b.pattern_id;
}

struct Edit {
    std::size_t offset;
    std::size_t length;
    std::string replacement;

    bool operator==(const Edit&) const = default;
};

std::string quoted(std::string_view s)
{
    return "\"" + std::string(s) + "\"";
}

// Whether `text` is a string literal naming `from`. Concatenations are
// accepted as long as they are quoted at both ends.
bool origin_names(std::string_view text, PrimitiveKind from)
{
    if (text.size() < 2 || text.front() != '"' || text.back() != '"')
        return false;
    const std::string_view inner = text.substr(1, text.size() - 2);
    if (inner.find('"') != std::string_view::npos)
        return true;
    try {
        return parse_transformation(inner).primitive.kind == from;
    } catch (const Error&) {
        return false;
    }
}

} // namespace

std::string_view to_string(TaskKind kind)
{
    switch (kind) {
    case TaskKind::HashUpgrade: return "HashUpgrade";
    case TaskKind::PqcKemIntegration: return "PqcKemIntegration";
    case TaskKind::PqcSignatureIntegration: return "PqcSignatureIntegration";
    }
    return "HashUpgrade";
}

std::optional<TaskKind> task_kind_from_string(std::string_view s)
{
    for (auto k : {TaskKind::HashUpgrade, TaskKind::PqcKemIntegration, TaskKind::PqcSignatureIntegration})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

bool is_pqc(TaskKind kind)
{
    return kind != TaskKind::HashUpgrade;
}

std::string_view exemplar_dir(TaskKind kind)
{
    switch (kind) {
    case TaskKind::HashUpgrade: return "hash-upgrade";
    case TaskKind::PqcKemIntegration: return "pqc-kem";
    case TaskKind::PqcSignatureIntegration: return "pqc-signature";
    }
    return "hash-upgrade";
}

std::string_view to_string(PromptMode mode)
{
    return mode == PromptMode::Edit ? "Edit" : "Agentic";
}

std::optional<TaskKind> task_kind_for(const Finding& f)
{
    if (!f.spec || f.resolution == ResolutionStatus::Unresolved || f.safety.label == Label::Unknown)
        return std::nullopt;
    const PrimitiveKind p = f.spec->primitive.kind;
    // PQC integration is a source-level change; disassembly is not edited.
    const auto lang = language_for_path(f.location.file_path);
    const bool source = lang && *lang != Language::Smali;
    switch (f.api_kind) {
    case ApiKind::DigestFactory:
        if (p == PrimitiveKind::SHA1 || p == PrimitiveKind::MD5)
            return TaskKind::HashUpgrade;
        break;
    case ApiKind::CipherFactory:
    case ApiKind::KeyPairGeneratorFactory:
        if (p == PrimitiveKind::RSA && source)
            return TaskKind::PqcKemIntegration;
        break;
    case ApiKind::SignatureFactory:
        if ((p == PrimitiveKind::RSA || p == PrimitiveKind::DSA || p == PrimitiveKind::EC) && source)
            return TaskKind::PqcSignatureIntegration;
        break;
    default: break;
    }
    return std::nullopt;
}

bool is_manifest(std::string_view path, const std::vector<std::string>& globs)
{
    const std::string name(path.substr(path.rfind('/') == std::string_view::npos ? 0 : path.rfind('/') + 1));
    for (const auto& g : globs)
        if (fnmatch(g.c_str(), name.c_str(), 0) == 0)
            return true;
    return false;
}

std::vector<MigrationTask> plan_tasks(const std::vector<Finding>& input, const MigrationPolicy& policy,
    const fs::path& corpus_root)
{
    std::vector<Finding> findings = input;
    std::sort(findings.begin(), findings.end(), finding_less);

    using GroupKey = std::tuple<std::string, TaskKind, PrimitiveKind>;
    std::map<GroupKey, std::vector<const Finding*>> groups;
    for (const auto& f : findings) {
        auto kind = task_kind_for(f);
        if (!kind)
            continue;
        if (*kind == TaskKind::HashUpgrade ? !policy.hash_upgrades : !policy.pqc)
            continue;
        const PrimitiveKind from = *kind == TaskKind::HashUpgrade ? f.spec->primitive.kind : PrimitiveKind::Other;
        groups[{f.location.app_id, *kind, from}].push_back(&f);
    }

    std::map<std::string, std::vector<std::string>> manifests;
    std::map<std::pair<std::string, std::string>, int> counters;
    std::vector<MigrationTask> tasks;
    for (const auto& [key, members] : groups) {
        const auto& [app, kind, from] = key;
        if (!manifests.contains(app))
            manifests[app] = corpus_root.empty() ? std::vector<std::string>{}
                                                 : find_manifests(corpus_root / app, policy.manifest_globs);

        std::vector<std::string> files;
        auto file_index = [&](const std::string& path) {
            auto it = std::find(files.begin(), files.end(), path);
            if (it != files.end())
                return static_cast<std::size_t>(it - files.begin());
            files.push_back(path);
            return files.size() - 1;
        };
        std::vector<std::vector<std::size_t>> touched;
        for (const Finding* f : members) {
            std::vector<std::size_t> ids {file_index(f->location.file_path)};
            for (const auto& step : f->trace)
                ids.push_back(file_index(step.location.file_path));
            if (f->origin)
                ids.push_back(file_index(f->origin->file_path));
            touched.push_back(std::move(ids));
        }
        UnionFind uf(files.size());
        for (const auto& ids : touched)
            for (std::size_t id : ids)
                uf.unite(ids.front(), id);

        std::map<std::size_t, std::pair<std::set<std::string>, std::vector<Finding>>> clusters;
        for (std::size_t i = 0; i < members.size(); ++i) {
            auto& c = clusters[uf.find(touched[i].front())];
            for (std::size_t id : touched[i])
                c.first.insert(files[id]);
            c.second.push_back(*members[i]);
        }
        std::vector<std::pair<std::set<std::string>, std::vector<Finding>>> ordered;
        for (auto& [root, c] : clusters)
            ordered.push_back(std::move(c));
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return *a.first.begin() < *b.first.begin(); });

        for (auto& [cluster_files, targets] : ordered) {
            MigrationTask t;
            t.app_id = app;
            t.kind = kind;
            std::string infix(exemplar_dir(kind));
            if (kind == TaskKind::HashUpgrade) {
                t.from = from;
                t.to = PrimitiveKind::SHA256;
                infix = "hash-" + lower(primitive_name(Primitive(from)));
            } else {
                t.from = PrimitiveKind::Other;
                t.to = kind == TaskKind::PqcKemIntegration ? PrimitiveKind::KYBER : PrimitiveKind::DILITHIUM;
                t.expected_dependency_marker = policy.dependency_marker;
            }
            const int n = ++counters[{app, infix}];
            char num[16];
            std::snprintf(num, sizeof num, "%03d", n);
            t.task_id = app + "-" + infix + "-" + num;
            std::set<std::string> ctx = cluster_files;
            for (const auto& m : manifests[app])
                ctx.insert(m);
            t.context_files.assign(ctx.begin(), ctx.end());
            t.target_findings = std::move(targets);
            tasks.push_back(std::move(t));
        }
    }
    return tasks;
}

FileSet read_context_files(const MigrationTask& task, const fs::path& app_root)
{
    FileSet files;
    for (const auto& path : task.context_files) {
        const fs::path full = app_root / path;
        std::error_code ec;
        if (!fs::is_regular_file(full, ec))
            throw Error(ErrorCode::MissingContextFile, task.task_id + ": " + path + " is not readable");
        try {
            files[path] = json::read_file(full);
        } catch (const Error& e) {
            throw Error(ErrorCode::MissingContextFile, task.task_id + ": " + path + ": " + e.what());
        }
    }
    return files;
}

std::optional<CallSite> find_call_site(const Finding& f, const LexedUnit& unit, const Ruleset& rules)
{
    for (auto& site : scan_unit(unit, rules))
        if (site.location == f.location && site.matched_pattern_id == f.pattern_id)
            return site;
    return std::nullopt;
}

Patch apply_hash_upgrade(const MigrationTask& task, const FileSet& files, const Ruleset& rules,
    const std::vector<Finding>& app_findings, Diagnostics* diag)
{
    if (task.kind != TaskKind::HashUpgrade)
        throw Error(ErrorCode::InvalidArgument, task.task_id + ": not a hash upgrade task");
    const std::string replacement = quoted(kHashTargetName);

    auto is_target = [&](const Finding& f) {
        return std::any_of(task.target_findings.begin(), task.target_findings.end(),
            [&](const Finding& t) { return same_site(t, f); });
    };

    std::map<std::string, std::vector<Edit>> edits;
    for (const auto& f : task.target_findings) {
        const std::string where = task.task_id + ": " + to_string(f.location);
        if (f.resolution == ResolutionStatus::Unresolved || !f.spec || !f.origin)
            throw Error(ErrorCode::UnresolvedTarget, where + " has no resolved definition to rewrite");
        if (f.spec->primitive.kind != task.from)
            throw Error(ErrorCode::InvalidArgument, where + " does not use " + display_name(task.from));
        const TextSpan& origin = *f.origin;
        auto file = files.find(origin.file_path);
        if (file == files.end())
            throw Error(ErrorCode::UnresolvedTarget, where + ": defining file " + origin.file_path + " is not in the task context");
        if (origin.offset + origin.length > file->second.size())
            throw Error(ErrorCode::UnresolvedTarget, where + ": definition lies outside " + origin.file_path);
        if (!origin_names(file->second.substr(origin.offset, origin.length), task.from))
            throw Error(ErrorCode::UnresolvedTarget,
                where + ": " + origin.file_path + ":" + std::to_string(origin.line) + " no longer holds the "
                    + display_name(task.from) + " literal");

        const bool shared = std::any_of(app_findings.begin(), app_findings.end(), [&](const Finding& other) {
            return other.origin && other.origin->file_path == origin.file_path && other.origin->offset == origin.offset
                && !is_target(other);
        });
        if (!shared) {
            edits[origin.file_path].push_back({origin.offset, origin.length, replacement});
            continue;
        }

        auto site_file = files.find(f.location.file_path);
        if (site_file == files.end())
            throw Error(ErrorCode::UnresolvedTarget, where + ": call site file is not in the task context");
        auto lang = language_for_path(f.location.file_path);
        if (!lang || *lang == Language::Smali)
            throw Error(ErrorCode::SharedLiteralConflict,
                where + ": the definition at " + origin.file_path + ":" + std::to_string(origin.line)
                    + " is shared with findings outside the task and the call site cannot be rewritten");
        LexedUnit unit(SourceUnit {f.location.app_id, f.location.file_path, *lang, site_file->second});
        auto site = find_call_site(f, unit, rules);
        const Trigger* trig = rules.find_trigger(f.pattern_id);
        if (!site || !trig || !trig->arg_index_of_algorithm)
            throw Error(ErrorCode::SharedLiteralConflict, where + ": shared definition and no rewritable call site");
        int idx = *trig->arg_index_of_algorithm;
        if (idx < 0)
            idx += static_cast<int>(site->argument_ranges.size());
        if (idx < 0 || idx >= static_cast<int>(site->argument_ranges.size()))
            throw Error(ErrorCode::SharedLiteralConflict, where + ": shared definition and no rewritable call site");
        const ByteRange arg = site->argument_ranges[static_cast<std::size_t>(idx)];
        edits[f.location.file_path].push_back({arg.begin, arg.size(), replacement});
        if (diag)
            diag->note(f.location.app_id + "/" + f.location.file_path, f.location.line,
                "definition at " + origin.file_path + ":" + std::to_string(origin.line)
                    + " is shared with findings outside " + task.task_id + "; rewrote the call site instead");
    }

    FileSet after = files;
    for (auto& [path, list] : edits) {
        std::sort(list.begin(), list.end(), [](const Edit& a, const Edit& b) { return a.offset < b.offset; });
        list.erase(std::unique(list.begin(), list.end()), list.end());
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i].offset < list[i - 1].offset + list[i - 1].length)
                throw Error(ErrorCode::SharedLiteralConflict, task.task_id + ": overlapping rewrites in " + path);
        std::string& text = after[path];
        for (auto it = list.rbegin(); it != list.rend(); ++it)
            text.replace(it->offset, it->length, it->replacement);
    }
    return diff_file_sets(files, after);
}

ExemplarLibrary ExemplarLibrary::load(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw Error(ErrorCode::IoError, dir.string() + ": exemplar directory not found");
    ExemplarLibrary lib;
    for (auto kind : {TaskKind::HashUpgrade, TaskKind::PqcKemIntegration, TaskKind::PqcSignatureIntegration}) {
        const fs::path sub = dir / exemplar_dir(kind);
        if (!fs::is_directory(sub, ec))
            continue;
        for (const auto& entry : fs::directory_iterator(sub, ec)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".diff")
                continue;
            lib.add(kind, entry.path().stem().string(), json::read_file(entry.path()));
        }
    }
    return lib;
}

void ExemplarLibrary::add(TaskKind kind, std::string name, std::string diff)
{
    m_entries[kind][std::move(name)] = std::move(diff);
}

std::vector<std::string> ExemplarLibrary::for_kind(TaskKind kind) const
{
    std::vector<std::string> out;
    if (auto it = m_entries.find(kind); it != m_entries.end())
        for (const auto& [name, diff] : it->second)
            out.push_back(diff);
    return out;
}

PromptBundle build_prompt(const MigrationTask& task, PromptMode mode, const FileSet& files,
    const ExemplarLibrary& exemplars)
{
    PromptBundle b;
    b.task = task;
    b.mode = mode;
    for (const auto& path : task.context_files) {
        auto it = files.find(path);
        if (it == files.end())
            throw Error(ErrorCode::MissingContextFile, task.task_id + ": context file " + path + " is missing");
        b.manifest.push_back(path);
        b.workspace[path] = it->second;
        if (mode == PromptMode::Edit)
            b.files.push_back({path, it->second});
    }
    b.exemplar_diffs = exemplars.for_kind(task.kind);

    std::string s = "Task " + task.task_id + " (" + std::string(to_string(task.kind)) + ")\n";
    switch (task.kind) {
    case TaskKind::HashUpgrade:
        s += "Goal: replace " + display_name(task.from) + " with " + display_name(task.to)
            + ". Use the algorithm name \"" + std::string(kHashTargetName) + "\".\n";
        break;
    case TaskKind::PqcKemIntegration:
        s += "Goal: move RSA key establishment to " + display_name(task.to)
            + ". Target API: the Kyber KEM of the BouncyCastle PQC provider (" + std::string(kPqcProviderClass) + ").\n";
        break;
    case TaskKind::PqcSignatureIntegration:
        s += "Goal: move classical signatures to " + display_name(task.to)
            + ". Target API: Signature.getInstance(\"Dilithium\", provider) with the BouncyCastle PQC provider ("
            + std::string(kPqcProviderClass) + ").\n";
        break;
    }
    s += "Sites to migrate:\n";
    for (const auto& f : task.target_findings)
        s += "- " + f.location.file_path + ":" + std::to_string(f.location.line) + " " + f.pattern_id + " "
            + (f.spec ? f.spec->raw : std::string("?")) + "\n";
    s += "Constraints:\n";
    s += "- Produce a unified diff only.\n";
    s += "- Touch only the listed files; keep unrelated code unchanged.\n";
    s += "- Every type you introduce must be imported or declared.\n";
    if (task.expected_dependency_marker)
        s += "- Declare the dependency " + *task.expected_dependency_marker + " in the build manifest.\n";
    b.instructions = std::move(s);
    return b;
}

std::string render_prompt(const PromptBundle& b)
{
    std::string out = b.instructions;
    for (std::size_t i = 0; i < b.exemplar_diffs.size(); ++i)
        out += "\nReference change " + std::to_string(i + 1) + ":\n```diff\n" + b.exemplar_diffs[i] + "```\n";
    if (b.mode == PromptMode::Edit) {
        for (const auto& f : b.files)
            out += "\nFile " + f.path + ":\n```\n" + f.content + (f.content.ends_with('\n') ? "" : "\n") + "```\n";
        return out;
    }
    out += "\nFiles available:\n";
    for (const auto& p : b.manifest)
        out += "- " + p + "\n";
    out += "\nTools (one JSON request per tool call):\n";
    out += "- {\"name\": \"" + std::string(kToolListFiles) + "\"}\n";
    out += "- {\"name\": \"" + std::string(kToolReadFile) + "\", \"path\": <path>}\n";
    out += "- {\"name\": \"" + std::string(kToolWriteFile) + "\", \"path\": <path>, \"content\": <full new content>}\n";
    out += "Reply without tool calls when the change is complete.\n";
    return out;
}

} // namespace pqscan
