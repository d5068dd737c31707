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

#include <pqscan/gateway.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <regex>
#include <set>

namespace pqscan {

namespace {

struct PqcStyle {
    bool provider = true;      // pass the PQC provider at the call site
    bool import = true;        // import the provider class
    bool dependency = true;    // declare the provider in the build manifest
    bool placeholder = false;  // leave a TODO instead of wiring the provider
};

struct TextEdit {
    std::size_t offset;
    std::size_t length;
    std::string text;
};

void apply_edits(std::string& content, std::vector<TextEdit> edits)
{
    std::stable_sort(edits.begin(), edits.end(), [](const TextEdit& a, const TextEdit& b) { return a.offset > b.offset; });
    for (const auto& e : edits)
        content.replace(e.offset, e.length, e.text);
}

std::size_t import_anchor(const LexedUnit& u, std::string& prefix, std::string& suffix)
{
    std::size_t anchor = std::string::npos;
    const auto& toks = u.tokens();
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const bool line_start = i == 0 || toks[i - 1].line != toks[i].line;
        if (!line_start || !(toks[i].is_ident("import") || toks[i].is_ident("package")))
            continue;
        auto eol = u.content().find('\n', toks[i].offset);
        anchor = eol == std::string::npos ? u.content().size() : eol + 1;
    }
    if (anchor == std::string::npos) {
        prefix.clear();
        suffix = "\n";
        return 0;
    }
    if (anchor == u.content().size() && !u.content().ends_with('\n'))
        prefix = "\n";
    return anchor;
}

std::string add_dependency(std::string manifest, const std::string& path, const std::string& marker)
{
    const bool kts = path.ends_with(".kts");
    const std::string line = kts ? "    implementation(\"" + marker + ":1.78\")" : "    implementation '" + marker + ":1.78'";
    std::smatch m;
    static const std::regex block(R"(dependencies\s*\{)");
    if (std::regex_search(manifest, m, block)) {
        const auto at = static_cast<std::size_t>(m.position(0) + m.length(0));
        manifest.insert(at, "\n" + line);
        return manifest;
    }
    if (!manifest.empty() && !manifest.ends_with('\n'))
        manifest += '\n';
    manifest += "\ndependencies {\n" + line + "\n}\n";
    return manifest;
}

// The post-image a PQC-integrating model would write, or nothing when the
// task is not a PQC task.
std::optional<FileSet> pqc_rewrite(const PromptBundle& bundle, const PqcStyle& style)
{
    const MigrationTask& task = bundle.task;
    if (!is_pqc(task.kind))
        return std::nullopt;
    const Ruleset& rules = default_ruleset();
    const std::string algorithm = task.kind == TaskKind::PqcKemIntegration ? "Kyber" : "Dilithium";
    const std::string simple = std::string(kPqcProviderClass.substr(kPqcProviderClass.rfind('.') + 1));

    FileSet after = bundle.workspace;
    std::map<std::string, std::vector<const Finding*>> by_file;
    for (const auto& f : task.target_findings)
        by_file[f.location.file_path].push_back(&f);

    for (const auto& [path, targets] : by_file) {
        auto it = bundle.workspace.find(path);
        auto lang = language_for_path(path);
        if (it == bundle.workspace.end() || !lang || *lang == Language::Smali)
            continue;
        const bool kotlin = *lang == Language::Kotlin;
        LexedUnit unit(SourceUnit {task.app_id, path, *lang, it->second});
        std::vector<TextEdit> edits;
        std::set<int> todo_lines;
        for (const Finding* f : targets) {
            auto site = find_call_site(*f, unit, rules);
            const Trigger* trig = rules.find_trigger(f->pattern_id);
            if (!site || !trig || !trig->arg_index_of_algorithm || site->argument_ranges.empty())
                continue;
            const auto arg = site->argument_ranges[static_cast<std::size_t>(*trig->arg_index_of_algorithm)];
            std::string text = "\"" + algorithm + "\"";
            if (style.provider && !style.placeholder)
                text += std::string(", ") + (kotlin ? "" : "new ") + simple + "()";
            edits.push_back({arg.begin, arg.size(), text});
            if (style.placeholder && todo_lines.insert(f->location.line).second) {
                const std::size_t start = unit.lines().line_start(f->location.line);
                std::size_t ws = start;
                while (ws < it->second.size() && (it->second[ws] == ' ' || it->second[ws] == '\t'))
                    ++ws;
                edits.push_back({start, 0, it->second.substr(start, ws - start) + "// TODO: integrate " + algorithm
                        + " through the PQC provider\n"});
            }
        }
        if (edits.empty())
            continue;
        const std::string import_line = "import " + std::string(kPqcProviderClass) + (kotlin ? "" : ";");
        if (style.import && style.provider && !style.placeholder && it->second.find(import_line) == std::string::npos) {
            std::string prefix;
            std::string suffix;
            const std::size_t at = import_anchor(unit, prefix, suffix);
            edits.push_back({at, 0, prefix + import_line + "\n" + suffix});
        }
        std::string content = it->second;
        apply_edits(content, std::move(edits));
        after[path] = std::move(content);
    }

    if (style.dependency && task.expected_dependency_marker) {
        const std::string& marker = *task.expected_dependency_marker;
        std::optional<std::string> manifest;
        for (const auto& [path, content] : bundle.workspace)
            if (is_manifest(path, {"build.gradle*"})) {
                manifest = path;
                break;
            }
        if (!manifest) {
            // Next to the shallowest context file.
            std::string dir;
            std::size_t best = std::string::npos;
            for (const auto& [path, content] : bundle.workspace) {
                const auto depth = static_cast<std::size_t>(std::count(path.begin(), path.end(), '/'));
                if (depth < best) {
                    best = depth;
                    auto slash = path.rfind('/');
                    dir = slash == std::string::npos ? "" : path.substr(0, slash + 1);
                }
            }
            manifest = dir + "build.gradle";
        }
        const std::string current = after.contains(*manifest) ? after.at(*manifest) : std::string();
        if (current.find(marker) == std::string::npos)
            after[*manifest] = add_dependency(current, *manifest, marker);
    }
    return after;
}

std::optional<FileSet> hash_fix(const PromptBundle& bundle)
{
    if (bundle.task.kind != TaskKind::HashUpgrade)
        return std::nullopt;
    Patch p = apply_hash_upgrade(bundle.task, bundle.workspace, default_ruleset());
    return apply_patch(bundle.workspace, p);
}

class ScriptedModel : public ModelBackend {
public:
    ScriptedModel(std::string id, std::function<std::optional<FileSet>(const PromptBundle&)> behavior)
        : m_id(std::move(id)), m_behavior(std::move(behavior))
    {
    }

    BackendReply send(const PromptBundle& bundle, const std::vector<ChatMessage>&, int turn) override
    {
        std::optional<FileSet> after;
        try {
            after = m_behavior(bundle);
        } catch (const Error& e) {
            return {"[" + m_id + "] gave up: " + e.what() + "\n", {}};
        }
        const Patch patch = after ? diff_file_sets(bundle.workspace, *after) : Patch {};
        if (patch.empty())
            return {"[" + m_id + "] no applicable change for " + bundle.task.task_id + ".\n", {}};

        if (bundle.mode == PromptMode::Edit)
            return {"[" + m_id + "] proposed change for " + bundle.task.task_id + ":\n```diff\n" + render_patch(patch)
                    + "```\n",
                {}};

        BackendReply r;
        switch (turn) {
        case 0:
            r.tool_calls.push_back({std::string(kToolListFiles), "", ""});
            break;
        case 1:
            for (const auto& path : bundle.manifest)
                r.tool_calls.push_back({std::string(kToolReadFile), path, ""});
            break;
        case 2:
            for (const auto& [path, content] : *after) {
                auto before = bundle.workspace.find(path);
                if (before == bundle.workspace.end() || before->second != content)
                    r.tool_calls.push_back({std::string(kToolWriteFile), path, content});
            }
            break;
        default:
            r.text = "[" + m_id + "] done with " + bundle.task.task_id + ".";
            break;
        }
        return r;
    }

private:
    std::string m_id;
    std::function<std::optional<FileSet>(const PromptBundle&)> m_behavior;
};

const std::map<std::string, std::function<std::optional<FileSet>(const PromptBundle&)>>& registry()
{
    static const std::map<std::string, std::function<std::optional<FileSet>(const PromptBundle&)>> scripts {
        {"perfect-hash-fixer", hash_fix},
        {"complete-pqc", [](const PromptBundle& b) { return pqc_rewrite(b, {}); }},
        {"placeholder-pqc", [](const PromptBundle& b) { return pqc_rewrite(b, {true, true, true, true}); }},
        {"missing-import-pqc", [](const PromptBundle& b) { return pqc_rewrite(b, {true, false, true, false}); }},
        {"no-dependency-pqc", [](const PromptBundle& b) { return pqc_rewrite(b, {true, true, false, false}); }},
    };
    return scripts;
}

} // namespace

const std::vector<std::string>& scripted_ids()
{
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (const auto& [id, fn] : registry())
            out.push_back(id);
        return out;
    }();
    return ids;
}

std::unique_ptr<ModelBackend> make_scripted_backend(const std::string& script_id)
{
    auto it = registry().find(script_id);
    if (it == registry().end())
        throw Error(ErrorCode::InvalidArgument, "unknown scripted backend '" + script_id + "'");
    return std::make_unique<ScriptedModel>(script_id, it->second);
}

} // namespace pqscan
