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

// Migration planning, the deterministic hash-upgrade transformer, prompt
// bundles for model-driven PQC migration, and the exemplar library.

#include <pqscan/diagnostics.hpp>
#include <pqscan/lexer.hpp>
#include <pqscan/model.hpp>
#include <pqscan/patch.hpp>
#include <pqscan/ruleset.hpp>
#include <pqscan/scanner.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

enum class TaskKind { HashUpgrade, PqcKemIntegration, PqcSignatureIntegration };

std::string_view to_string(TaskKind kind);
std::optional<TaskKind> task_kind_from_string(std::string_view s);
bool is_pqc(TaskKind kind);
// Directory name in the exemplar library and the task id infix:
// "hash-upgrade", "pqc-kem", "pqc-signature".
std::string_view exemplar_dir(TaskKind kind);

struct MigrationTask {
    std::string task_id;
    std::string app_id;
    TaskKind kind = TaskKind::HashUpgrade;
    PrimitiveKind from = PrimitiveKind::SHA1; // HashUpgrade only
    PrimitiveKind to = PrimitiveKind::SHA256; // HashUpgrade target, KYBER or DILITHIUM otherwise
    std::vector<Finding> target_findings;
    std::vector<std::string> context_files; // app-relative, sorted
    std::optional<std::string> expected_dependency_marker;

    bool operator==(const MigrationTask&) const = default;
};

inline constexpr std::string_view kDefaultDependencyMarker = "org.bouncycastle:bcprov-jdk18on";
inline constexpr std::string_view kPqcProviderClass = "org.bouncycastle.pqc.jcajce.provider.BouncyCastlePQCProvider";

struct MigrationPolicy {
    bool hash_upgrades = true;
    bool pqc = true;
    std::string dependency_marker = std::string(kDefaultDependencyMarker);
    std::vector<std::string> manifest_globs {"build.gradle*"};
};

// The task a finding would belong to, or nothing.
std::optional<TaskKind> task_kind_for(const Finding& f);

// Groups findings per (app, kind, source primitive) and splits each group
// into clusters of files linked by cross-file constant definitions. Manifests
// are looked up below `<corpus_root>/<app>` when corpus_root is non-empty.
std::vector<MigrationTask> plan_tasks(const std::vector<Finding>& findings, const MigrationPolicy& policy = {},
    const std::filesystem::path& corpus_root = {});

bool is_manifest(std::string_view path, const std::vector<std::string>& globs);

// Reads the task's context files below app_root. Throws
// Error{MissingContextFile}.
FileSet read_context_files(const MigrationTask& task, const std::filesystem::path& app_root);

// The call site behind a finding, found by rescanning its file.
std::optional<CallSite> find_call_site(const Finding& f, const LexedUnit& unit, const Ruleset& rules);

// Canonical spelling of the hash a task upgrades to.
inline constexpr std::string_view kHashTargetName = "SHA-256";

// Rewrites the defining literal of every target. When a literal also feeds a
// finding outside the task, the call site argument is rewritten instead and a
// note is reported. `app_findings` are every finding of the app (used to see
// sharers); it may be empty. Throws Error{UnresolvedTarget |
// SharedLiteralConflict | InvalidArgument}.
Patch apply_hash_upgrade(const MigrationTask& task, const FileSet& files, const Ruleset& rules,
    const std::vector<Finding>& app_findings = {}, Diagnostics* diag = nullptr);

// Reference diffs by task kind, loaded from `<dir>/<kind>/<name>.diff`.
class ExemplarLibrary {
public:
    static ExemplarLibrary load(const std::filesystem::path& dir);

    void add(TaskKind kind, std::string name, std::string diff);
    std::vector<std::string> for_kind(TaskKind kind) const;
    bool empty() const { return m_entries.empty(); }

private:
    std::map<TaskKind, std::map<std::string, std::string>> m_entries;
};

enum class PromptMode { Edit, Agentic };

std::string_view to_string(PromptMode mode);

struct BundleFile {
    std::string path;
    std::string content;

    bool operator==(const BundleFile&) const = default;
};

struct PromptBundle {
    MigrationTask task;
    PromptMode mode = PromptMode::Edit;
    // Inline file bodies (Edit mode only).
    std::vector<BundleFile> files;
    // Paths the model may ask for (both modes).
    std::vector<std::string> manifest;
    std::string instructions;
    std::vector<std::string> exemplar_diffs;
    // What tool requests are served from in Agentic mode.
    FileSet workspace;
};

// Names of the tool requests of the Agentic protocol.
inline constexpr std::string_view kToolReadFile = "read_file";
inline constexpr std::string_view kToolWriteFile = "write_file";
inline constexpr std::string_view kToolListFiles = "list_files";

// Throws Error{MissingContextFile} if a context file is absent from `files`.
PromptBundle build_prompt(const MigrationTask& task, PromptMode mode, const FileSet& files,
    const ExemplarLibrary& exemplars = {});

// The full prompt text sent to a model.
std::string render_prompt(const PromptBundle& bundle);

} // namespace pqscan
