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

#include "test_support.hpp"

#include <pqscan/analyzer.hpp>
#include <pqscan/migration.hpp>

#include <gtest/gtest.h>

using namespace pqscan;
using namespace pqscan::testing;

namespace {

std::vector<Finding> analyze(const FileSet& files)
{
    std::vector<SourceUnit> units;
    for (const auto& [path, text] : files)
        units.push_back({"app", path, *language_for_path(path), text});
    Diagnostics diag;
    return analyze_units(units, default_ruleset(), diag);
}

std::string digest_class(const std::string& name, const std::string& arg)
{
    return "package p;\n\nimport java.security.MessageDigest;\n\nclass " + name
        + " {\n    byte[] h(byte[] d) throws Exception {\n        return MessageDigest.getInstance(" + arg
        + ").digest(d);\n    }\n}\n";
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(TaskKinds, Names)
{
    EXPECT_EQ(to_string(TaskKind::HashUpgrade), "HashUpgrade");
    EXPECT_EQ(task_kind_from_string("PqcKemIntegration"), TaskKind::PqcKemIntegration);
    EXPECT_FALSE(task_kind_from_string("Other"));
    EXPECT_EQ(exemplar_dir(TaskKind::PqcSignatureIntegration), "pqc-signature");
    EXPECT_FALSE(is_pqc(TaskKind::HashUpgrade));
}

TEST(Plan, OneTaskPerFileForIndependentSites)
{
    const auto findings = analyze({{"A.java", digest_class("A", "\"SHA-1\"")}, {"B.java", digest_class("B", "\"SHA-1\"")},
        {"C.java", digest_class("C", "\"MD5\"")}, {"D.java", digest_class("D", "\"SHA-256\"")}});
    const auto tasks = plan_tasks(findings);
    ASSERT_EQ(tasks.size(), 3u);
    EXPECT_EQ(tasks[0].task_id, "app-hash-md5-001");
    EXPECT_EQ(tasks[0].context_files, std::vector<std::string> {"C.java"});
    EXPECT_EQ(tasks[1].task_id, "app-hash-sha1-001");
    EXPECT_EQ(tasks[2].task_id, "app-hash-sha1-002");
    EXPECT_EQ(tasks[2].context_files, std::vector<std::string> {"B.java"});
    for (const auto& t : tasks) {
        EXPECT_EQ(t.kind, TaskKind::HashUpgrade);
        EXPECT_EQ(t.to, PrimitiveKind::SHA256);
        EXPECT_EQ(t.target_findings.size(), 1u);
        EXPECT_FALSE(t.expected_dependency_marker);
    }
}

TEST(Plan, SharedConstantJoinsFiles)
{
    const auto findings = analyze({{"Cfg.java", "package p;\nclass Cfg {\n    static final String H = \"SHA-1\";\n}\n"},
        {"A.java", digest_class("A", "Cfg.H")}, {"B.java", digest_class("B", "Cfg.H")}});
    const auto tasks = plan_tasks(findings);
    ASSERT_EQ(tasks.size(), 1u);
    EXPECT_EQ(tasks[0].target_findings.size(), 2u);
    EXPECT_EQ(tasks[0].context_files, (std::vector<std::string> {"A.java", "B.java", "Cfg.java"}));
}

TEST(Plan, NothingForSafeOrUnresolved)
{
    const auto findings = analyze({{"A.java", digest_class("A", "\"SHA-256\"")}, {"B.java", digest_class("B", "name()")}});
    ASSERT_EQ(findings.size(), 2u);
    EXPECT_TRUE(plan_tasks(findings).empty());
    EXPECT_TRUE(plan_tasks({}).empty());
}

TEST(Plan, PqcTasksCarryDependencyMarker)
{
    const std::string java = "package p;\nimport java.security.*;\nclass K {\n    void f() throws Exception {\n"
                             "        KeyPairGenerator.getInstance(\"RSA\").initialize(2048);\n"
                             "        Signature.getInstance(\"SHA256withECDSA\");\n    }\n}\n";
    const auto findings = analyze({{"K.java", java}});
    auto tasks = plan_tasks(findings);
    ASSERT_EQ(tasks.size(), 2u);
    EXPECT_EQ(tasks[0].kind, TaskKind::PqcKemIntegration);
    EXPECT_EQ(tasks[0].to, PrimitiveKind::KYBER);
    EXPECT_EQ(tasks[0].task_id, "app-pqc-kem-001");
    EXPECT_EQ(tasks[1].kind, TaskKind::PqcSignatureIntegration);
    EXPECT_EQ(tasks[1].to, PrimitiveKind::DILITHIUM);
    EXPECT_EQ(tasks[1].expected_dependency_marker, std::string(kDefaultDependencyMarker));

    MigrationPolicy hashes_only;
    hashes_only.pqc = false;
    EXPECT_TRUE(plan_tasks(findings, hashes_only).empty());
}

TEST(Plan, ManifestsJoinContext)
{
    TempDir dir;
    write_text(dir / "app" / "build.gradle", "dependencies {}\n");
    write_text(dir / "app" / "sub" / "build.gradle.kts", "dependencies {}\n");
    write_text(dir / "app" / "settings.gradle", "\n");
    const auto findings = analyze({{"src/A.java", digest_class("A", "\"SHA-1\"")}});
    const auto tasks = plan_tasks(findings, {}, dir.path());
    ASSERT_EQ(tasks.size(), 1u);
    EXPECT_EQ(tasks[0].context_files, (std::vector<std::string> {"build.gradle", "src/A.java", "sub/build.gradle.kts"}));
    EXPECT_TRUE(is_manifest("x/build.gradle.kts", {"build.gradle*"}));
    EXPECT_FALSE(is_manifest("settings.gradle", {"build.gradle*"}));
}

TEST(Plan, Deterministic)
{
    const auto findings = analyze({{"A.java", digest_class("A", "\"SHA-1\"")}, {"B.java", digest_class("B", "\"MD5\"")}});
    auto reversed = findings;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_EQ(plan_tasks(findings), plan_tasks(reversed));
}

TEST(HashUpgrade, RewritesLiteral)
{
    const FileSet files {{"A.java", digest_class("A", "\"SHA-1\"")}};
    const auto tasks = plan_tasks(analyze(files));
    ASSERT_EQ(tasks.size(), 1u);
    const Patch p = apply_hash_upgrade(tasks[0], files, default_ruleset());
    const FileSet after = apply_patch(files, p);
    EXPECT_EQ(after.at("A.java"), digest_class("A", "\"SHA-256\""));
    EXPECT_TRUE(plan_tasks(analyze(after)).empty());
}

TEST(HashUpgrade, RewritesConstantDefinitionOnly)
{
    const FileSet files {{"Cfg.java", "package p;\nclass Cfg {\n    static final String H = \"MD5\";\n}\n"},
        {"A.java", digest_class("A", "Cfg.H")}};
    const auto tasks = plan_tasks(analyze(files));
    ASSERT_EQ(tasks.size(), 1u);
    const FileSet after = apply_patch(files, apply_hash_upgrade(tasks[0], files, default_ruleset()));
    EXPECT_EQ(after.at("A.java"), files.at("A.java"));
    EXPECT_EQ(after.at("Cfg.java"), "package p;\nclass Cfg {\n    static final String H = \"SHA-256\";\n}\n");
}

TEST(HashUpgrade, SharedLiteralRewritesCallSite)
{
    const std::string a = "package p;\nimport java.security.MessageDigest;\nimport javax.crypto.Mac;\nclass A {\n"
                          "    static final String H = \"SHA-1\";\n    void f() throws Exception {\n"
                          "        MessageDigest.getInstance(H);\n        Mac.getInstance(H);\n    }\n}\n";
    const FileSet files {{"A.java", a}};
    const auto all = analyze(files);
    const auto tasks = plan_tasks(all);
    ASSERT_EQ(tasks.size(), 1u);
    Diagnostics diag;
    const FileSet after = apply_patch(files, apply_hash_upgrade(tasks[0], files, default_ruleset(), all, &diag));
    EXPECT_NE(after.at("A.java").find("static final String H = \"SHA-1\";"), std::string::npos);
    EXPECT_NE(after.at("A.java").find("MessageDigest.getInstance(\"SHA-256\");"), std::string::npos);
    EXPECT_NE(after.at("A.java").find("Mac.getInstance(H);"), std::string::npos);
    EXPECT_FALSE(diag.empty());
}

TEST(HashUpgrade, Errors)
{
    const FileSet files {{"A.java", digest_class("A", "\"SHA-1\"")}};
    auto task = plan_tasks(analyze(files)).at(0);
    EXPECT_EQ(code_of([&] { apply_hash_upgrade(task, {}, default_ruleset()); }), ErrorCode::UnresolvedTarget);
    MigrationTask no_origin = task;
    no_origin.target_findings[0].origin.reset();
    EXPECT_EQ(code_of([&] { apply_hash_upgrade(no_origin, files, default_ruleset()); }), ErrorCode::UnresolvedTarget);
    // Offsets from an older scan of a file that has since changed.
    const FileSet shifted {{"A.java", "// moved\n" + files.at("A.java")}};
    EXPECT_EQ(code_of([&] { apply_hash_upgrade(task, shifted, default_ruleset()); }), ErrorCode::UnresolvedTarget);
    MigrationTask pqc = task;
    pqc.kind = TaskKind::PqcKemIntegration;
    EXPECT_EQ(code_of([&] { apply_hash_upgrade(pqc, files, default_ruleset()); }), ErrorCode::InvalidArgument);
}

TEST(HashUpgrade, Smali)
{
    const std::string smali = ".class public Lp/S;\n.super Ljava/lang/Object;\n\n.method static h()V\n"
                              "    .registers 2\n    const-string v0, \"MD5\"\n"
                              "    invoke-static {v0}, Ljava/security/MessageDigest;->getInstance(Ljava/lang/String;)Ljava/security/MessageDigest;\n"
                              "    return-void\n.end method\n";
    const FileSet files {{"smali/p/S.smali", smali}};
    const auto tasks = plan_tasks(analyze(files));
    ASSERT_EQ(tasks.size(), 1u);
    const FileSet after = apply_patch(files, apply_hash_upgrade(tasks[0], files, default_ruleset()));
    EXPECT_NE(after.at("smali/p/S.smali").find("const-string v0, \"SHA-256\""), std::string::npos);
}

TEST(Context, ReadFiles)
{
    TempDir dir;
    write_text(dir / "A.java", "a\n");
    MigrationTask t;
    t.task_id = "t";
    t.context_files = {"A.java"};
    EXPECT_EQ(read_context_files(t, dir.path()).at("A.java"), "a\n");
    t.context_files.push_back("Missing.java");
    EXPECT_EQ(code_of([&] { read_context_files(t, dir.path()); }), ErrorCode::MissingContextFile);
}

TEST(Prompt, EditModeInlinesFiles)
{
    const FileSet files {{"A.java", digest_class("A", "\"SHA-1\"")}, {"Other.java", "x"}};
    const auto task = plan_tasks(analyze({{"A.java", files.at("A.java")}})).at(0);
    const auto b = build_prompt(task, PromptMode::Edit, files);
    ASSERT_EQ(b.files.size(), 1u);
    EXPECT_EQ(b.files[0].path, "A.java");
    EXPECT_EQ(b.manifest, std::vector<std::string> {"A.java"});
    EXPECT_NE(b.instructions.find("SHA-256"), std::string::npos);
    EXPECT_NE(b.instructions.find("A.java:7"), std::string::npos);
    EXPECT_TRUE(b.exemplar_diffs.empty());
    const std::string text = render_prompt(b);
    EXPECT_NE(text.find(files.at("A.java")), std::string::npos);
    EXPECT_EQ(text.find("Other.java"), std::string::npos);
}

TEST(Prompt, AgenticModeListsPathsOnly)
{
    const FileSet files {{"A.java", digest_class("A", "\"SHA-1\"")}};
    const auto task = plan_tasks(analyze(files)).at(0);
    const auto b = build_prompt(task, PromptMode::Agentic, files);
    EXPECT_TRUE(b.files.empty());
    EXPECT_EQ(b.workspace, files);
    const std::string text = render_prompt(b);
    EXPECT_EQ(text.find("MessageDigest.getInstance"), std::string::npos);
    EXPECT_NE(text.find(kToolWriteFile), std::string::npos);
}

TEST(Prompt, MissingContextFile)
{
    const auto task = plan_tasks(analyze({{"A.java", digest_class("A", "\"SHA-1\"")}})).at(0);
    EXPECT_EQ(code_of([&] { build_prompt(task, PromptMode::Edit, {}); }), ErrorCode::MissingContextFile);
}

TEST(Exemplars, LoadedByKind)
{
    const auto lib = ExemplarLibrary::load(data_dir() / "exemplars");
    EXPECT_FALSE(lib.empty());
    for (auto kind : {TaskKind::HashUpgrade, TaskKind::PqcKemIntegration, TaskKind::PqcSignatureIntegration})
        EXPECT_EQ(lib.for_kind(kind).size(), 1u);

    ExemplarLibrary mine;
    mine.add(TaskKind::HashUpgrade, "b", "diff b\n");
    mine.add(TaskKind::HashUpgrade, "a", "diff a\n");
    EXPECT_EQ(mine.for_kind(TaskKind::HashUpgrade), (std::vector<std::string> {"diff a\n", "diff b\n"}));
    EXPECT_TRUE(mine.for_kind(TaskKind::PqcKemIntegration).empty());

    const auto task = plan_tasks(analyze({{"A.java", digest_class("A", "\"SHA-1\"")}})).at(0);
    const auto b = build_prompt(task, PromptMode::Edit, {{"A.java", digest_class("A", "\"SHA-1\"")}}, mine);
    EXPECT_EQ(b.exemplar_diffs.size(), 2u);
    EXPECT_NE(render_prompt(b).find("diff a\n"), std::string::npos);
}
