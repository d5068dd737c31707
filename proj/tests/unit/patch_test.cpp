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

#include <pqscan/diagnostics.hpp>
#include <pqscan/patch.hpp>

#include <gtest/gtest.h>

using namespace pqscan;
using namespace pqscan::testing;

namespace {

const std::string kBefore = "package a;\n\nclass A {\n    void f() {\n        x(\"SHA-1\");\n    }\n}\n";
const std::string kAfter = "package a;\n\nclass A {\n    void f() {\n        x(\"SHA-256\");\n    }\n}\n";

const std::string kDiff = "--- a/src/A.java\n+++ b/src/A.java\n@@ -2,6 +2,6 @@\n \n class A {\n     void f() {\n"
                          "-        x(\"SHA-1\");\n+        x(\"SHA-256\");\n     }\n }\n";

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

TEST(Diff, RenderMatchesHandWrittenHunk)
{
    const Patch p = diff_file_sets({{"src/A.java", kBefore}}, {{"src/A.java", kAfter}});
    EXPECT_EQ(render_patch(p), kDiff);
}

TEST(Diff, IdenticalFilesGiveEmptyPatch)
{
    EXPECT_TRUE(diff_file_sets({{"A.java", kBefore}}, {{"A.java", kBefore}}).empty());
}

TEST(Parse, RoundTrip)
{
    const Patch p = parse_patch(kDiff);
    ASSERT_EQ(p.files.size(), 1u);
    EXPECT_EQ(p.files[0].path, "src/A.java");
    ASSERT_EQ(p.files[0].hunks.size(), 1u);
    EXPECT_EQ(p.files[0].hunks[0].old_start, 2);
    EXPECT_EQ(p.files[0].hunks[0].old_count, 6);
    EXPECT_EQ(render_patch(p), kDiff);
}

TEST(Parse, GitHeadersAndTimestamps)
{
    const std::string text = "diff --git a/src/A.java b/src/A.java\nindex 123..456 100644\n"
                             "--- a/src/A.java\t2024-01-01 00:00:00\n+++ b/src/A.java\t2024-01-01 00:00:01\n"
        + kDiff.substr(kDiff.find("@@"));
    EXPECT_EQ(parse_patch(text), parse_patch(kDiff));
}

TEST(Parse, Malformed)
{
    EXPECT_EQ(code_of([] { parse_patch("just prose"); }), ErrorCode::MalformedDiff);
    EXPECT_EQ(code_of([] { parse_patch("--- a/A\n+++ b/A\n@@ -1,3 +1,3 @@\n a\n-b\n+c\n"); }), ErrorCode::MalformedDiff);
    EXPECT_EQ(code_of([] { parse_patch("--- a/A\n+++ b/B\n@@ -1 +1 @@\n-a\n+b\n"); }), ErrorCode::MalformedDiff);
}

TEST(Apply, SingleHunk)
{
    const FileSet files {{"src/A.java", kBefore}, {"build.gradle", "x\n"}};
    const FileSet out = apply_patch(files, parse_patch(kDiff));
    EXPECT_EQ(out.at("src/A.java"), kAfter);
    EXPECT_EQ(out.at("build.gradle"), "x\n");
}

TEST(Apply, DriftedContextIsRejected)
{
    const FileSet drifted {{"src/A.java", "// header\n" + kBefore}};
    try {
        apply_patch(drifted, parse_patch(kDiff));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ContextMismatch);
        EXPECT_NE(std::string(e.what()).find("src/A.java:"), std::string::npos);
    }
}

TEST(Apply, PathEscape)
{
    const FileSet files {{"src/A.java", kBefore}};
    const std::string escape = "--- a/../outside.java\n+++ b/../outside.java\n@@ -1 +1 @@\n-a\n+b\n";
    EXPECT_EQ(code_of([&] { apply_patch(files, parse_patch(escape)); }), ErrorCode::PathEscape);
    const std::string other = "--- a/src/B.java\n+++ b/src/B.java\n@@ -1 +1 @@\n-a\n+b\n";
    EXPECT_EQ(code_of([&] { apply_patch(files, parse_patch(other)); }), ErrorCode::PathEscape);
    const std::string far = "--- /dev/null\n+++ b/elsewhere/C.java\n@@ -0,0 +1 @@\n+c\n";
    EXPECT_EQ(code_of([&] { apply_patch(files, parse_patch(far)); }), ErrorCode::PathEscape);
}

TEST(Apply, NewAndDeletedFiles)
{
    const FileSet files {{"src/A.java", kBefore}, {"src/Old.java", "old\n"}};
    const std::string text = "--- /dev/null\n+++ b/src/New.java\n@@ -0,0 +1,2 @@\n+class New {\n+}\n"
                             "--- a/src/Old.java\n+++ /dev/null\n@@ -1 +0,0 @@\n-old\n";
    const Patch p = parse_patch(text);
    EXPECT_EQ(p.new_files(), std::vector<std::string> {"src/New.java"});
    const FileSet out = apply_patch(files, p);
    EXPECT_EQ(out.at("src/New.java"), "class New {\n}\n");
    EXPECT_FALSE(out.contains("src/Old.java"));
    EXPECT_EQ(out.at("src/A.java"), kBefore);
    EXPECT_EQ(code_of([&] { apply_patch(out, parse_patch(text.substr(0, text.find("--- a/src/Old")))); }),
        ErrorCode::ContextMismatch);
}

TEST(Apply, MissingFinalNewline)
{
    const FileSet before {{"A.txt", "a\nb"}};
    const FileSet after {{"A.txt", "a\nc"}};
    const Patch p = diff_file_sets(before, after);
    const std::string text = render_patch(p);
    EXPECT_NE(text.find("\\ No newline at end of file"), std::string::npos);
    EXPECT_EQ(apply_patch(before, parse_patch(text)), after);
}

TEST(Apply, DiffThenApplyIsIdentityOnEdits)
{
    // Larger edits: several hunks, insertions at both ends.
    std::string a;
    std::string b;
    for (int i = 0; i < 60; ++i) {
        a += "line " + std::to_string(i) + "\n";
        if (i == 0)
            b += "prelude\n";
        if (i % 17 != 5)
            b += "line " + std::to_string(i) + "\n";
        if (i == 30)
            b += "inserted\n";
    }
    b += "coda\n";
    const FileSet before {{"f.txt", a}};
    const FileSet after {{"f.txt", b}};
    const Patch p = diff_file_sets(before, after);
    EXPECT_GT(p.files.at(0).hunks.size(), 1u);
    EXPECT_EQ(apply_patch(before, parse_patch(render_patch(p))), after);
}

TEST(Exemplars, LibraryDiffsParse)
{
    for (const auto& e : fs::recursive_directory_iterator(data_dir() / "exemplars")) {
        if (e.path().extension() == ".diff") {
            EXPECT_NO_THROW(parse_patch(read_text(e.path()))) << e.path();
        }
    }
}
