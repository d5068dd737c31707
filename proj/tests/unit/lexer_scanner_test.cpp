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

#include <pqscan/scanner.hpp>

#include <gtest/gtest.h>

using namespace pqscan;
using namespace pqscan::testing;

namespace {

std::vector<CallSite> scan(const std::string& path, const std::string& text, Diagnostics* diag = nullptr)
{
    SourceUnit u {"app", path, *language_for_path(path), text};
    return scan_unit(u, default_ruleset(), diag);
}

} // namespace

TEST(Ruleset, DefaultHasCipherTrigger)
{
    const Trigger* t = default_ruleset().find_trigger("cipher-get");
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(t->receiver_name, "Cipher");
    EXPECT_EQ(t->member_name, "getInstance");
    EXPECT_EQ(t->arg_index_of_algorithm, 0);
    for (auto kind : all_api_kinds()) {
        const bool covered = std::any_of(default_ruleset().triggers.begin(), default_ruleset().triggers.end(),
            [&](const Trigger& tr) { return tr.api_kind == kind; });
        EXPECT_TRUE(covered) << to_string(kind);
    }
}

TEST(Ruleset, MissingApiKindIsParseError)
{
    try {
        parse_ruleset(R"({"version":"1","triggers":[{"pattern_id":"x","receiver_name":"A","member_name":"b"}],
            "classification_rules":[]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RulesetParseError);
        EXPECT_NE(std::string(e.what()).find("api_kind"), std::string::npos);
    }
}

TEST(Ruleset, DuplicatePatternId)
{
    const std::string t = R"({"pattern_id":"md-1","api_kind":"DigestFactory","receiver_name":"MessageDigest",
        "member_name":"getInstance","arg_index_of_algorithm":0})";
    try {
        parse_ruleset(R"({"version":"1","triggers":[)" + t + "," + t + R"(],"classification_rules":[]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicatePatternId);
    }
}

TEST(Ruleset, InvalidJsonIsParseError)
{
    EXPECT_THROW(parse_ruleset("{ not json"), Error);
    TempDir tmp;
    EXPECT_THROW(load_ruleset(tmp / "absent.json"), Error);
}

TEST(Ruleset, DefaultJsonParsesToTheCompiledCopy)
{
    const Ruleset r = load_ruleset(data_dir() / "default_ruleset.json");
    EXPECT_EQ(r.triggers.size(), default_ruleset().triggers.size());
    EXPECT_EQ(r.classification_rules.size(), default_ruleset().classification_rules.size());
}

TEST(StripNoncode, CommentsAndStringsMasked)
{
    const std::string src = "x = 1; // MD5\ns = \"Cipher.getInstance\"; /* a\nb */ y";
    const auto m = strip_noncode(src, Language::Java);
    EXPECT_EQ(m.text.size(), src.size());
    EXPECT_EQ(std::count(m.text.begin(), m.text.end(), '\n'), 2);
    EXPECT_EQ(m.text.find("MD5"), std::string::npos);
    EXPECT_EQ(m.text.find("Cipher"), std::string::npos);
    ASSERT_EQ(m.literals.size(), 1u);
    EXPECT_EQ(src.substr(m.literals[0].begin, m.literals[0].size()), "\"Cipher.getInstance\"");
    EXPECT_NE(m.text.find(" y"), std::string::npos);
}

TEST(StripNoncode, SmaliHashComments)
{
    const std::string src = "const-string v0, \"a#b\" # MD5\n";
    const auto m = strip_noncode(src, Language::Smali);
    EXPECT_EQ(m.text.size(), src.size());
    EXPECT_EQ(m.text.find("MD5"), std::string::npos);
    EXPECT_EQ(m.literals.size(), 1u);
}

TEST(StripNoncode, UnterminatedCommentWarnsAndBlanksTheRest)
{
    Diagnostics diag;
    const std::string src = "int a; /* open\nCipher.getInstance(\"DES\");\n";
    const auto m = strip_noncode(src, Language::Java, &diag, "A.java");
    EXPECT_TRUE(m.unterminated_comment);
    EXPECT_EQ(m.text.size(), src.size());
    EXPECT_EQ(m.text.find("Cipher"), std::string::npos);
    EXPECT_FALSE(diag.empty());
}

TEST(StripNoncode, KotlinRawStringsAndTemplates)
{
    const std::string src = "val a = \"\"\"Cipher.getInstance(\"DES\")\"\"\"\nval b = \"x${Cipher.getInstance(\"y\")}\"\n";
    const auto sites = scan("A.kt", src);
    EXPECT_TRUE(sites.empty());
}

TEST(ScanUnit, DigestSite)
{
    const auto sites = scan("A.java", "class A { void f() { MessageDigest.getInstance(\"SHA-1\"); } }");
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].api_kind, ApiKind::DigestFactory);
    EXPECT_EQ(sites[0].matched_pattern_id, "digest-get");
    ASSERT_EQ(sites[0].argument_exprs.size(), 1u);
    EXPECT_EQ(sites[0].argument_exprs[0], "\"SHA-1\"");
    EXPECT_EQ(sites[0].location.line, 1);
    EXPECT_EQ(sites[0].location.column, 22);
}

TEST(ScanUnit, ArgumentsByBalancedParentheses)
{
    const auto sites = scan("A.java",
        "class A { void f() {\n  Cipher.getInstance(pick(a, b) /* c, d */, \"BC\");\n  new SecretKeySpec(k(), \"AES\");\n} }");
    ASSERT_EQ(sites.size(), 2u);
    EXPECT_EQ(sites[0].argument_exprs, (std::vector<std::string> {"pick(a, b)", "\"BC\""}));
    EXPECT_EQ(sites[1].api_kind, ApiKind::SecretKeyConstruction);
    EXPECT_EQ(sites[1].argument_exprs.size(), 2u);
}

TEST(ScanUnit, UnseededRandomIsNotASite)
{
    const auto sites = scan("A.java", "class A { Object f() { new SecureRandom(); return new Random(7); } }");
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].matched_pattern_id, "random-seeded-new");
}

TEST(ScanUnit, SmaliInvoke)
{
    const std::string src = ".class LA;\n.super Ljava/lang/Object;\n.method static f()V\n    .registers 2\n"
                            "    const-string v0, \"MD5\"\n"
                            "    invoke-static {v0}, Ljava/security/MessageDigest;->getInstance(Ljava/lang/String;)Ljava/security/MessageDigest;\n"
                            "    return-void\n.end method\n";
    const auto sites = scan("A.smali", src);
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].api_kind, ApiKind::DigestFactory);
    EXPECT_EQ(sites[0].location.line, 6);
    EXPECT_EQ(sites[0].argument_exprs, (std::vector<std::string> {"v0"}));
}

TEST(ScanUnit, NoTriggersNoSites)
{
    EXPECT_TRUE(scan("A.java", "class A { int x = 1; }").empty());
}

TEST(ScanUnit, MaskSafety)
{
    const std::string src = "class A {\n// Cipher.getInstance(\"DES\")\nString s = \"MessageDigest.getInstance(x)\";\n"
                            "void f() { Mac.getInstance(\"HmacSHA1\"); }\n}";
    const auto sites = scan("A.java", src);
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].location.line, 4);
}

TEST(ScanApp, FixtureAppCountsAndOrdering)
{
    // bravo-chat: KeyExchange has 2 sites, MessageSigner 1, ChatActivity only a string.
    Diagnostics diag;
    const auto sites = scan_app(corpus_dir() / "bravo-chat", "bravo-chat", default_ruleset(), {}, diag);
    ASSERT_EQ(sites.size(), 3u);
    EXPECT_TRUE(std::is_sorted(sites.begin(), sites.end(), call_site_less));
    EXPECT_EQ(sites[0].location.file_path, "app/src/main/java/com/bravo/chat/KeyExchange.java");
    EXPECT_TRUE(diag.empty());
}

TEST(ScanApp, EmptyDirectory)
{
    TempDir tmp;
    Diagnostics diag;
    EXPECT_TRUE(scan_app(tmp.path(), "x", default_ruleset(), {}, diag).empty());
}

TEST(ScanApp, UnreadableFileIsAWarning)
{
    Diagnostics diag;
    const auto sites = scan_app(corpus_dir() / "india-empty", "india-empty", default_ruleset(), {}, diag);
    EXPECT_TRUE(sites.empty());
    EXPECT_EQ(diag.size(), 1u);
    EXPECT_TRUE(diag.contains("UnreadableFile"));
}

TEST(ScanApp, HiddenAndIgnoredDirectoriesSkipped)
{
    TempDir tmp;
    const std::string body = "class A { void f() { Cipher.getInstance(\"DES\"); } }";
    write_text(tmp / "src/A.java", body);
    write_text(tmp / ".hidden/B.java", body);
    write_text(tmp / "build/C.java", body);
    Diagnostics diag;
    const auto sites = scan_app(tmp.path(), "x", default_ruleset(), {}, diag);
    ASSERT_EQ(sites.size(), 1u);
    EXPECT_EQ(sites[0].location.file_path, "src/A.java");
}

TEST(ScanApp, OversizedFileSkipped)
{
    TempDir tmp;
    write_text(tmp / "A.java", "class A { void f() { Cipher.getInstance(\"DES\"); } }");
    ScanOptions options;
    options.max_file_bytes = 10;
    Diagnostics diag;
    EXPECT_TRUE(scan_app(tmp.path(), "x", default_ruleset(), options, diag).empty());
    EXPECT_EQ(diag.size(), 1u);
}

TEST(SourceUnits, InvalidUtf8Replaced)
{
    Diagnostics diag;
    const auto u = make_source_unit("a", "A.java", std::string("class A {} // \xff\xfe"), diag);
    EXPECT_EQ(u.content.find('\xff'), std::string::npos);
    EXPECT_EQ(u.content, "class A {} // ??");
    EXPECT_EQ(diag.size(), 1u);
}

TEST(ScanApp, DeterministicAcrossJobCounts)
{
    Diagnostics d1;
    Diagnostics d2;
    ScanOptions many;
    many.jobs = 8;
    for (const auto& app : list_apps(corpus_dir(), {}))
        EXPECT_EQ(scan_app(corpus_dir() / app, app, default_ruleset(), {}, d1),
            scan_app(corpus_dir() / app, app, default_ruleset(), many, d2));
}
