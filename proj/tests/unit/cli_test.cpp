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

#include <pqscan/cli.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace pqscan;
using namespace pqscan::testing;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "pqscan");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const std::string kClock = "2026-01-01T00:00:00Z";

// Runs from the fixture directory so the recorded corpus root is "mini".
std::string scan_mini(const TempDir& dir)
{
    const std::string cmd = "cd '" + fixture_dir().string() + "' && '" + cli_path() + "' scan mini -q -o '"
        + dir.path().string() + "' --fixed-clock " + kClock;
    EXPECT_EQ(run(cmd), 0);
    return (dir / "findings.jsonl").string();
}

} // namespace

TEST(Cli, ScanMatchesGolden)
{
    TempDir dir;
    const std::string findings = scan_mini(dir);
    EXPECT_EQ(read_text(findings), read_text(fixture_dir() / "golden" / "findings.jsonl"));
}

TEST(Cli, ScanExitCodes)
{
    TempDir dir;
    EXPECT_EQ(cli({"scan", (dir / "missing").string(), "-o", dir.path().string()}).code, 1);

    write_text(dir / "bad.json", "{ not json");
    const auto bad = cli({"scan", (fixture_dir() / "mini").string(), "--ruleset", (dir / "bad.json").string(), "-o",
        (dir / "out").string()});
    EXPECT_EQ(bad.code, 2);
    EXPECT_FALSE(bad.err.empty());
    EXPECT_EQ(cli({"scan", (fixture_dir() / "mini").string(), "--ruleset", (dir / "absent.json").string(), "-o",
                  (dir / "out").string()})
                  .code,
        2);
    EXPECT_EQ(cli({"scan"}).code, 2);
    EXPECT_EQ(cli({"frobnicate"}).code, 2);
    EXPECT_EQ(cli({"scan", (fixture_dir() / "mini").string(), "-j", "0"}).code, 2);
}

TEST(Cli, ScanRefusesToOverwrite)
{
    TempDir dir;
    const std::string mini = (fixture_dir() / "mini").string();
    EXPECT_EQ(cli({"scan", mini, "-q", "-o", dir.path().string()}).code, 0);
    const auto again = cli({"scan", mini, "-q", "-o", dir.path().string()});
    EXPECT_EQ(again.code, 1);
    EXPECT_NE(again.err.find("--force"), std::string::npos);
    EXPECT_EQ(cli({"scan", mini, "-q", "-o", dir.path().string(), "--force"}).code, 0);
}

TEST(Cli, ReportFormats)
{
    TempDir dir;
    const std::string findings = scan_mini(dir);
    for (const auto& [format, golden] : std::vector<std::pair<std::string, std::string>> {
             {"markdown", "report.md"}, {"json", "report.json"}}) {
        const auto r = cli({"report", findings, "-f", format, "-o", dir.path().string(), "--fixed-clock", kClock});
        ASSERT_EQ(r.code, 0) << r.err;
        EXPECT_EQ(read_text(dir / golden), read_text(fixture_dir() / "golden" / golden));
    }
    ASSERT_EQ(cli({"report", findings, "-f", "csv", "-o", dir.path().string()}).code, 0);
    EXPECT_TRUE(read_text(dir / "report.csv").starts_with("algorithm_key,instance_count,app_count,label,condition\nMD5,4,3,"));
    EXPECT_EQ(cli({"report", findings, "-f", "pdf", "-o", dir.path().string()}).code, 2);
    EXPECT_EQ(cli({"report", (dir / "none.jsonl").string(), "-o", dir.path().string()}).code, 1);
    write_text(dir / "broken.jsonl", "{\"oops\": 1}\n");
    EXPECT_EQ(cli({"report", (dir / "broken.jsonl").string(), "-o", dir.path().string()}).code, 1);
}

TEST(Cli, EmptyCorpusGivesHeaderOnlyReport)
{
    TempDir dir;
    write_text(dir / "corpus" / "quiet" / "Main.java", "class Main {}\n");
    ASSERT_EQ(cli({"scan", (dir / "corpus").string(), "-q", "-o", (dir / "scan").string()}).code, 0);
    const auto r = cli({"report", (dir / "scan" / "findings.jsonl").string(), "-o", (dir / "scan").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_text(dir / "scan" / "report.md"),
        "| Algorithm | # of instances | # of Apps | Post-Quantum-Safe |\n|---|---:|---:|:---:|\n");

    const auto m = cli({"migrate", (dir / "scan" / "findings.jsonl").string(), "-o", (dir / "run").string()});
    EXPECT_EQ(m.code, 0) << m.err;
    EXPECT_NE(m.out.find("0 tasks planned"), std::string::npos);
}

TEST(Cli, MigrateAndEval)
{
    TempDir dir;
    const std::string findings = scan_mini(dir);
    const std::string corpus = (fixture_dir() / "mini").string();
    const std::string run_dir = (dir / "run").string();

    // RSA key generation plans a PQC task, which needs a backend.
    EXPECT_EQ(cli({"migrate", findings, "--corpus", corpus, "-o", run_dir}).code, 2);
    EXPECT_EQ(cli({"migrate", findings, "--corpus", corpus, "-o", run_dir, "--kind", "pqc", "--backend", "bogus:x"}).code, 2);

    const auto m = cli({"migrate", findings, "--corpus", corpus, "-o", run_dir, "--kind", "hash", "-q"});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_NE(m.out.find("tasks planned"), std::string::npos);
    EXPECT_NE(m.out.find("failed=0"), std::string::npos);

    const auto e = cli({"eval", run_dir});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_NE(e.out.find("HashUpgrade:"), std::string::npos);
    const std::string first = read_text(fs::path(run_dir) / "eval.json");
    ASSERT_EQ(cli({"eval", run_dir}).code, 0);
    EXPECT_EQ(read_text(fs::path(run_dir) / "eval.json"), first);

    TempDir empty;
    EXPECT_EQ(cli({"eval", empty.path().string()}).code, 1);
    EXPECT_EQ(cli({"eval", (empty / "absent").string()}).code, 1);
}

TEST(Cli, ScriptedPqcRun)
{
    TempDir dir;
    const std::string findings = scan_mini(dir);
    const std::string run_dir = (dir / "run").string();
    const auto m = cli({"migrate", findings, "--corpus", (fixture_dir() / "mini").string(), "-o", run_dir, "--kind", "pqc",
        "--backend", "scripted:no-dependency-pqc", "--record", (dir / "store").string(), "-q"});
    ASSERT_EQ(m.code, 0) << m.err;
    EXPECT_NE(m.out.find("1 tasks planned"), std::string::npos);
    EXPECT_NE(m.out.find("V6_dependency_declared"), std::string::npos);

    // The recorded store replays the same run.
    const std::string replay_dir = (dir / "replay").string();
    ASSERT_EQ(cli({"migrate", findings, "--corpus", (fixture_dir() / "mini").string(), "-o", replay_dir, "--kind", "pqc",
                  "--backend", "replay:" + (dir / "store").string(), "-q"})
                  .code,
        0);
    EXPECT_EQ(read_tree(replay_dir), read_tree(run_dir));
}
