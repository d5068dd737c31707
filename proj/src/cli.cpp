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

#include <pqscan/cli.hpp>

#include <pqscan/analyzer.hpp>
#include <pqscan/findings_io.hpp>
#include <pqscan/gateway.hpp>
#include <pqscan/migration.hpp>
#include <pqscan/report.hpp>
#include <pqscan/validation.hpp>

#include "json_util.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>

namespace pqscan {

namespace fs = std::filesystem;

namespace {

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::RulesetParseError:
    case ErrorCode::DuplicatePatternId:
    case ErrorCode::AmbiguousRuleMatch:
    case ErrorCode::InvalidArgument:
        return kExitConfig;
    default:
        return kExitData;
    }
}

void emit(const Diagnostics& diag, std::ostream& err, int verbosity)
{
    if (verbosity < 0)
        return;
    for (const auto& d : diag.sorted())
        if (d.severity != Severity::Note || verbosity > 0)
            err << format_diagnostic(d) << "\n";
}

Ruleset load_rules(const CliConfig& c)
{
    if (!c.ruleset_path)
        return default_ruleset();
    try {
        return load_ruleset(*c.ruleset_path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError)
            throw Error(ErrorCode::RulesetParseError, e.what());
        throw;
    }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn)
{
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

struct TaskRun {
    ValidationReport report;
    Diagnostics diag;
};

void write_tree(const fs::path& root, const FileSet& files)
{
    for (const auto& [path, content] : files)
        json::write_file(root / path, content);
}

ModelConfig model_config(const CliConfig& c)
{
    ModelConfig m = parse_backend(c.backend);
    if (auto* h = std::get_if<HttpJsonBackend>(&m.backend)) {
        h->model_name = c.model_name;
        h->auth_env_var = c.auth_env;
        h->dialect = c.dialect;
        if (h->dialect != "minimal" && h->dialect != "chat")
            throw Error(ErrorCode::InvalidArgument, "dialect must be minimal or chat");
    }
    if (c.timeout_s <= 0)
        throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
    m.timeout_s = c.timeout_s;
    m.max_retries = c.max_retries;
    m.tool_budget = c.tool_budget;
    m.seed = c.seed;
    return m;
}

TaskRun run_task(const MigrationTask& task, const CliConfig& c, const fs::path& corpus_root, const Ruleset& rules,
    const std::vector<Finding>& app_findings, const std::optional<ModelConfig>& model, const ExemplarLibrary& exemplars)
{
    TaskRun run;
    const fs::path dir = c.out_dir / task.task_id;
    std::error_code ec;
    fs::remove_all(dir, ec);

    FileSet before;
    try {
        before = read_context_files(task, corpus_root / task.app_id);
    } catch (const Error& e) {
        run.report = validate_patch(task, {}, std::nullopt, rules, {}, e.what());
        json::write_file(dir / "patch.diff", "");
        json::write_file(dir / "validation.json", validation_to_json(run.report));
        return run;
    }
    write_tree(dir / "before", before);

    std::optional<Patch> patch;
    std::string failure;
    const bool deterministic = task.kind == TaskKind::HashUpgrade && !c.via_model;
    if (deterministic) {
        try {
            patch = apply_hash_upgrade(task, before, rules, app_findings, &run.diag);
        } catch (const Error& e) {
            failure = e.what();
        }
    } else {
        try {
            const PromptBundle bundle = build_prompt(task, c.mode == "agentic" ? PromptMode::Agentic : PromptMode::Edit,
                before, exemplars);
            auto backend = make_backend(*model);
            ModelResponse resp;
            if (c.record_dir) {
                RecordingBackend rec(*backend);
                resp = complete(bundle, rec, *model);
                json::write_file(*c.record_dir / (bundle_hash(bundle) + ".json"),
                    replay_entry_json(bundle_hash(bundle), rec.turns()));
            } else {
                resp = complete(bundle, *backend, *model);
            }
            json::write_file(dir / "response.txt", resp.raw_text);
            if (resp.extracted_patch)
                patch = std::move(resp.extracted_patch);
            else
                failure = "NoPatchInResponse: " + resp.diagnostic;
        } catch (const Error& e) {
            failure = e.what();
        }
    }

    std::optional<FileSet> after;
    if (patch) {
        try {
            after = apply_patch(before, *patch);
        } catch (const Error& e) {
            failure = e.what();
        }
    }
    json::write_file(dir / "patch.diff", patch ? render_patch(*patch) : std::string());
    if (after)
        write_tree(dir / "after", *after);
    run.report = validate_patch(task, before, after, rules, {}, failure);
    json::write_file(dir / "validation.json", validation_to_json(run.report));
    return run;
}

} // namespace

int cmd_scan(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        Ruleset rules;
        try {
            rules = load_rules(c);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        std::error_code ec;
        if (!fs::is_directory(c.corpus_root, ec)) {
            err << "error: corpus root " << c.corpus_root.string() << " is not a directory\n";
            return kExitData;
        }
        const fs::path target = c.out_dir / "findings.jsonl";
        if (fs::exists(target, ec) && !c.force) {
            err << "error: " << target.string() << " exists; pass --force to overwrite\n";
            return kExitData;
        }
        ScanOptions options;
        options.jobs = std::max(1u, c.jobs);
        Diagnostics diag;
        CorpusScan scan = analyze_corpus(c.corpus_root, rules, options, diag);
        FindingsHeader header;
        header.corpus_root = c.corpus_root.generic_string();
        header.apps = scan.apps;
        header.generated_at = timestamp_or(c.fixed_clock);
        persist_findings(scan.findings, target, header);
        emit(diag, err, c.verbosity);
        const auto unresolved = std::count_if(scan.findings.begin(), scan.findings.end(),
            [](const Finding& f) { return f.resolution == ResolutionStatus::Unresolved; });
        out << "apps=" << scan.apps.size() << " findings=" << scan.findings.size() << " unresolved=" << unresolved
            << "\n";
        return kExitOk;
    });
}

int cmd_report(const CliConfig& c, std::ostream&, std::ostream& err)
{
    return guarded(err, [&] {
        ReportFormat format;
        if (c.format == "json")
            format = ReportFormat::Json;
        else if (c.format == "csv")
            format = ReportFormat::Csv;
        else if (c.format == "markdown" || c.format == "md")
            format = ReportFormat::Markdown;
        else {
            err << "error: unknown format '" << c.format << "' (json, csv, markdown)\n";
            return kExitConfig;
        }
        const FindingsFile file = load_findings_file(c.findings_path);
        const CorpusReport report = aggregate(file.findings, file.header.apps, file.header.corpus_root,
            timestamp_or(c.fixed_clock));
        const fs::path target = c.out_dir / ("report." + std::string(report_extension(format)));
        json::write_file(target, render(report, format));
        if (c.verbosity > 0)
            err << "wrote " << target.string() << "\n";
        return kExitOk;
    });
}

int cmd_migrate(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        if (c.kind_filter != "hash" && c.kind_filter != "pqc" && c.kind_filter != "all") {
            err << "error: --kind must be hash, pqc or all\n";
            return kExitConfig;
        }
        if (c.mode != "edit" && c.mode != "agentic") {
            err << "error: --mode must be edit or agentic\n";
            return kExitConfig;
        }
        Ruleset rules;
        try {
            rules = load_rules(c);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        std::optional<ModelConfig> model;
        if (!c.backend.empty())
            model = model_config(c);
        ExemplarLibrary exemplars;
        if (c.exemplars)
            exemplars = ExemplarLibrary::load(*c.exemplars);

        const FindingsFile file = load_findings_file(c.findings_path);
        const fs::path corpus_root = c.corpus_root.empty() ? fs::path(file.header.corpus_root) : c.corpus_root;
        MigrationPolicy policy;
        policy.hash_upgrades = c.kind_filter != "pqc";
        policy.pqc = c.kind_filter != "hash";
        const auto tasks = plan_tasks(file.findings, policy, corpus_root);

        const bool needs_model = std::any_of(tasks.begin(), tasks.end(),
            [&](const MigrationTask& t) { return is_pqc(t.kind) || c.via_model; });
        if (needs_model && !model) {
            err << "error: the planned tasks need a model backend (--backend)\n";
            return kExitConfig;
        }
        out << tasks.size() << " tasks planned\n";

        std::map<std::string, std::vector<Finding>> by_app;
        for (const auto& f : file.findings)
            by_app[f.location.app_id].push_back(f);

        std::vector<TaskRun> runs(tasks.size());
        parallel_for(tasks.size(), std::max(1u, c.jobs), [&](std::size_t i) {
            runs[i] = run_task(tasks[i], c, corpus_root, rules, by_app[tasks[i].app_id], model, exemplars);
        });

        std::size_t passed = 0;
        Diagnostics diag;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& r = runs[i].report;
            diag.merge(runs[i].diag);
            out << r.task_id << ": " << (r.overall() ? "pass" : "fail");
            std::vector<std::string> failed;
            for (const auto& check : r.checks)
                if (check.verdict == Verdict::Fail)
                    failed.emplace_back(to_string(check.check_id));
            if (!failed.empty()) {
                out << " (";
                for (std::size_t k = 0; k < failed.size(); ++k)
                    out << (k ? ", " : "") << failed[k];
                out << ")";
            }
            out << "\n";
            passed += r.overall() ? 1 : 0;
        }
        emit(diag, err, c.verbosity);
        out << "passed=" << passed << " failed=" << tasks.size() - passed << "\n";
        return kExitOk;
    });
}

int cmd_eval(const CliConfig& c, std::ostream& out, std::ostream& err)
{
    return guarded(err, [&] {
        std::error_code ec;
        if (!fs::is_directory(c.run_dir, ec)) {
            err << "error: run directory " << c.run_dir.string() << " not found\n";
            return kExitData;
        }
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(c.run_dir, ec))
            if (entry.is_directory() && fs::is_regular_file(entry.path() / "validation.json"))
                files.push_back(entry.path() / "validation.json");
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            err << "error: no validation reports in " << c.run_dir.string() << "\n";
            return kExitData;
        }
        std::vector<ValidationReport> reports;
        for (const auto& f : files)
            reports.push_back(validation_from_json(json::read_file(f), f.string()));
        std::sort(reports.begin(), reports.end(),
            [](const ValidationReport& a, const ValidationReport& b) { return a.task_id < b.task_id; });
        const EvalSummary summary = score_run(reports);
        json::write_file(c.run_dir / "eval.json", eval_to_json(summary));
        for (const auto& [kind, k] : summary.per_kind)
            out << to_string(kind) << ": " << k.passed << "/" << k.attempted << " passed\n";
        return kExitOk;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app {"Scan Android app sources for quantum-vulnerable cryptography and migrate it.", "pqscan"};
    app.require_subcommand(1);
    CliConfig c;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-j,--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--fixed-clock", c.fixed_clock, "timestamp written instead of the current time");
        sub->add_option("--seed", c.seed, "seed forwarded to model backends");
        sub->add_flag_callback("-v,--verbose", [&] { c.verbosity = 1; }, "also print notes");
        sub->add_flag_callback("-q,--quiet", [&] { c.verbosity = -1; }, "print no diagnostics");
    };

    auto* scan = app.add_subcommand("scan", "scan a corpus and write findings.jsonl");
    scan->add_option("corpus", c.corpus_root, "corpus root (one directory per app)")->required();
    scan->add_option("--ruleset", c.ruleset_path, "ruleset JSON (default: built in)");
    scan->add_option("-o,--out", c.out_dir, "output directory")->default_val(".");
    scan->add_flag("--force", c.force, "overwrite an existing findings file");
    common(scan);

    auto* report = app.add_subcommand("report", "aggregate findings into a table");
    report->add_option("findings", c.findings_path, "findings.jsonl")->required();
    report->add_option("-f,--format", c.format, "json, csv or markdown")->default_val("markdown");
    report->add_option("-o,--out", c.out_dir, "output directory")->default_val(".");
    common(report);

    auto* migrate = app.add_subcommand("migrate", "plan, perform and validate migrations");
    migrate->add_option("findings", c.findings_path, "findings.jsonl")->required();
    migrate->add_option("--corpus", c.corpus_root, "corpus root (default: the one recorded in the findings)");
    migrate->add_option("-o,--out", c.out_dir, "run directory")->required();
    migrate->add_option("--kind", c.kind_filter, "hash, pqc or all")->default_val("all");
    migrate->add_option("--backend", c.backend, "scripted:<id>, replay:<dir> or http:<url>");
    migrate->add_option("--model", c.model_name, "model name for the HTTP backend");
    migrate->add_option("--auth-env", c.auth_env, "environment variable holding the HTTP token");
    migrate->add_option("--dialect", c.dialect, "HTTP dialect: minimal or chat")->default_val("minimal");
    migrate->add_option("--mode", c.mode, "edit or agentic")->default_val("edit");
    migrate->add_flag("--via-model", c.via_model, "send hash upgrades to the backend too");
    migrate->add_option("--exemplars", c.exemplars, "exemplar library directory");
    migrate->add_option("--record", c.record_dir, "write every exchange to this replay store");
    migrate->add_option("--timeout", c.timeout_s, "seconds per request")->default_val(120);
    migrate->add_option("--retries", c.max_retries, "retries after transport errors")->default_val(2);
    migrate->add_option("--tool-budget", c.tool_budget, "tool calls per agentic session")->default_val(32);
    migrate->add_option("--ruleset", c.ruleset_path, "ruleset JSON (default: built in)");
    common(migrate);

    auto* eval = app.add_subcommand("eval", "summarize a migration run into eval.json");
    eval->add_option("run_dir", c.run_dir, "run directory written by migrate")->required();
    common(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (*scan)
        return cmd_scan(c, out, err);
    if (*report)
        return cmd_report(c, out, err);
    if (*migrate)
        return cmd_migrate(c, out, err);
    return cmd_eval(c, out, err);
}

} // namespace pqscan
