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

#include <pqscan/scanner.hpp>

#include "smali_support.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace pqscan {

namespace fs = std::filesystem;

namespace {

std::string trim_copy(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return std::string(s);
}

// Splits the tokens strictly between `open` and `close` on depth-0 commas.
void capture_arguments(const LexedUnit& u, std::size_t open, std::size_t close, CallSite& site)
{
    const auto& toks = u.tokens();
    if (close == open + 1)
        return;
    int depth = 0;
    std::size_t first = open + 1;
    auto flush = [&](std::size_t last_exclusive) {
        if (last_exclusive <= first) {
            site.argument_exprs.emplace_back();
            site.argument_ranges.push_back({toks[first].offset, toks[first].offset});
            return;
        }
        const std::size_t b = toks[first].offset;
        const std::size_t e = toks[last_exclusive - 1].end();
        site.argument_ranges.push_back({b, e});
        site.argument_exprs.push_back(trim_copy(u.text_without_comments(b, e)));
    };
    for (std::size_t i = open + 1; i < close; ++i) {
        const auto& t = toks[i];
        if (t.is("(") || t.is("[") || t.is("{"))
            ++depth;
        else if (t.is(")") || t.is("]") || t.is("}"))
            --depth;
        else if (depth == 0 && t.is(",")) {
            flush(i);
            first = i + 1;
        }
    }
    flush(close);
}

void scan_source(const LexedUnit& u, const Ruleset& rules, Diagnostics* diag, std::vector<CallSite>& out)
{
    std::multimap<std::string_view, const Trigger*> by_receiver;
    for (const auto& t : rules.triggers)
        if (t.syntax == TriggerSyntax::Source)
            by_receiver.emplace(t.receiver_name, &t);

    const auto& toks = u.tokens();
    const bool kotlin = u.unit().language == Language::Kotlin;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != TokenKind::Identifier)
            continue;
        auto [lo, hi] = by_receiver.equal_range(toks[i].text);
        for (auto it = lo; it != hi; ++it) {
            const Trigger& trig = *it->second;
            std::size_t open = 0;
            std::size_t start_tok = i;
            if (trig.is_constructor()) {
                if (i + 1 >= toks.size() || !toks[i + 1].is("("))
                    continue;
                std::size_t k = i;
                while (k >= 2 && toks[k - 1].is(".") && toks[k - 2].kind == TokenKind::Identifier)
                    k -= 2;
                if (kotlin) {
                    if (k >= 1) {
                        const auto& prev = toks[k - 1];
                        if (prev.is(".") || prev.is("::") || prev.is("?.") || prev.is("@") || prev.is_ident("fun")
                            || prev.is_ident("class") || prev.is_ident("interface") || prev.is_ident("object"))
                            continue;
                    }
                    start_tok = k;
                } else {
                    if (k < 1 || !toks[k - 1].is_ident("new"))
                        continue;
                    start_tok = k - 1;
                }
                open = i + 1;
            } else {
                if (i + 3 >= toks.size() || !toks[i + 1].is(".") || !toks[i + 2].is_ident(trig.member_name)
                    || !toks[i + 3].is("("))
                    continue;
                open = i + 3;
            }

            CallSite site;
            site.api_kind = trig.api_kind;
            site.matched_pattern_id = trig.pattern_id;
            const std::size_t start = toks[start_tok].offset;
            auto [line, col] = u.lines().position(start);
            site.location = {u.unit().app_id, u.unit().file_path, line, col};
            const std::size_t close = u.matching_token(open);
            if (close == LexedUnit::npos || !toks[close].is(")")) {
                if (diag)
                    diag->warn(u.unit().app_id + "/" + u.unit().file_path, line,
                        "malformed arguments for " + trig.receiver_name + "." + trig.member_name);
                site.call = {start, toks[open].end()};
            } else {
                capture_arguments(u, open, close, site);
                site.call = {start, toks[close].end()};
            }
            if (static_cast<int>(site.argument_exprs.size()) < trig.min_args)
                continue;
            site.enclosing_scope = u.enclosing_scope(start);
            out.push_back(std::move(site));
        }
    }
}

void scan_smali(const LexedUnit& u, const Ruleset& rules, std::vector<CallSite>& out)
{
    std::vector<const Trigger*> triggers;
    for (const auto& t : rules.triggers)
        if (t.syntax == TriggerSyntax::Smali)
            triggers.push_back(&t);
    if (triggers.empty())
        return;
    for (const auto& line : smali::lines_in(u, {0, u.content().size()})) {
        auto inv = smali::parse_invoke(line);
        if (!inv)
            continue;
        for (const Trigger* trig : triggers) {
            if (inv->class_descriptor != trig->receiver_name || inv->member != trig->member_name)
                continue;
            CallSite site;
            site.api_kind = trig->api_kind;
            site.matched_pattern_id = trig->pattern_id;
            auto [ln, col] = u.lines().position(line.offset);
            site.location = {u.unit().app_id, u.unit().file_path, ln, col};
            site.argument_exprs = inv->argument_registers();
            const std::size_t skip = inv->is_static ? 0 : 1;
            for (std::size_t r = skip; r < inv->registers.size(); ++r)
                site.argument_ranges.push_back(
                    {inv->register_offsets[r], inv->register_offsets[r] + inv->registers[r].size()});
            if (!inv->is_static && !inv->registers.empty())
                site.smali_receiver = inv->registers.front();
            site.call = {line.offset, line.offset + line.text.size()};
            if (static_cast<int>(site.argument_exprs.size()) < trig->min_args)
                continue;
            site.enclosing_scope = u.enclosing_scope(line.offset);
            out.push_back(std::move(site));
        }
    }
}

bool is_hidden(const fs::path& p)
{
    const auto name = p.filename().string();
    return !name.empty() && name.front() == '.';
}

} // namespace

bool call_site_less(const CallSite& a, const CallSite& b)
{
    return std::tie(a.location, a.matched_pattern_id) < std::tie(b.location, b.matched_pattern_id);
}

std::vector<CallSite> scan_unit(const LexedUnit& unit, const Ruleset& rules, Diagnostics* diag)
{
    std::vector<CallSite> sites;
    if (unit.unit().language == Language::Smali)
        scan_smali(unit, rules, sites);
    else
        scan_source(unit, rules, diag, sites);
    std::sort(sites.begin(), sites.end(), call_site_less);
    return sites;
}

std::vector<CallSite> scan_unit(const SourceUnit& unit, const Ruleset& rules, Diagnostics* diag)
{
    return scan_unit(LexedUnit(unit, diag), rules, diag);
}

std::vector<SourceUnit> load_app_sources(const fs::path& app_root, const std::string& app_id,
    const ScanOptions& options, Diagnostics& diag)
{
    std::vector<std::pair<std::string, fs::path>> files;
    std::error_code ec;
    fs::recursive_directory_iterator it(app_root, fs::directory_options::skip_permission_denied, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot open " + app_root.string() + ": " + ec.message());
    for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) {
            diag.warn(app_id, 0, "UnreadableFile: " + ec.message());
            ec.clear();
            continue;
        }
        const auto& entry = *it;
        const auto name = entry.path().filename().string();
        std::error_code sec;
        const bool is_dir = entry.is_directory(sec);
        if (is_dir) {
            if (is_hidden(entry.path()) || options.ignore_dirs.contains(name))
                it.disable_recursion_pending();
            continue;
        }
        if (is_hidden(entry.path()))
            continue;
        if (!language_for_path(name))
            continue;
        auto rel = normalize_relative_path(fs::relative(entry.path(), app_root, sec).generic_string());
        if (!rel)
            continue;
        files.emplace_back(*rel, entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<SourceUnit> units;
    for (const auto& [rel, path] : files) {
        std::error_code sec;
        const auto size = fs::file_size(path, sec);
        if (!sec && size > options.max_file_bytes) {
            diag.warn(app_id + "/" + rel, 0,
                "skipped: " + std::to_string(size) + " bytes exceeds the " + std::to_string(options.max_file_bytes)
                    + "-byte cap");
            continue;
        }
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            diag.warn(app_id + "/" + rel, 0, "UnreadableFile: cannot open for reading");
            continue;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) {
            diag.warn(app_id + "/" + rel, 0, "UnreadableFile: read error");
            continue;
        }
        units.push_back(make_source_unit(app_id, rel, ss.str(), diag));
    }
    return units;
}

std::vector<CallSite> scan_app(const fs::path& app_root, const std::string& app_id, const Ruleset& rules,
    const ScanOptions& options, Diagnostics& diag)
{
    const auto units = load_app_sources(app_root, app_id, options, diag);
    std::vector<std::vector<CallSite>> per_unit(units.size());
    parallel_for(units.size(), options.jobs, [&](std::size_t i) {
        per_unit[i] = scan_unit(LexedUnit(units[i], &diag), rules, &diag);
    });
    std::vector<CallSite> all;
    for (auto& v : per_unit)
        all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    std::sort(all.begin(), all.end(), call_site_less);
    return all;
}

std::vector<std::string> list_apps(const fs::path& corpus_root, const ScanOptions& options)
{
    std::error_code ec;
    if (!fs::is_directory(corpus_root, ec))
        throw Error(ErrorCode::IoError, "corpus root " + corpus_root.string() + " is not a directory");
    std::vector<std::string> apps;
    for (const auto& entry : fs::directory_iterator(corpus_root, ec)) {
        std::error_code sec;
        if (!entry.is_directory(sec) || is_hidden(entry.path()))
            continue;
        const auto name = entry.path().filename().string();
        if (options.ignore_dirs.contains(name))
            continue;
        apps.push_back(name);
    }
    if (ec)
        throw Error(ErrorCode::IoError, "cannot list " + corpus_root.string() + ": " + ec.message());
    std::sort(apps.begin(), apps.end());
    return apps;
}

} // namespace pqscan
