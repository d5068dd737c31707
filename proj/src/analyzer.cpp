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

#include <pqscan/analyzer.hpp>

#include <algorithm>
#include <memory>
#include <set>
#include <tuple>

namespace pqscan {

namespace {

std::string evidence_at(const LexedUnit& u, int line)
{
    return make_evidence(u.lines().line_text(u.content(), line));
}

Finding finding_for_site(const CallSite& site, const LexedUnit& u, const ConstantTable& table, const Ruleset& rules,
    Diagnostics& diag)
{
    Finding f;
    f.location = site.location;
    f.api_kind = site.api_kind;
    f.pattern_id = site.matched_pattern_id;
    f.evidence = evidence_at(u, site.location.line);

    if (site.api_kind == ApiKind::PqcLibraryReference) {
        const Trigger* trig = rules.find_trigger(site.matched_pattern_id);
        f.spec = pqc_spec_for(trig ? trig->receiver_name : std::string("PQC"));
        f.resolution = ResolutionStatus::ResolvedLiteral;
        f.safety = classify(*f.spec, std::nullopt, rules);
        return f;
    }

    if (!carries_algorithm(site.api_kind)) {
        f.resolution = ResolutionStatus::Unresolved;
        f.safety = unresolved_label(rules);
        f.misuse_flags = flag_misuse(site, std::nullopt, std::nullopt, u, table);
        return f;
    }

    Resolution res = resolve_argument(site, u, table, rules, &diag);
    std::optional<AlgorithmSpec> spec;
    if (res.resolved()) {
        try {
            spec = parse_transformation(*res.value, rules.aliases);
        } catch (const Error& e) {
            diag.warn(site.location.app_id + "/" + site.location.file_path, site.location.line,
                std::string("unparseable algorithm: ") + e.what());
        }
    }
    std::optional<int> bits;
    if (site.api_kind == ApiKind::KeyPairGeneratorFactory || site.api_kind == ApiKind::KeyGeneratorFactory
        || site.api_kind == ApiKind::SecretKeyConstruction)
        bits = resolve_key_bits(site, u, table, &diag);
    if (spec && bits)
        spec->key_bits = bits;

    if (spec) {
        f.resolution = res.status;
        f.trace = std::move(res.steps);
        f.origin = std::move(res.origin);
        f.safety = classify(*spec, bits, rules);
    } else {
        f.resolution = ResolutionStatus::Unresolved;
        f.safety = unresolved_label(rules);
    }
    f.misuse_flags = flag_misuse(site, spec, bits, u, table);
    f.spec = std::move(spec);
    return f;
}

Finding finding_for_reference(const PqcReference& ref, const LexedUnit& u, const Ruleset& rules)
{
    Finding f;
    f.location = ref.location;
    f.api_kind = ApiKind::PqcLibraryReference;
    switch (ref.source) {
    case PqcReference::Source::Import: f.pattern_id = kPqcImportPattern; break;
    case PqcReference::Source::QualifiedName: f.pattern_id = kPqcQualifiedPattern; break;
    case PqcReference::Source::Smali: f.pattern_id = kPqcSmaliPattern; break;
    }
    f.resolution = ResolutionStatus::ResolvedLiteral;
    f.spec = pqc_spec_for(ref.qualified_name);
    f.safety = classify(*f.spec, std::nullopt, rules);
    if (!ref.used)
        f.misuse_flags.insert(MisuseFlag::UnusedPqcImport);
    f.evidence = evidence_at(u, ref.location.line);
    return f;
}

std::vector<Finding> analyze_unit(const LexedUnit& u, const ConstantTable& table, const Ruleset& rules,
    Diagnostics& diag)
{
    std::vector<Finding> out;
    std::set<int> trigger_pqc_lines;
    for (const auto& site : scan_unit(u, rules, &diag)) {
        if (site.api_kind == ApiKind::PqcLibraryReference)
            trigger_pqc_lines.insert(site.location.line);
        out.push_back(finding_for_site(site, u, table, rules, diag));
    }
    for (const auto& ref : detect_pqc_references(u, rules)) {
        // A provider construction already reported by its trigger is not
        // reported again for the qualified name it is written with.
        if (ref.source != PqcReference::Source::Import && trigger_pqc_lines.contains(ref.location.line))
            continue;
        out.push_back(finding_for_reference(ref, u, rules));
    }
    return out;
}

} // namespace

std::vector<Finding> analyze_units(const std::vector<SourceUnit>& units, const Ruleset& rules, Diagnostics& diag,
    unsigned jobs)
{
    std::vector<std::unique_ptr<LexedUnit>> lexed(units.size());
    parallel_for(units.size(), jobs, [&](std::size_t i) { lexed[i] = std::make_unique<LexedUnit>(units[i], &diag); });
    std::vector<const LexedUnit*> ptrs;
    for (const auto& l : lexed)
        ptrs.push_back(l.get());
    const ConstantTable table = build_constant_table(ptrs, &diag);

    std::vector<std::vector<Finding>> per_unit(units.size());
    parallel_for(units.size(), jobs, [&](std::size_t i) { per_unit[i] = analyze_unit(*lexed[i], table, rules, diag); });
    std::vector<Finding> all;
    for (auto& v : per_unit)
        all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    std::sort(all.begin(), all.end(), finding_less);
    return all;
}

std::vector<Finding> analyze_app(const std::filesystem::path& app_root, const std::string& app_id,
    const Ruleset& rules, const ScanOptions& options, Diagnostics& diag)
{
    return analyze_units(load_app_sources(app_root, app_id, options, diag), rules, diag, options.jobs);
}

CorpusScan analyze_corpus(const std::filesystem::path& corpus_root, const Ruleset& rules, const ScanOptions& options,
    Diagnostics& diag)
{
    CorpusScan scan;
    scan.apps = list_apps(corpus_root, options);
    for (const auto& app : scan.apps) {
        auto f = analyze_app(corpus_root / app, app, rules, options, diag);
        scan.findings.insert(scan.findings.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
    }
    std::sort(scan.findings.begin(), scan.findings.end(), finding_less);
    return scan;
}

} // namespace pqscan
