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

#include <pqscan/classifier.hpp>

#include "smali_support.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace pqscan {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

const std::string* matching_marker(std::string_view name, const Ruleset& rules)
{
    const std::string l = lower(name);
    for (const auto& m : rules.pqc_markers)
        if (!m.empty() && l.find(lower(m)) != std::string::npos)
            return &m;
    return nullptr;
}

SourceLocation location_of(const LexedUnit& u, std::size_t offset)
{
    auto [line, col] = u.lines().position(offset);
    return {u.unit().app_id, u.unit().file_path, line, col};
}

bool starts_lower(std::string_view s)
{
    return !s.empty() && std::islower(static_cast<unsigned char>(s.front()));
}

bool starts_upper(std::string_view s)
{
    return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

struct Statement {
    std::size_t keyword = 0; // token index of import/package
    std::size_t end = 0;     // one past the last token
    std::string path;        // dotted
    std::string simple;      // last segment or alias
    bool wildcard = false;
};

// Parses `import a.b.C [as D][;]` or `package a.b[;]` starting at token i.
Statement parse_statement(const std::vector<Token>& toks, std::size_t i)
{
    Statement st;
    st.keyword = i;
    std::size_t k = i + 1;
    if (k < toks.size() && toks[k].is_ident("static"))
        ++k;
    while (k < toks.size()) {
        if (toks[k].kind == TokenKind::Identifier) {
            st.path += toks[k].text;
            st.simple = std::string(toks[k].text);
            ++k;
        } else if (toks[k].is("*")) {
            st.path += "*";
            st.wildcard = true;
            ++k;
            break;
        } else {
            break;
        }
        if (k < toks.size() && toks[k].is(".") && toks[k].line == toks[i].line) {
            st.path += ".";
            ++k;
            continue;
        }
        break;
    }
    if (k + 1 < toks.size() && toks[k].is_ident("as") && toks[k + 1].kind == TokenKind::Identifier) {
        st.simple = std::string(toks[k + 1].text);
        k += 2;
    }
    if (k < toks.size() && toks[k].is(";"))
        ++k;
    st.end = k;
    return st;
}

bool at_statement_start(const std::vector<Token>& toks, std::size_t i)
{
    return i == 0 || toks[i - 1].is(";") || toks[i - 1].line < toks[i].line;
}

std::vector<PqcReference> detect_smali(const LexedUnit& u, const Ruleset& rules)
{
    std::vector<PqcReference> out;
    // A construction is new-instance plus invoke-direct <init>; it is
    // reported once, like `new X()` in source.
    std::set<std::string, std::less<>> allocated;
    for (const auto& line : smali::lines_in(u, {0, u.content().size()})) {
        if (line.text.starts_with(".method"))
            allocated.clear();
        if (line.text.starts_with(".class")) {
            if (matching_marker(line.text, rules))
                return {};
            continue;
        }
        if (line.text.starts_with(".source") || line.text.starts_with(".super"))
            continue;
        const std::string_view t = line.text;
        for (std::size_t p = t.find('L'); p != std::string_view::npos; p = t.find('L', p + 1)) {
            if (p > 0 && (std::isalnum(static_cast<unsigned char>(t[p - 1])) || t[p - 1] == '_' || t[p - 1] == '/'
                             || t[p - 1] == '$'))
                continue;
            const auto semi = t.find(';', p);
            if (semi == std::string_view::npos)
                break;
            const auto desc = t.substr(p + 1, semi - p - 1);
            if (desc.find('/') == std::string_view::npos
                || desc.find_first_of(" \t,{}()") != std::string_view::npos)
                continue;
            std::string dotted(desc);
            std::replace(dotted.begin(), dotted.end(), '/', '.');
            if (const std::string* m = matching_marker(dotted, rules)) {
                if (t.starts_with("new-instance"))
                    allocated.insert(dotted);
                else if (t.starts_with("invoke-direct") && t.find(";-><init>", semi) == semi
                    && allocated.contains(dotted))
                    break;
                PqcReference ref;
                ref.location = location_of(u, line.offset);
                ref.marker = *m;
                ref.qualified_name = dotted;
                ref.used = true;
                ref.source = PqcReference::Source::Smali;
                ref.range = {line.offset, line.offset + line.text.size()};
                out.push_back(std::move(ref));
                break;
            }
        }
    }
    return out;
}

} // namespace

SafetyLabel classify(const AlgorithmSpec& spec, std::optional<int> key_bits, const Ruleset& rules)
{
    const std::optional<int> bits = key_bits ? key_bits : spec.key_bits;
    const ClassificationRule* best = nullptr;
    const ClassificationRule* tie = nullptr;
    for (const auto& rule : rules.classification_rules) {
        if (!rule.matches(spec, bits, rules.aliases))
            continue;
        if (!best || rule.priority > best->priority) {
            best = &rule;
            tie = nullptr;
        } else if (rule.priority == best->priority) {
            tie = &rule;
        }
    }
    if (tie)
        throw Error(ErrorCode::AmbiguousRuleMatch,
            "rules '" + best->rule_id + "' and '" + tie->rule_id + "' both match " + spec.raw + " at priority "
                + std::to_string(best->priority));
    if (!best)
        return SafetyLabel {Label::Unknown, std::nullopt, "none"};
    return best->label;
}

SafetyLabel unresolved_label(const Ruleset& rules)
{
    if (const ClassificationRule* r = rules.find_rule(kUnresolvedRuleId))
        return r->label;
    return SafetyLabel {Label::Unknown, std::nullopt, std::string(kUnresolvedRuleId)};
}

bool is_short_asymmetric_key(const Primitive& primitive, int key_bits)
{
    switch (primitive.kind) {
    case PrimitiveKind::RSA:
    case PrimitiveKind::DSA:
    case PrimitiveKind::DH:
        return key_bits < 2048;
    case PrimitiveKind::EC:
        return key_bits < 224;
    default:
        return false;
    }
}

std::set<MisuseFlag> flag_misuse(const CallSite& site, const std::optional<AlgorithmSpec>& spec,
    std::optional<int> key_bits, const LexedUnit& unit, const ConstantTable& table)
{
    std::set<MisuseFlag> flags;
    if (spec) {
        if (spec->mode && spec->mode->kind == ModeKind::ECB)
            flags.insert(MisuseFlag::EcbMode);
        const std::optional<int> bits = key_bits ? key_bits : spec->key_bits;
        if (bits && is_short_asymmetric_key(spec->primitive, *bits))
            flags.insert(MisuseFlag::ShortAsymmetricKey);
    }
    if (site.api_kind == ApiKind::IvConstruction && !site.argument_exprs.empty()
        && analyze_byte_argument(site, 0, unit, table).kind == ByteSource::Kind::Constant)
        flags.insert(MisuseFlag::StaticIv);
    if (site.api_kind == ApiKind::RandomConstruction && !site.argument_exprs.empty()
        && argument_is_constant_seed(site, 0, unit, table))
        flags.insert(MisuseFlag::SeededInsecureRandom);
    return flags;
}

std::vector<PqcReference> detect_pqc_references(const LexedUnit& u, const Ruleset& rules)
{
    if (rules.pqc_markers.empty())
        return {};
    if (u.unit().language == Language::Smali)
        return detect_smali(u, rules);

    const auto& toks = u.tokens();
    std::vector<Statement> imports;
    std::vector<bool> in_statement(toks.size(), false);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (!(toks[i].is_ident("import") || toks[i].is_ident("package")) || !at_statement_start(toks, i))
            continue;
        Statement st = parse_statement(toks, i);
        const std::size_t end = st.end;
        for (std::size_t k = i; k < end; ++k)
            in_statement[k] = true;
        if (toks[i].text == "package") {
            if (matching_marker(st.path, rules))
                return {};
        } else {
            imports.push_back(std::move(st));
        }
        if (end > i + 1)
            i = end - 1;
    }

    std::vector<PqcReference> out;
    for (const auto& st : imports) {
        const std::string* m = matching_marker(st.path, rules);
        if (!m)
            continue;
        PqcReference ref;
        ref.location = location_of(u, toks[st.keyword].offset);
        ref.marker = *m;
        ref.qualified_name = st.path;
        ref.source = PqcReference::Source::Import;
        ref.range = {toks[st.keyword].offset, toks[st.end - 1].end()};
        ref.used = st.wildcard;
        if (!st.wildcard) {
            for (std::size_t i = 0; i < toks.size() && !ref.used; ++i)
                if (!in_statement[i] && toks[i].is_ident(st.simple))
                    ref.used = true;
        }
        out.push_back(std::move(ref));
    }

    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (in_statement[i] || toks[i].kind != TokenKind::Identifier)
            continue;
        if (i > 0 && (toks[i - 1].is(".") || toks[i - 1].is("?.") || toks[i - 1].is("::")))
            continue;
        std::vector<std::size_t> segs {i};
        while (segs.back() + 2 < toks.size() && toks[segs.back() + 1].is(".")
            && toks[segs.back() + 2].kind == TokenKind::Identifier)
            segs.push_back(segs.back() + 2);
        if (segs.size() < 3)
            continue;
        const auto first = toks[segs[0]].text;
        if (first == "this" || first == "super" || !starts_lower(first) || !starts_lower(toks[segs[1]].text))
            continue;
        std::size_t cls = 0;
        for (std::size_t s = 2; s < segs.size(); ++s)
            if (starts_upper(toks[segs[s]].text)) {
                cls = s;
                break;
            }
        if (cls == 0)
            continue;
        std::string name;
        for (std::size_t s = 0; s <= cls; ++s) {
            if (s)
                name += ".";
            name += toks[segs[s]].text;
        }
        const std::string* m = matching_marker(name, rules);
        i = segs.back();
        if (!m)
            continue;
        PqcReference ref;
        ref.location = location_of(u, toks[segs[0]].offset);
        ref.marker = *m;
        ref.qualified_name = name;
        ref.source = PqcReference::Source::QualifiedName;
        ref.range = {toks[segs[0]].offset, toks[segs[cls]].end()};
        out.push_back(std::move(ref));
    }
    std::sort(out.begin(), out.end(),
        [](const PqcReference& a, const PqcReference& b) { return a.location < b.location; });
    return out;
}

std::vector<PqcReference> detect_pqc_references(const SourceUnit& unit, const Ruleset& rules)
{
    return detect_pqc_references(LexedUnit(unit), rules);
}

AlgorithmSpec pqc_spec_for(std::string_view qualified_name)
{
    const std::string l = lower(qualified_name);
    AlgorithmSpec spec;
    if (l.find("kyber") != std::string::npos || l.find("mlkem") != std::string::npos
        || l.find("ml-kem") != std::string::npos) {
        spec.primitive = PrimitiveKind::KYBER;
        spec.raw = "Kyber";
    } else if (l.find("dilithium") != std::string::npos || l.find("mldsa") != std::string::npos
        || l.find("ml-dsa") != std::string::npos) {
        spec.primitive = PrimitiveKind::DILITHIUM;
        spec.raw = "Dilithium";
    } else {
        spec.primitive = Primitive::make_other("PQC");
        spec.raw = "PQC";
    }
    return spec;
}

} // namespace pqscan
