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

#include <pqscan/ruleset.hpp>

#include <pqscan/diagnostics.hpp>

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pqscan {

using nlohmann::json;

namespace {

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
    });
}

bool is_factory(ApiKind k)
{
    switch (k) {
    case ApiKind::CipherFactory:
    case ApiKind::DigestFactory:
    case ApiKind::KeyPairGeneratorFactory:
    case ApiKind::KeyGeneratorFactory:
    case ApiKind::MacFactory:
    case ApiKind::SignatureFactory:
        return true;
    default:
        return false;
    }
}

[[noreturn]] void fail(std::string_view source, const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::RulesetParseError, std::string(source) + ": " + field + ": " + what);
}

class FieldReader {
public:
    FieldReader(const json& obj, std::string path, std::string_view source)
        : m_obj(obj)
        , m_path(std::move(path))
        , m_source(source)
    {
        if (!m_obj.is_object())
            fail(m_source, m_path, "expected an object");
    }

    std::string str(const char* key) const
    {
        auto v = opt_str(key);
        if (!v)
            fail(m_source, m_path + "." + key, "missing required field");
        return *v;
    }

    std::optional<std::string> opt_str(const char* key) const
    {
        auto it = m_obj.find(key);
        if (it == m_obj.end() || it->is_null())
            return std::nullopt;
        if (!it->is_string())
            fail(m_source, m_path + "." + key, "expected a string");
        return it->get<std::string>();
    }

    std::optional<int> opt_int(const char* key) const
    {
        auto it = m_obj.find(key);
        if (it == m_obj.end() || it->is_null())
            return std::nullopt;
        if (!it->is_number_integer())
            fail(m_source, m_path + "." + key, "expected an integer");
        return it->get<int>();
    }

    const std::string& path() const { return m_path; }

private:
    const json& m_obj;
    std::string m_path;
    std::string_view m_source;
};

std::string line_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
    return "line " + std::to_string(line);
}

// Primitive kind a rule's primitive name denotes, if it is not an OTHER name.
std::optional<PrimitiveKind> rule_primitive_kind(const ClassificationRule& r, const AliasTable& aliases)
{
    if (r.primitive == "*")
        return std::nullopt;
    return aliases.lookup(r.primitive);
}

bool primitives_overlap(const ClassificationRule& a, const ClassificationRule& b, const AliasTable& aliases)
{
    if (a.primitive == "*" || b.primitive == "*")
        return true;
    auto ka = rule_primitive_kind(a, aliases);
    auto kb = rule_primitive_kind(b, aliases);
    if (ka || kb)
        return ka == kb;
    return iequals(a.primitive, b.primitive);
}

bool ranges_overlap(const ClassificationRule& a, const ClassificationRule& b)
{
    const int lo = std::max(a.min_key_bits.value_or(std::numeric_limits<int>::min()),
        b.min_key_bits.value_or(std::numeric_limits<int>::min()));
    const int hi = std::min(a.max_key_bits.value_or(std::numeric_limits<int>::max()),
        b.max_key_bits.value_or(std::numeric_limits<int>::max()));
    return lo <= hi;
}

} // namespace

bool ClassificationRule::matches(const AlgorithmSpec& spec, std::optional<int> key_bits, const AliasTable& aliases) const
{
    if (primitive != "*") {
        if (spec.primitive.is_other()) {
            if (aliases.lookup(primitive) || !iequals(primitive, spec.primitive.other))
                return false;
        } else {
            auto kind = aliases.lookup(primitive);
            if (!kind || *kind != spec.primitive.kind)
                return false;
        }
    }
    if (mode) {
        if (!spec.mode)
            return false;
        const std::string name = spec.mode->is_other() ? spec.mode->other : mode_name(*spec.mode);
        if (!iequals(name, *mode))
            return false;
    }
    if (min_key_bits && (!key_bits || *key_bits < *min_key_bits))
        return false;
    if (max_key_bits && (!key_bits || *key_bits > *max_key_bits))
        return false;
    return true;
}

const Trigger* Ruleset::find_trigger(std::string_view pattern_id) const
{
    for (const auto& t : triggers)
        if (t.pattern_id == pattern_id)
            return &t;
    return nullptr;
}

const ClassificationRule* Ruleset::find_rule(std::string_view rule_id) const
{
    for (const auto& r : classification_rules)
        if (r.rule_id == rule_id)
            return &r;
    return nullptr;
}

Ruleset parse_ruleset(std::string_view json_text, std::string_view source_name)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(source_name, line_of(json_text, e.byte), e.what());
    }
    if (!doc.is_object())
        fail(source_name, "<root>", "expected an object");

    Ruleset rules;
    FieldReader root(doc, "<root>", source_name);
    rules.version = root.str("version");
    if (rules.version.empty() || rules.version.front() != '1')
        fail(source_name, "version", "unsupported ruleset version '" + rules.version + "'");

    auto triggers = doc.find("triggers");
    if (triggers == doc.end() || !triggers->is_array())
        fail(source_name, "triggers", "missing required array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < triggers->size(); ++i) {
        FieldReader f((*triggers)[i], "triggers[" + std::to_string(i) + "]", source_name);
        Trigger t;
        t.pattern_id = f.str("pattern_id");
        auto kind_name = f.str("api_kind");
        auto kind = api_kind_from_string(kind_name);
        if (!kind)
            fail(source_name, f.path() + ".api_kind", "unknown api kind '" + kind_name + "'");
        t.api_kind = *kind;
        t.receiver_name = f.str("receiver_name");
        t.member_name = f.str("member_name");
        t.arg_index_of_algorithm = f.opt_int("arg_index_of_algorithm");
        t.min_args = f.opt_int("min_args").value_or(0);
        auto syntax = f.opt_str("syntax").value_or("source");
        if (syntax == "source")
            t.syntax = TriggerSyntax::Source;
        else if (syntax == "smali")
            t.syntax = TriggerSyntax::Smali;
        else
            fail(source_name, f.path() + ".syntax", "expected 'source' or 'smali'");
        if (is_factory(t.api_kind) && !t.arg_index_of_algorithm)
            fail(source_name, f.path() + ".arg_index_of_algorithm", "required for factory kinds");
        if (!seen.insert(t.pattern_id).second)
            throw Error(ErrorCode::DuplicatePatternId,
                std::string(source_name) + ": " + f.path() + ": pattern_id '" + t.pattern_id + "' already defined");
        rules.triggers.push_back(std::move(t));
    }

    if (auto aliases = doc.find("aliases"); aliases != doc.end()) {
        if (!aliases->is_object())
            fail(source_name, "aliases", "expected an object");
        for (const auto& [name, target] : aliases->items()) {
            if (!target.is_string())
                fail(source_name, "aliases." + name, "expected a string");
            auto p = primitive_from_name(target.get<std::string>());
            if (p.is_other())
                fail(source_name, "aliases." + name, "unknown primitive '" + target.get<std::string>() + "'");
            rules.aliases.add(name, p.kind);
        }
    }

    if (auto crules = doc.find("classification_rules"); crules != doc.end()) {
        if (!crules->is_array())
            fail(source_name, "classification_rules", "expected an array");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < crules->size(); ++i) {
            FieldReader f((*crules)[i], "classification_rules[" + std::to_string(i) + "]", source_name);
            ClassificationRule r;
            r.rule_id = f.str("rule_id");
            r.primitive = f.str("primitive");
            r.mode = f.opt_str("mode");
            r.min_key_bits = f.opt_int("min_key_bits");
            r.max_key_bits = f.opt_int("max_key_bits");
            auto label_name = f.str("label");
            auto label = label_from_string(label_name);
            if (!label)
                fail(source_name, f.path() + ".label", "unknown label '" + label_name + "'");
            r.label.label = *label;
            r.label.condition = f.opt_str("condition");
            r.label.rationale_rule_id = r.rule_id;
            if (r.label.condition.has_value() != (*label == Label::ConditionallySafe))
                fail(source_name, f.path() + ".condition", "condition must be given exactly for ConditionallySafe");
            r.priority = f.opt_int("priority").value_or(0);
            r.rationale = f.opt_str("rationale").value_or("");
            if (!ids.insert(r.rule_id).second)
                fail(source_name, f.path() + ".rule_id", "duplicate rule_id '" + r.rule_id + "'");
            rules.classification_rules.push_back(std::move(r));
        }
        const auto& cr = rules.classification_rules;
        for (std::size_t i = 0; i < cr.size(); ++i) {
            for (std::size_t j = i + 1; j < cr.size(); ++j) {
                const auto& a = cr[i];
                const auto& b = cr[j];
                if (a.priority != b.priority || !primitives_overlap(a, b, rules.aliases) || !ranges_overlap(a, b))
                    continue;
                if (a.mode && b.mode && !iequals(*a.mode, *b.mode))
                    continue;
                throw Error(ErrorCode::AmbiguousRuleMatch,
                    std::string(source_name) + ": rules '" + a.rule_id + "' and '" + b.rule_id
                        + "' can match the same spec at priority " + std::to_string(a.priority));
            }
        }
    }

    auto read_strings = [&](const char* key, std::vector<std::string>& out) {
        auto it = doc.find(key);
        if (it == doc.end())
            return;
        if (!it->is_array())
            fail(source_name, key, "expected an array of strings");
        for (const auto& v : *it) {
            if (!v.is_string())
                fail(source_name, key, "expected an array of strings");
            out.push_back(v.get<std::string>());
        }
    };
    read_strings("pqc_markers", rules.pqc_markers);
    read_strings("placeholder_markers", rules.placeholder_markers);
    if (!doc.contains("placeholder_markers"))
        rules.placeholder_markers = {"TODO", "FIXME", "placeholder", "not implemented"};
    return rules;
}

Ruleset load_ruleset(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read ruleset " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ruleset(ss.str(), path.string());
}

const Ruleset& default_ruleset()
{
    static const Ruleset rules = parse_ruleset(default_ruleset_json(), "default_ruleset.json");
    return rules;
}

const AliasTable& default_aliases()
{
    return default_ruleset().aliases;
}

} // namespace pqscan
