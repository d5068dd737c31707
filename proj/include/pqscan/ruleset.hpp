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

#include <pqscan/model.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

// How a trigger appears in text: a Java/Kotlin call or constructor, or a smali
// invoke instruction.
enum class TriggerSyntax { Source, Smali };

// Constructors are written with member_name "<init>".
inline constexpr std::string_view kConstructorMember = "<init>";

struct Trigger {
    std::string pattern_id;
    ApiKind api_kind = ApiKind::CipherFactory;
    std::string receiver_name;
    std::string member_name;
    // Index of the algorithm argument; negative values count from the end.
    std::optional<int> arg_index_of_algorithm;
    TriggerSyntax syntax = TriggerSyntax::Source;
    // Sites with fewer arguments are not reported (e.g. unseeded RNGs).
    int min_args = 0;

    bool is_constructor() const { return member_name == kConstructorMember; }
};

struct ClassificationRule {
    std::string rule_id;
    // Canonical primitive name, an OTHER name, or "*" for any primitive.
    std::string primitive;
    std::optional<std::string> mode;
    std::optional<int> min_key_bits;
    std::optional<int> max_key_bits;
    SafetyLabel label;
    int priority = 0;
    std::string rationale;

    // `aliases` resolves the rule's primitive name to a kind.
    bool matches(const AlgorithmSpec& spec, std::optional<int> key_bits, const AliasTable& aliases) const;
};

struct Ruleset {
    std::string version;
    std::vector<Trigger> triggers;
    AliasTable aliases;
    std::vector<ClassificationRule> classification_rules;
    std::vector<std::string> pqc_markers;
    std::vector<std::string> placeholder_markers;

    const Trigger* find_trigger(std::string_view pattern_id) const;
    const ClassificationRule* find_rule(std::string_view rule_id) const;
};

// Parses and validates ruleset JSON. `source_name` only labels diagnostics.
// Throws Error{RulesetParseError | DuplicatePatternId | AmbiguousRuleMatch}.
Ruleset parse_ruleset(std::string_view json_text, std::string_view source_name = "<ruleset>");

Ruleset load_ruleset(const std::filesystem::path& path);

// The compiled-in copy of data/default_ruleset.json.
const Ruleset& default_ruleset();
std::string_view default_ruleset_json();

} // namespace pqscan
