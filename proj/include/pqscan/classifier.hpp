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

// Quantum-safety labels, classical misuse flags, and detection of references
// to post-quantum libraries.

#include <pqscan/dataflow.hpp>
#include <pqscan/lexer.hpp>
#include <pqscan/model.hpp>
#include <pqscan/ruleset.hpp>
#include <pqscan/scanner.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pqscan {

// Label of the highest-priority matching rule. key_bits overrides
// spec.key_bits when present. Throws Error{AmbiguousRuleMatch} when two rules
// tie at the winning priority.
SafetyLabel classify(const AlgorithmSpec& spec, std::optional<int> key_bits, const Ruleset& rules);

// Label for findings whose algorithm never resolved.
SafetyLabel unresolved_label(const Ruleset& rules);

// Classical misuse at one call site. `spec` is absent for unresolved or
// misuse-only sites.
std::set<MisuseFlag> flag_misuse(const CallSite& site, const std::optional<AlgorithmSpec>& spec,
    std::optional<int> key_bits, const LexedUnit& unit, const ConstantTable& table);

bool is_short_asymmetric_key(const Primitive& primitive, int key_bits);

struct PqcReference {
    enum class Source { Import, QualifiedName, Smali };

    SourceLocation location;
    std::string marker;         // the ruleset fragment that matched
    std::string qualified_name; // dotted name as written (smali: converted)
    bool used = true;
    Source source = Source::Import;
    ByteRange range;            // the statement or reference text

    bool operator==(const PqcReference&) const = default;
};

// Imports and fully-qualified names matching a PQC marker. An import is
// unused when its simple name (or alias) never appears outside import and
// package statements. Files that themselves belong to a PQC package are
// library code and are skipped.
std::vector<PqcReference> detect_pqc_references(const LexedUnit& unit, const Ruleset& rules);
std::vector<PqcReference> detect_pqc_references(const SourceUnit& unit, const Ruleset& rules);

// KYBER for kyber/ML-KEM names, DILITHIUM for dilithium/ML-DSA names,
// otherwise OTHER("PQC").
AlgorithmSpec pqc_spec_for(std::string_view qualified_name);

} // namespace pqscan
