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

// Backward, intra-procedural resolution of call-site arguments to constants,
// backed by an app-wide table of compile-time constants.

#include <pqscan/diagnostics.hpp>
#include <pqscan/lexer.hpp>
#include <pqscan/model.hpp>
#include <pqscan/ruleset.hpp>
#include <pqscan/scanner.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

// Longest chain of hops the resolver follows before giving up.
inline constexpr int kMaxResolutionDepth = 16;

struct Resolution {
    ResolutionStatus status = ResolutionStatus::Unresolved;
    std::optional<std::string> value;
    // One step per hop away from the argument, in the order they were taken.
    // A literal ends the chain without a step; a concatenation ends it with
    // one.
    std::vector<ResolutionStep> steps;
    std::optional<TextSpan> origin;

    bool resolved() const { return status != ResolutionStatus::Unresolved; }
};

// Value of a constant or expression as far as the resolver can tell.
struct ConstValue {
    enum class Kind { String, Integer, ByteArray };
    Kind kind = Kind::String;
    std::string text;                      // String: the value; Integer: decimal text
    std::optional<std::size_t> array_size; // ByteArray only
    std::vector<ResolutionStep> steps;
    std::optional<TextSpan> origin;
};

class ConstantTable {
public:
    struct Entry {
        SourceLocation location; // of the declared name
        std::string class_name;  // simple name of the declaring type
        std::string name;
        std::string smali_key;   // "Lpkg/Cls;->NAME" for smali fields
        std::optional<ConstValue> value; // absent when the initializer does not resolve
    };

    const std::vector<Entry>& entries() const { return m_entries; }
    bool empty() const { return m_entries.empty(); }
    std::size_t size() const { return m_entries.size(); }

    // Entry for an unqualified name used in `file_path`: a same-file
    // declaration wins; otherwise the app-wide name, unless it is ambiguous.
    const Entry* lookup(std::string_view file_path, std::string_view name) const;
    // Entry for "Cls.NAME".
    const Entry* lookup_qualified(std::string_view class_name, std::string_view name) const;
    const Entry* lookup_smali(std::string_view key) const;
    // True when the bare name is declared with two or more distinct values
    // (an unresolvable initializer counts as distinct).
    bool ambiguous(std::string_view name) const;

    // Keys: "<app>/<file>#NAME" for scoped entries, "NAME" for bare ones.
    std::string scoped_key(const Entry& e) const;

private:
    friend class ConstantTableBuilder;

    std::vector<Entry> m_entries;
    std::multimap<std::string, std::size_t, std::less<>> m_by_name;
    std::map<std::string, std::size_t, std::less<>> m_by_smali_key;
    std::map<std::string, bool, std::less<>> m_ambiguous;
};

// Collects Java `static final` fields (and interface fields), Kotlin
// `const val`, and smali `.field static final` initializers.
ConstantTable build_constant_table(const std::vector<const LexedUnit*>& units, Diagnostics* diag = nullptr);
ConstantTable build_constant_table(const std::vector<SourceUnit>& units, Diagnostics* diag = nullptr);

// Resolves argument `arg_index` (negative counts from the end) of a call
// site to a string constant.
Resolution resolve_argument(const CallSite& site, const LexedUnit& unit, const ConstantTable& table, int arg_index,
    Diagnostics* diag = nullptr);
// Same, taking the index from the trigger that produced the site. Sites
// whose trigger names no algorithm argument come back Unresolved.
Resolution resolve_argument(const CallSite& site, const LexedUnit& unit, const ConstantTable& table,
    const Ruleset& rules, Diagnostics* diag = nullptr);

// Key size for key generators (the first later initialize/init on the same
// receiver) and SecretKeySpec (8 x key array length).
std::optional<int> resolve_key_bits(const CallSite& site, const LexedUnit& unit, const ConstantTable& table,
    Diagnostics* diag = nullptr);

struct ByteSource {
    enum class Kind { Constant, Dynamic, Unknown };
    Kind kind = Kind::Unknown;
    std::optional<std::size_t> size;
};

// Classifies a byte-array argument: a literal or never-touched fresh array
// is Constant; an array written to between its definition and the site is
// Dynamic.
ByteSource analyze_byte_argument(const CallSite& site, int arg_index, const LexedUnit& unit,
    const ConstantTable& table);

// True when argument `arg_index` is a constant number or constant bytes.
bool argument_is_constant_seed(const CallSite& site, int arg_index, const LexedUnit& unit,
    const ConstantTable& table);

// Bits for a named elliptic curve ("secp256r1" -> 256).
std::optional<int> curve_bits(std::string_view curve_name);

} // namespace pqscan
