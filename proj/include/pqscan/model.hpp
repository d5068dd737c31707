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

// Domain types shared by every stage of the pipeline, plus the grammar for
// transformation strings such as "AES/CBC/PKCS5Padding".

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

enum class PrimitiveKind {
    AES,
    DES,
    TripleDES,
    RSA,
    DSA,
    EC,
    DH,
    MD5,
    SHA1,
    SHA256,
    SHA512,
    HMAC_SHA1,
    HMAC_SHA256,
    PBKDF2,
    KYBER,
    DILITHIUM,
    Other,
};

enum class ModeKind { ECB, CBC, GCM, CTR, CFB, OFB, NONE, Other };

enum class PaddingKind { PKCS1, PKCS5, PKCS7, OAEP, NoPadding, Other };

// A closed enumeration with an escape hatch: unrecognized names are kept
// verbatim in `other` instead of being rejected.
template <typename Kind>
struct Named {
    Kind kind = Kind::Other;
    std::string other;

    Named() = default;
    Named(Kind k) : kind(k) {}
    static Named make_other(std::string name)
    {
        Named n;
        n.kind = Kind::Other;
        n.other = std::move(name);
        return n;
    }

    bool is_other() const { return kind == Kind::Other; }
    bool operator==(const Named&) const = default;
};

using Primitive = Named<PrimitiveKind>;
using Mode = Named<ModeKind>;
using Padding = Named<PaddingKind>;

std::string primitive_name(const Primitive& p);
std::string mode_name(const Mode& m);
std::string padding_name(const Padding& p);

// Inverse of *_name for the serialized form; "OTHER(x)" yields an Other value.
Primitive primitive_from_name(std::string_view name);
Mode mode_from_name(std::string_view name);
Padding padding_from_name(std::string_view name);

bool is_digest(PrimitiveKind kind);
bool is_block_cipher(PrimitiveKind kind);
bool is_asymmetric(PrimitiveKind kind);

// Case-insensitive name -> primitive map. The built-in table knows only the
// enumerator spellings; the ruleset contributes the real-world aliases.
class AliasTable {
public:
    AliasTable();

    void add(std::string_view alias, PrimitiveKind kind);
    std::optional<PrimitiveKind> lookup(std::string_view name) const;
    const std::map<std::string, PrimitiveKind>& entries() const { return m_entries; }

private:
    std::map<std::string, PrimitiveKind> m_entries; // keys are lowercase
};

// Aliases of the compiled-in default ruleset.
const AliasTable& default_aliases();

struct AlgorithmSpec {
    Primitive primitive;
    std::optional<Mode> mode;
    std::optional<Padding> padding;
    std::optional<int> key_bits;
    std::string raw;

    bool operator==(const AlgorithmSpec&) const = default;
};

AlgorithmSpec parse_transformation(std::string_view raw);
AlgorithmSpec parse_transformation(std::string_view raw, const AliasTable& aliases);

// Grouping key at the granularity of a readiness table row: digests by name,
// block ciphers by name + mode, everything else by primitive.
std::string canonical_algorithm_key(const AlgorithmSpec& spec);

// True when key_bits is present but outside the usual sizes for the primitive.
bool key_bits_nonstandard(const AlgorithmSpec& spec);

enum class ApiKind {
    CipherFactory,
    DigestFactory,
    KeyPairGeneratorFactory,
    KeyGeneratorFactory,
    MacFactory,
    SignatureFactory,
    SecretKeyConstruction,
    IvConstruction,
    RandomConstruction,
    PqcLibraryReference,
};

std::string_view to_string(ApiKind kind);
std::optional<ApiKind> api_kind_from_string(std::string_view s);
const std::vector<ApiKind>& all_api_kinds();

// Kinds whose call sites name an algorithm; the rest only carry misuse flags.
bool carries_algorithm(ApiKind kind);

struct SourceLocation {
    std::string app_id;
    std::string file_path; // relative to the app root, '/' separated
    int line = 1;
    int column = 1;

    auto operator<=>(const SourceLocation&) const = default;
    bool operator==(const SourceLocation&) const = default;
};

std::string to_string(const SourceLocation& loc);

// Normalizes separators and rejects absolute paths and ".." segments.
std::optional<std::string> normalize_relative_path(std::string_view path);

enum class Label { QuantumSafe, QuantumVulnerable, ConditionallySafe, Unknown };

std::string_view to_string(Label label);
std::optional<Label> label_from_string(std::string_view s);

struct SafetyLabel {
    Label label = Label::Unknown;
    std::optional<std::string> condition; // present iff ConditionallySafe
    std::string rationale_rule_id;

    bool operator==(const SafetyLabel&) const = default;
};

// Rule id recorded for findings that never reached the classifier.
inline constexpr std::string_view kUnresolvedRuleId = "unresolved";

enum class MisuseFlag { EcbMode, StaticIv, SeededInsecureRandom, ShortAsymmetricKey, UnusedPqcImport };

std::string_view to_string(MisuseFlag flag);
std::optional<MisuseFlag> misuse_flag_from_string(std::string_view s);
const std::vector<MisuseFlag>& all_misuse_flags();

enum class ResolutionStatus { ResolvedLiteral, ResolvedViaDataflow, Unresolved };
enum class ResolutionRule { DirectLiteral, LocalAssignment, StaticFinalConstant, Concatenation };

std::string_view to_string(ResolutionStatus s);
std::optional<ResolutionStatus> resolution_status_from_string(std::string_view s);
std::string_view to_string(ResolutionRule r);
std::optional<ResolutionRule> resolution_rule_from_string(std::string_view s);

struct ResolutionStep {
    SourceLocation location;
    ResolutionRule rule = ResolutionRule::DirectLiteral;

    bool operator==(const ResolutionStep&) const = default;
};

// Byte range of source text inside one file of an app.
struct TextSpan {
    std::string file_path;
    std::size_t offset = 0;
    std::size_t length = 0;
    int line = 1;
    int column = 1;

    bool operator==(const TextSpan&) const = default;
    auto operator<=>(const TextSpan&) const = default;
};

struct Finding {
    SourceLocation location;
    ApiKind api_kind = ApiKind::CipherFactory;
    std::string pattern_id;
    ResolutionStatus resolution = ResolutionStatus::Unresolved;
    std::optional<AlgorithmSpec> spec; // absent iff Unresolved
    SafetyLabel safety;
    std::set<MisuseFlag> misuse_flags;
    std::string evidence; // at most kMaxEvidence bytes
    std::vector<ResolutionStep> trace;
    // Where the resolved value was defined: the literal (or concatenation)
    // that a rewrite has to touch.
    std::optional<TextSpan> origin;

    bool operator==(const Finding&) const = default;
};

inline constexpr std::size_t kMaxEvidence = 200;

// Trims and truncates to kMaxEvidence bytes without splitting a UTF-8 sequence.
std::string make_evidence(std::string_view text);

// Total order used everywhere findings are listed.
bool finding_less(const Finding& a, const Finding& b);

} // namespace pqscan
