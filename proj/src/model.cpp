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

#include <pqscan/model.hpp>

#include <pqscan/diagnostics.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <tuple>
#include <utility>

namespace pqscan {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

constexpr std::array<std::pair<PrimitiveKind, std::string_view>, 16> kPrimitiveNames {{
    {PrimitiveKind::AES, "AES"},
    {PrimitiveKind::DES, "DES"},
    {PrimitiveKind::TripleDES, "TripleDES"},
    {PrimitiveKind::RSA, "RSA"},
    {PrimitiveKind::DSA, "DSA"},
    {PrimitiveKind::EC, "EC"},
    {PrimitiveKind::DH, "DH"},
    {PrimitiveKind::MD5, "MD5"},
    {PrimitiveKind::SHA1, "SHA1"},
    {PrimitiveKind::SHA256, "SHA256"},
    {PrimitiveKind::SHA512, "SHA512"},
    {PrimitiveKind::HMAC_SHA1, "HMAC_SHA1"},
    {PrimitiveKind::HMAC_SHA256, "HMAC_SHA256"},
    {PrimitiveKind::PBKDF2, "PBKDF2"},
    {PrimitiveKind::KYBER, "KYBER"},
    {PrimitiveKind::DILITHIUM, "DILITHIUM"},
}};

constexpr std::array<std::pair<ModeKind, std::string_view>, 7> kModeNames {{
    {ModeKind::ECB, "ECB"},
    {ModeKind::CBC, "CBC"},
    {ModeKind::GCM, "GCM"},
    {ModeKind::CTR, "CTR"},
    {ModeKind::CFB, "CFB"},
    {ModeKind::OFB, "OFB"},
    {ModeKind::NONE, "NONE"},
}};

constexpr std::array<std::pair<PaddingKind, std::string_view>, 5> kPaddingNames {{
    {PaddingKind::PKCS1, "PKCS1"},
    {PaddingKind::PKCS5, "PKCS5"},
    {PaddingKind::PKCS7, "PKCS7"},
    {PaddingKind::OAEP, "OAEP"},
    {PaddingKind::NoPadding, "NOPADDING"},
}};

// "OTHER(name)" -> name
std::optional<std::string> unwrap_other(std::string_view s)
{
    if (s.size() >= 7 && s.substr(0, 6) == "OTHER(" && s.back() == ')')
        return std::string(s.substr(6, s.size() - 7));
    return std::nullopt;
}

template <typename Kind, std::size_t N>
std::string enum_name(const Named<Kind>& n, const std::array<std::pair<Kind, std::string_view>, N>& table)
{
    if (n.is_other())
        return "OTHER(" + n.other + ")";
    for (const auto& [k, name] : table)
        if (k == n.kind)
            return std::string(name);
    return "OTHER(" + n.other + ")";
}

template <typename Kind, std::size_t N>
Named<Kind> enum_from_name(std::string_view s, const std::array<std::pair<Kind, std::string_view>, N>& table)
{
    if (auto inner = unwrap_other(s))
        return Named<Kind>::make_other(*inner);
    for (const auto& [k, name] : table)
        if (name == s)
            return Named<Kind>(k);
    return Named<Kind>::make_other(std::string(s));
}

Mode parse_mode(std::string_view seg)
{
    const std::string l = lower(seg);
    for (const auto& [k, name] : kModeNames)
        if (lower(name) == l)
            return Mode(k);
    return Mode::make_other(std::string(seg));
}

Padding parse_padding(std::string_view seg)
{
    std::string l = lower(seg);
    if (l.starts_with("oaep"))
        return Padding(PaddingKind::OAEP);
    if (l == "nopadding")
        return Padding(PaddingKind::NoPadding);
    if (l.ends_with("padding"))
        l.resize(l.size() - 7);
    if (l == "pkcs1")
        return Padding(PaddingKind::PKCS1);
    if (l == "pkcs5")
        return Padding(PaddingKind::PKCS5);
    if (l == "pkcs7")
        return Padding(PaddingKind::PKCS7);
    return Padding::make_other(std::string(seg));
}

Primitive parse_primitive(std::string_view seg, const AliasTable& aliases)
{
    if (auto k = aliases.lookup(seg))
        return Primitive(*k);
    // Signature names such as "SHA256withRSA" are keyed by the public-key half.
    const std::string l = lower(seg);
    if (auto pos = l.rfind("with"); pos != std::string::npos && pos > 0 && pos + 4 < l.size()) {
        if (auto k = aliases.lookup(seg.substr(pos + 4)))
            return Primitive(*k);
    }
    return Primitive::make_other(std::string(seg));
}

} // namespace

std::string primitive_name(const Primitive& p) { return enum_name(p, kPrimitiveNames); }
std::string mode_name(const Mode& m) { return enum_name(m, kModeNames); }
std::string padding_name(const Padding& p) { return enum_name(p, kPaddingNames); }

Primitive primitive_from_name(std::string_view name) { return enum_from_name(name, kPrimitiveNames); }
Mode mode_from_name(std::string_view name) { return enum_from_name(name, kModeNames); }
Padding padding_from_name(std::string_view name) { return enum_from_name(name, kPaddingNames); }

bool is_digest(PrimitiveKind kind)
{
    return kind == PrimitiveKind::MD5 || kind == PrimitiveKind::SHA1 || kind == PrimitiveKind::SHA256
        || kind == PrimitiveKind::SHA512;
}

bool is_block_cipher(PrimitiveKind kind)
{
    return kind == PrimitiveKind::AES || kind == PrimitiveKind::DES || kind == PrimitiveKind::TripleDES;
}

bool is_asymmetric(PrimitiveKind kind)
{
    return kind == PrimitiveKind::RSA || kind == PrimitiveKind::DSA || kind == PrimitiveKind::EC
        || kind == PrimitiveKind::DH || kind == PrimitiveKind::KYBER || kind == PrimitiveKind::DILITHIUM;
}

AliasTable::AliasTable()
{
    for (const auto& [k, name] : kPrimitiveNames)
        add(name, k);
}

void AliasTable::add(std::string_view alias, PrimitiveKind kind)
{
    m_entries[lower(trim(alias))] = kind;
}

std::optional<PrimitiveKind> AliasTable::lookup(std::string_view name) const
{
    auto it = m_entries.find(lower(trim(name)));
    if (it == m_entries.end())
        return std::nullopt;
    return it->second;
}

AlgorithmSpec parse_transformation(std::string_view raw)
{
    return parse_transformation(raw, default_aliases());
}

AlgorithmSpec parse_transformation(std::string_view raw, const AliasTable& aliases)
{
    const std::string_view text = trim(raw);
    if (text.empty())
        throw Error(ErrorCode::EmptyTransformation, "transformation string is empty");

    std::vector<std::string_view> segments;
    std::size_t start = 0;
    while (true) {
        auto slash = text.find('/', start);
        segments.push_back(trim(text.substr(start, slash == std::string_view::npos ? slash : slash - start)));
        if (slash == std::string_view::npos)
            break;
        start = slash + 1;
    }
    if (segments.size() > 3)
        throw Error(ErrorCode::TooManySegments,
            "'" + std::string(text) + "' has " + std::to_string(segments.size()) + " segments (at most 3)");

    AlgorithmSpec spec;
    spec.raw = std::string(raw);
    spec.primitive = parse_primitive(segments[0], aliases);
    if (is_digest(spec.primitive.kind))
        return spec;
    if (segments.size() > 1 && !segments[1].empty())
        spec.mode = parse_mode(segments[1]);
    if (segments.size() > 2 && !segments[2].empty())
        spec.padding = parse_padding(segments[2]);
    return spec;
}

std::string canonical_algorithm_key(const AlgorithmSpec& spec)
{
    const auto& p = spec.primitive;
    std::string base;
    switch (p.kind) {
    case PrimitiveKind::MD5: return "MD5";
    case PrimitiveKind::SHA1: return "SHA-1";
    case PrimitiveKind::SHA256: return "SHA-256";
    case PrimitiveKind::SHA512: return "SHA-512";
    case PrimitiveKind::HMAC_SHA1: return "HmacSHA1";
    case PrimitiveKind::HMAC_SHA256: return "HmacSHA256";
    case PrimitiveKind::PBKDF2: return "PBKDF2";
    case PrimitiveKind::RSA: return "RSA";
    case PrimitiveKind::DSA: return "DSA";
    case PrimitiveKind::EC: return "EC";
    case PrimitiveKind::DH: return "DH";
    case PrimitiveKind::KYBER: return "Kyber";
    case PrimitiveKind::DILITHIUM: return "Dilithium";
    case PrimitiveKind::Other: return p.other;
    case PrimitiveKind::AES: base = "AES"; break;
    case PrimitiveKind::DES: base = "DES"; break;
    case PrimitiveKind::TripleDES: base = "3DES"; break;
    }
    if (!spec.mode)
        return base;
    return base + "/" + (spec.mode->is_other() ? spec.mode->other : mode_name(*spec.mode));
}

bool key_bits_nonstandard(const AlgorithmSpec& spec)
{
    if (!spec.key_bits)
        return false;
    static const std::map<PrimitiveKind, std::set<int>> allowed {
        {PrimitiveKind::AES, {128, 192, 256}},
        {PrimitiveKind::DES, {56, 64}},
        {PrimitiveKind::TripleDES, {112, 168, 192}},
        {PrimitiveKind::RSA, {512, 768, 1024, 1536, 2048, 3072, 4096, 7680, 8192, 15360}},
        {PrimitiveKind::DSA, {512, 768, 1024, 2048, 3072}},
        {PrimitiveKind::DH, {512, 768, 1024, 1536, 2048, 3072, 4096, 6144, 8192}},
        {PrimitiveKind::EC, {160, 192, 224, 239, 256, 283, 320, 384, 409, 512, 521, 571}},
    };
    auto it = allowed.find(spec.primitive.kind);
    if (it == allowed.end())
        return false;
    return !it->second.contains(*spec.key_bits);
}

std::string_view to_string(ApiKind kind)
{
    switch (kind) {
    case ApiKind::CipherFactory: return "CipherFactory";
    case ApiKind::DigestFactory: return "DigestFactory";
    case ApiKind::KeyPairGeneratorFactory: return "KeyPairGeneratorFactory";
    case ApiKind::KeyGeneratorFactory: return "KeyGeneratorFactory";
    case ApiKind::MacFactory: return "MacFactory";
    case ApiKind::SignatureFactory: return "SignatureFactory";
    case ApiKind::SecretKeyConstruction: return "SecretKeyConstruction";
    case ApiKind::IvConstruction: return "IvConstruction";
    case ApiKind::RandomConstruction: return "RandomConstruction";
    case ApiKind::PqcLibraryReference: return "PqcLibraryReference";
    }
    return "?";
}

const std::vector<ApiKind>& all_api_kinds()
{
    static const std::vector<ApiKind> kinds {
        ApiKind::CipherFactory,
        ApiKind::DigestFactory,
        ApiKind::KeyPairGeneratorFactory,
        ApiKind::KeyGeneratorFactory,
        ApiKind::MacFactory,
        ApiKind::SignatureFactory,
        ApiKind::SecretKeyConstruction,
        ApiKind::IvConstruction,
        ApiKind::RandomConstruction,
        ApiKind::PqcLibraryReference,
    };
    return kinds;
}

std::optional<ApiKind> api_kind_from_string(std::string_view s)
{
    for (auto k : all_api_kinds())
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

bool carries_algorithm(ApiKind kind)
{
    return kind != ApiKind::IvConstruction && kind != ApiKind::RandomConstruction;
}

std::string to_string(const SourceLocation& loc)
{
    return loc.app_id + "/" + loc.file_path + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::optional<std::string> normalize_relative_path(std::string_view path)
{
    std::string p(path);
    std::replace(p.begin(), p.end(), '\\', '/');
    if (p.empty() || p.front() == '/')
        return std::nullopt;
    if (p.size() >= 2 && p[1] == ':')
        return std::nullopt;
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= p.size()) {
        auto slash = p.find('/', start);
        std::string seg = p.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
        if (seg == "..")
            return std::nullopt;
        if (!seg.empty() && seg != ".")
            parts.push_back(seg);
        if (slash == std::string::npos)
            break;
        start = slash + 1;
    }
    if (parts.empty())
        return std::nullopt;
    std::string out;
    for (const auto& s : parts) {
        if (!out.empty())
            out += '/';
        out += s;
    }
    return out;
}

std::string_view to_string(Label label)
{
    switch (label) {
    case Label::QuantumSafe: return "QuantumSafe";
    case Label::QuantumVulnerable: return "QuantumVulnerable";
    case Label::ConditionallySafe: return "ConditionallySafe";
    case Label::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<Label> label_from_string(std::string_view s)
{
    for (auto l : {Label::QuantumSafe, Label::QuantumVulnerable, Label::ConditionallySafe, Label::Unknown})
        if (to_string(l) == s)
            return l;
    return std::nullopt;
}

std::string_view to_string(MisuseFlag flag)
{
    switch (flag) {
    case MisuseFlag::EcbMode: return "EcbMode";
    case MisuseFlag::StaticIv: return "StaticIv";
    case MisuseFlag::SeededInsecureRandom: return "SeededInsecureRandom";
    case MisuseFlag::ShortAsymmetricKey: return "ShortAsymmetricKey";
    case MisuseFlag::UnusedPqcImport: return "UnusedPqcImport";
    }
    return "?";
}

const std::vector<MisuseFlag>& all_misuse_flags()
{
    static const std::vector<MisuseFlag> flags {
        MisuseFlag::EcbMode,
        MisuseFlag::StaticIv,
        MisuseFlag::SeededInsecureRandom,
        MisuseFlag::ShortAsymmetricKey,
        MisuseFlag::UnusedPqcImport,
    };
    return flags;
}

std::optional<MisuseFlag> misuse_flag_from_string(std::string_view s)
{
    for (auto f : all_misuse_flags())
        if (to_string(f) == s)
            return f;
    return std::nullopt;
}

std::string_view to_string(ResolutionStatus s)
{
    switch (s) {
    case ResolutionStatus::ResolvedLiteral: return "ResolvedLiteral";
    case ResolutionStatus::ResolvedViaDataflow: return "ResolvedViaDataflow";
    case ResolutionStatus::Unresolved: return "Unresolved";
    }
    return "Unresolved";
}

std::optional<ResolutionStatus> resolution_status_from_string(std::string_view s)
{
    for (auto v : {ResolutionStatus::ResolvedLiteral, ResolutionStatus::ResolvedViaDataflow, ResolutionStatus::Unresolved})
        if (to_string(v) == s)
            return v;
    return std::nullopt;
}

std::string_view to_string(ResolutionRule r)
{
    switch (r) {
    case ResolutionRule::DirectLiteral: return "DirectLiteral";
    case ResolutionRule::LocalAssignment: return "LocalAssignment";
    case ResolutionRule::StaticFinalConstant: return "StaticFinalConstant";
    case ResolutionRule::Concatenation: return "Concatenation";
    }
    return "?";
}

std::optional<ResolutionRule> resolution_rule_from_string(std::string_view s)
{
    for (auto v : {ResolutionRule::DirectLiteral, ResolutionRule::LocalAssignment, ResolutionRule::StaticFinalConstant,
             ResolutionRule::Concatenation})
        if (to_string(v) == s)
            return v;
    return std::nullopt;
}

std::string make_evidence(std::string_view text)
{
    std::string_view t = trim(text);
    if (t.size() <= kMaxEvidence)
        return std::string(t);
    std::size_t cut = kMaxEvidence;
    // back off continuation bytes so the cut lands on a code point boundary
    while (cut > 0 && (static_cast<unsigned char>(t[cut]) & 0xC0) == 0x80)
        --cut;
    return std::string(t.substr(0, cut));
}

bool finding_less(const Finding& a, const Finding& b)
{
    return std::tie(a.location, a.api_kind, a.pattern_id) < std::tie(b.location, b.api_kind, b.pattern_id);
}

} // namespace pqscan
