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

#include <pqscan/dataflow.hpp>

#include "smali_support.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <memory>

namespace pqscan {

namespace {

bool same_value(const ConstValue& a, const ConstValue& b)
{
    return a.kind == b.kind && a.text == b.text && a.array_size == b.array_size;
}

// Picks the entry a name refers to among candidates that all share it: the
// first one, provided every candidate resolved to the same value.
template <typename ValueOf>
std::optional<std::size_t> pick_unambiguous(const std::vector<std::size_t>& candidates, ValueOf&& value_of)
{
    if (candidates.empty())
        return std::nullopt;
    if (candidates.size() == 1)
        return candidates.front();
    const ConstValue* first = value_of(candidates.front());
    if (!first)
        return std::nullopt;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
        const ConstValue* v = value_of(candidates[k]);
        if (!v || !same_value(*first, *v))
            return std::nullopt;
    }
    return candidates.front();
}

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void append_utf8(std::string& out, unsigned cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes a quoted Java/Kotlin/smali string literal. Kotlin templates have no
// static value.
std::optional<std::string> literal_value(std::string_view quoted, Language lang)
{
    if (quoted.starts_with("\"\"\"")) {
        if (quoted.size() < 6 || !quoted.ends_with("\"\"\""))
            return std::nullopt;
        std::string_view body = quoted.substr(3, quoted.size() - 6);
        if (lang == Language::Kotlin && body.find('$') != std::string_view::npos)
            return std::nullopt;
        if (lang == Language::Java) {
            if (auto nl = body.find('\n'); nl != std::string_view::npos)
                body.remove_prefix(nl + 1);
        }
        return std::string(body);
    }
    if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"')
        return std::nullopt;
    std::string_view body = quoted.substr(1, quoted.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '$' && lang == Language::Kotlin && i + 1 < body.size()
            && (body[i + 1] == '{' || is_ident_char(body[i + 1])))
            return std::nullopt;
        if (c != '\\' || i + 1 >= body.size()) {
            out += c;
            continue;
        }
        const char e = body[++i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '0': out += '\0'; break;
        case 'u': {
            while (i + 1 < body.size() && body[i + 1] == 'u')
                ++i;
            unsigned cp = 0;
            if (i + 4 >= body.size())
                return std::nullopt;
            auto hex = body.substr(i + 1, 4);
            auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
            if (ec != std::errc() || p != hex.data() + hex.size())
                return std::nullopt;
            append_utf8(out, cp);
            i += 4;
            break;
        }
        default: out += e; break;
        }
    }
    return out;
}

TextSpan span_of(const LexedUnit& u, std::size_t begin, std::size_t end)
{
    auto [line, col] = u.lines().position(begin);
    return {u.unit().file_path, begin, end - begin, line, col};
}

SourceLocation location_of(const LexedUnit& u, std::size_t offset)
{
    auto [line, col] = u.lines().position(offset);
    return {u.unit().app_id, u.unit().file_path, line, col};
}

bool is_operator_token(const Token& t)
{
    static constexpr std::string_view kOps[] = {"+", "-", "*", "/", "%", "=", ".", "(", "[", "{", ",", "?:", "?.",
        "&&", "||", "->", "!", "<", ">", "==", "!=", "?", ":", "&", "|", "^"};
    if (t.kind != TokenKind::Punct)
        return false;
    return std::find(std::begin(kOps), std::end(kOps), t.text) != std::end(kOps);
}

constexpr std::string_view kNonTypeWords[] = {"return", "new", "case", "throw", "else", "in", "is", "as", "package",
    "import", "yield", "assert", "do", "try", "if", "when", "while", "for"};

bool looks_like_type(const Token& t)
{
    if (t.is(">") || t.is("]") || t.is("?"))
        return true;
    if (t.kind != TokenKind::Identifier)
        return false;
    return std::find(std::begin(kNonTypeWords), std::end(kNonTypeWords), t.text) == std::end(kNonTypeWords);
}

// Source of constant entries for the resolver: the finished table, or the
// builder while values are still being computed.
class ConstantSource {
public:
    virtual ~ConstantSource() = default;
    virtual const ConstantTable::Entry* bare(std::string_view file, std::string_view name, int depth) = 0;
    virtual const ConstantTable::Entry* qualified(std::string_view cls, std::string_view name, int depth) = 0;
    virtual const ConstantTable::Entry* smali(std::string_view key, int depth) = 0;
};

class FinishedSource final : public ConstantSource {
public:
    explicit FinishedSource(const ConstantTable& t) : m_table(t) {}
    const ConstantTable::Entry* bare(std::string_view file, std::string_view name, int) override
    {
        return m_table.lookup(file, name);
    }
    const ConstantTable::Entry* qualified(std::string_view cls, std::string_view name, int) override
    {
        return m_table.lookup_qualified(cls, name);
    }
    const ConstantTable::Entry* smali(std::string_view key, int) override { return m_table.lookup_smali(key); }

private:
    const ConstantTable& m_table;
};

struct LocalInfo {
    bool declared = false;
    bool compound = false;
    struct Assignment {
        std::size_t name_tok;
        std::size_t rhs_begin;
        std::size_t rhs_end;
    };
    std::vector<Assignment> assignments;
};

class Resolver {
public:
    Resolver(const LexedUnit& u, ConstantSource& consts, Diagnostics* diag)
        : m_u(u), m_toks(u.tokens()), m_consts(consts), m_diag(diag)
    {
    }

    bool exceeded() const { return m_exceeded; }

    // Scope used for local lookups; unset outside method bodies.
    void set_scope(std::optional<ByteRange> body, std::size_t header_begin)
    {
        m_scope = body;
        m_header_begin = header_begin;
    }

    // End (exclusive) of the expression starting at token `b`.
    std::size_t expression_end(std::size_t b, std::size_t limit) const
    {
        int depth = 0;
        const bool kotlin = m_u.unit().language == Language::Kotlin;
        std::size_t j = b;
        for (; j < limit && j < m_toks.size(); ++j) {
            const auto& t = m_toks[j];
            if (t.is("(") || t.is("[") || t.is("{")) {
                ++depth;
                continue;
            }
            if (t.is(")") || t.is("]") || t.is("}")) {
                if (--depth < 0)
                    break;
                continue;
            }
            if (depth == 0 && (t.is(";") || t.is(",")))
                break;
            if (kotlin && depth == 0 && j > b && t.line > m_toks[j - 1].line && !is_operator_token(m_toks[j - 1])
                && !(t.is(".") || t.is("?.") || t.is("+") || t.is("?:")))
                break;
        }
        return j;
    }

    std::optional<ConstValue> range(std::size_t b, std::size_t e, int depth)
    {
        if (depth > kMaxResolutionDepth) {
            m_exceeded = true;
            return std::nullopt;
        }
        while (b < e && m_toks[b].is("(") && m_u.matching_token(b) == e - 1) {
            ++b;
            --e;
        }
        if (b >= e)
            return std::nullopt;

        std::vector<std::size_t> plus;
        int d = 0;
        for (std::size_t i = b; i < e; ++i) {
            const auto& t = m_toks[i];
            if (t.is("(") || t.is("[") || t.is("{"))
                ++d;
            else if (t.is(")") || t.is("]") || t.is("}"))
                --d;
            else if (d == 0) {
                if (t.is("?") || t.is("?:") || t.is_ident("if") || t.is_ident("when"))
                    return std::nullopt;
                if (t.is("+") && i > b && !is_operator_token(m_toks[i - 1]))
                    plus.push_back(i);
            }
        }
        if (!plus.empty())
            return concatenation(b, e, plus, depth);
        return operand(b, e, depth);
    }

    // Resolution of a smali register as seen just before `line_idx`.
    std::optional<ConstValue> smali_register(const std::vector<smali::Line>& lines, std::size_t line_idx,
        const std::string& reg, int depth, std::size_t* def_line = nullptr)
    {
        if (depth > kMaxResolutionDepth) {
            m_exceeded = true;
            return std::nullopt;
        }
        for (std::size_t k = line_idx; k-- > 0;) {
            const auto& line = lines[k];
            if (smali::is_label(line) || line.text.starts_with(".method"))
                return std::nullopt;
            if (line.text.front() == '.')
                continue;
            auto ins = smali::parse_instruction(line);
            if (!smali::writes_first_register(ins.opcode) || ins.operands.empty() || ins.operands[0] != reg)
                continue;
            if (def_line)
                *def_line = k;
            const auto& op = ins.opcode;
            if (op.starts_with("const-string")) {
                if (ins.operands.size() < 2)
                    return std::nullopt;
                const std::size_t qb = ins.operand_offsets[1];
                const ByteRange* lit = m_u.masked().literal_at(qb);
                if (!lit)
                    return std::nullopt;
                auto text = literal_value(m_u.original(lit->begin, lit->size()), Language::Smali);
                if (!text)
                    return std::nullopt;
                ConstValue v;
                v.text = *text;
                v.origin = span_of(m_u, lit->begin, lit->end);
                return v;
            }
            if (op.starts_with("const")) {
                if (ins.operands.size() < 2 || op.starts_with("const-class"))
                    return std::nullopt;
                auto n = smali::parse_int_literal(ins.operands[1]);
                if (!n)
                    return std::nullopt;
                ConstValue v;
                v.kind = ConstValue::Kind::Integer;
                v.text = std::to_string(*n);
                v.origin = span_of(m_u, ins.operand_offsets[1], ins.operand_offsets[1] + ins.operands[1].size());
                return v;
            }
            if (op.starts_with("move") && !op.starts_with("move-result") && !op.starts_with("move-exception")) {
                if (ins.operands.size() < 2)
                    return std::nullopt;
                auto v = smali_register(lines, k, ins.operands[1], depth + 1);
                if (!v)
                    return std::nullopt;
                v->steps.insert(v->steps.begin(), {location_of(m_u, line.offset), ResolutionRule::LocalAssignment});
                return v;
            }
            if (op.starts_with("sget")) {
                if (ins.operands.size() < 2)
                    return std::nullopt;
                std::string_view ref = ins.operands[1];
                auto colon = ref.rfind(':');
                auto key = ref.substr(0, colon);
                const ConstantTable::Entry* e = m_consts.smali(key, depth + 1);
                if (!e) {
                    auto arrow = key.find("->");
                    auto slash = key.rfind('/', arrow);
                    if (arrow != std::string_view::npos && key.size() > 2) {
                        auto cls = key.substr(slash == std::string_view::npos ? 1 : slash + 1);
                        cls = cls.substr(0, cls.find(';'));
                        e = m_consts.qualified(cls, key.substr(arrow + 2), depth + 1);
                    }
                }
                return from_entry(e, depth);
            }
            if (op == "new-array") {
                if (ins.operands.size() < 3 || ins.operands[2] != "[B")
                    return std::nullopt;
                auto n = smali_register(lines, k, ins.operands[1], depth + 1);
                if (!n || n->kind != ConstValue::Kind::Integer)
                    return std::nullopt;
                ConstValue v;
                v.kind = ConstValue::Kind::ByteArray;
                v.array_size = static_cast<std::size_t>(std::stoll(n->text));
                v.origin = span_of(m_u, line.offset, line.offset + line.text.size());
                return v;
            }
            return std::nullopt;
        }
        return std::nullopt;
    }

    LocalInfo find_local(std::string_view name) const
    {
        LocalInfo info;
        if (!m_scope)
            return info;
        const bool kotlin = m_u.unit().language == Language::Kotlin;
        const std::size_t first = m_u.token_index_at(m_header_begin);
        for (std::size_t i = first; i < m_toks.size() && m_toks[i].offset < m_scope->end; ++i) {
            const auto& t = m_toks[i];
            if (!t.is_ident(name))
                continue;
            if (i > 0 && (m_toks[i - 1].is(".") || m_toks[i - 1].is("::") || m_toks[i - 1].is("?.")))
                continue;
            if (t.offset < m_scope->begin) {
                info.declared = true; // parameter
                continue;
            }
            const Token* prev = i > 0 ? &m_toks[i - 1] : nullptr;
            const Token* next = i + 1 < m_toks.size() ? &m_toks[i + 1] : nullptr;
            if (!next)
                continue;
            if (kotlin && prev && (prev->is_ident("val") || prev->is_ident("var"))) {
                info.declared = true;
                std::size_t j = i + 1;
                while (j < m_toks.size() && m_toks[j].line == t.line && !m_toks[j].is("=") && !m_toks[j].is(";"))
                    ++j;
                if (j < m_toks.size() && m_toks[j].is("=") && m_toks[j].line == t.line)
                    info.assignments.push_back({i, j + 1, expression_end(j + 1, m_toks.size())});
                continue;
            }
            if (next->is("=")) {
                if (kotlin && prev && (prev->is("(") || prev->is(",")))
                    continue; // named argument
                if (prev && looks_like_type(*prev) && !prev->is("?"))
                    info.declared = true;
                info.assignments.push_back({i, i + 2, expression_end(i + 2, m_toks.size())});
                continue;
            }
            if (next->is("+=") || next->is("-=") || next->is("*=") || next->is("/=") || next->is("%=")
                || next->is("|=") || next->is("&=") || next->is("^=") || next->is("++") || next->is("--")
                || (prev && (prev->is("++") || prev->is("--")))) {
                info.compound = true;
                info.declared = true;
                continue;
            }
            if (prev && looks_like_type(*prev) && !prev->is("?")
                && (next->is(";") || next->is(",") || next->is(":") || next->is(")")))
                info.declared = true;
        }
        return info;
    }

private:
    std::optional<ConstValue> from_entry(const ConstantTable::Entry* e, int)
    {
        if (!e || !e->value)
            return std::nullopt;
        ConstValue v = *e->value;
        v.steps.insert(v.steps.begin(), {e->location, ResolutionRule::StaticFinalConstant});
        return v;
    }

    std::optional<ConstValue> concatenation(std::size_t b, std::size_t e, const std::vector<std::size_t>& plus, int depth)
    {
        std::string text;
        bool any_string = false;
        std::size_t start = b;
        for (std::size_t k = 0; k <= plus.size(); ++k) {
            const std::size_t end = k < plus.size() ? plus[k] : e;
            auto part = range(start, end, depth + 1);
            if (!part || part->kind == ConstValue::Kind::ByteArray)
                return std::nullopt;
            any_string = any_string || part->kind == ConstValue::Kind::String;
            text += part->text;
            start = end + 1;
        }
        if (!any_string)
            return std::nullopt;
        ConstValue v;
        v.text = std::move(text);
        v.steps.push_back({location_of(m_u, m_toks[b].offset), ResolutionRule::Concatenation});
        v.origin = span_of(m_u, m_toks[b].offset, m_toks[e - 1].end());
        return v;
    }

    std::optional<std::size_t> element_count(std::size_t open) const
    {
        const std::size_t close = m_u.matching_token(open);
        if (close == LexedUnit::npos)
            return std::nullopt;
        if (close == open + 1)
            return 0;
        std::size_t count = 1;
        int d = 0;
        for (std::size_t i = open + 1; i < close; ++i) {
            const auto& t = m_toks[i];
            if (t.is("(") || t.is("[") || t.is("{"))
                ++d;
            else if (t.is(")") || t.is("]") || t.is("}"))
                --d;
            else if (d == 0 && t.is(",") && i + 1 < close)
                ++count;
        }
        return count;
    }

    std::optional<ConstValue> byte_array(std::size_t b, std::size_t e, std::optional<std::size_t> size)
    {
        if (!size)
            return std::nullopt;
        ConstValue v;
        v.kind = ConstValue::Kind::ByteArray;
        v.array_size = size;
        v.origin = span_of(m_u, m_toks[b].offset, m_toks[e - 1].end());
        return v;
    }

    std::optional<ConstValue> operand(std::size_t b, std::size_t e, int depth)
    {
        const auto& t0 = m_toks[b];
        const std::size_t n = e - b;
        if (n == 1) {
            if (t0.kind == TokenKind::String) {
                auto text = literal_value(m_u.original(t0.offset, t0.length), m_u.unit().language);
                if (!text)
                    return std::nullopt;
                ConstValue v;
                v.text = *text;
                v.origin = span_of(m_u, t0.offset, t0.end());
                return v;
            }
            if (t0.kind == TokenKind::Number)
                return integer(t0, false);
            if (t0.kind == TokenKind::Identifier)
                return identifier(b, depth);
            return std::nullopt;
        }
        if (n == 2 && t0.is("-") && m_toks[b + 1].kind == TokenKind::Number)
            return integer(m_toks[b + 1], true);

        // byte arrays
        if (t0.is_ident("new") && n >= 4 && m_toks[b + 1].is_ident("byte") && m_toks[b + 2].is("[")) {
            const std::size_t rb = m_u.matching_token(b + 2);
            if (rb == LexedUnit::npos || rb >= e)
                return std::nullopt;
            if (rb == b + 3) {
                if (rb + 1 < e && m_toks[rb + 1].is("{") && m_u.matching_token(rb + 1) == e - 1)
                    return byte_array(b, e, element_count(rb + 1));
                return std::nullopt;
            }
            if (rb != e - 1)
                return std::nullopt;
            auto sz = range(b + 3, rb, depth + 1);
            if (!sz || sz->kind != ConstValue::Kind::Integer)
                return std::nullopt;
            return byte_array(b, e, static_cast<std::size_t>(std::stoll(sz->text)));
        }
        if (t0.is("{") && m_u.matching_token(b) == e - 1)
            return byte_array(b, e, element_count(b));
        if ((t0.is_ident("byteArrayOf") || t0.is_ident("ByteArray")) && n >= 3 && m_toks[b + 1].is("(")
            && m_u.matching_token(b + 1) == e - 1) {
            if (t0.text == "byteArrayOf")
                return byte_array(b, e, element_count(b + 1));
            auto sz = range(b + 2, e - 1, depth + 1);
            if (!sz || sz->kind != ConstValue::Kind::Integer)
                return std::nullopt;
            return byte_array(b, e, static_cast<std::size_t>(std::stoll(sz->text)));
        }
        // "lit".getBytes(...) / .toByteArray(...)
        if (n >= 4 && m_toks[e - 1].is(")")) {
            const std::size_t open = [&] {
                for (std::size_t k = e - 1; k > b; --k)
                    if (m_toks[k].is("(") && m_u.matching_token(k) == e - 1)
                        return k;
                return b;
            }();
            if (open > b + 2 && m_toks[open - 2].is(".")
                && (m_toks[open - 1].is_ident("getBytes") || m_toks[open - 1].is_ident("toByteArray")
                    || m_toks[open - 1].is_ident("encodeToByteArray"))) {
                auto s = range(b, open - 2, depth + 1);
                if (!s || s->kind != ConstValue::Kind::String)
                    return std::nullopt;
                return byte_array(b, e, s->text.size());
            }
        }

        // Qualified name: a.b.Cls.NAME, this.NAME
        if (n % 2 == 1) {
            for (std::size_t k = b; k < e; ++k) {
                const bool want_ident = (k - b) % 2 == 0;
                if (want_ident ? m_toks[k].kind != TokenKind::Identifier : !m_toks[k].is("."))
                    return std::nullopt;
            }
            const auto name = m_toks[e - 1].text;
            const auto qual = m_toks[e - 3].text;
            const ConstantTable::Entry* entry = nullptr;
            if (qual == "this" && n == 3)
                entry = m_consts.bare(m_u.unit().file_path, name, depth + 1);
            else
                entry = m_consts.qualified(qual, name, depth + 1);
            return from_entry(entry, depth);
        }
        return std::nullopt;
    }

    std::optional<ConstValue> integer(const Token& t, bool negative)
    {
        auto n = smali::parse_int_literal(t.text);
        if (!n)
            return std::nullopt;
        ConstValue v;
        v.kind = ConstValue::Kind::Integer;
        v.text = std::to_string(negative ? -*n : *n);
        v.origin = span_of(m_u, t.offset, t.end());
        return v;
    }

    std::optional<ConstValue> identifier(std::size_t tok, int depth)
    {
        const auto name = m_toks[tok].text;
        if (m_scope) {
            const LocalInfo info = find_local(name);
            if (info.declared || !info.assignments.empty()) {
                if (info.compound || info.assignments.size() != 1)
                    return std::nullopt;
                const auto& a = info.assignments.front();
                if (a.rhs_end > m_toks.size() || a.rhs_begin >= a.rhs_end)
                    return std::nullopt;
                if (m_toks[a.rhs_end - 1].end() > m_toks[tok].offset)
                    return std::nullopt; // not reaching
                auto v = range(a.rhs_begin, a.rhs_end, depth + 1);
                if (!v)
                    return std::nullopt;
                v->steps.insert(v->steps.begin(),
                    {location_of(m_u, m_toks[a.name_tok].offset), ResolutionRule::LocalAssignment});
                return v;
            }
        }
        return from_entry(m_consts.bare(m_u.unit().file_path, name, depth + 1), depth);
    }

    const LexedUnit& m_u;
    const std::vector<Token>& m_toks;
    ConstantSource& m_consts;
    Diagnostics* m_diag;
    std::optional<ByteRange> m_scope;
    std::size_t m_header_begin = 0;
    bool m_exceeded = false;
};

std::optional<ByteRange> method_scope(const LexedUnit& u, std::size_t offset)
{
    const ByteRange scope = u.enclosing_scope(offset);
    if (scope.begin == 0 && scope.end == u.content().size())
        return std::nullopt;
    return scope;
}

void prepare(Resolver& r, const LexedUnit& u, std::size_t offset)
{
    r.set_scope(method_scope(u, offset), u.scope_header_begin(offset));
}

std::optional<std::size_t> normalized_index(int arg_index, std::size_t count)
{
    const long long idx = arg_index < 0 ? static_cast<long long>(count) + arg_index : arg_index;
    if (idx < 0 || idx >= static_cast<long long>(count))
        return std::nullopt;
    return static_cast<std::size_t>(idx);
}

// Token range [b, e) of a source argument.
std::optional<std::pair<std::size_t, std::size_t>> argument_tokens(const LexedUnit& u, const CallSite& site,
    std::size_t idx)
{
    if (idx >= site.argument_ranges.size())
        return std::nullopt;
    const auto r = site.argument_ranges[idx];
    const std::size_t b = u.token_index_at(r.begin);
    const std::size_t e = u.token_index_at(r.end);
    if (b >= e)
        return std::nullopt;
    return std::make_pair(b, e);
}

struct SmaliContext {
    std::vector<smali::Line> lines;
    std::size_t site_line = 0;
};

std::optional<SmaliContext> smali_context(const LexedUnit& u, const CallSite& site)
{
    SmaliContext ctx;
    ctx.lines = smali::lines_in(u, site.enclosing_scope);
    for (std::size_t k = 0; k < ctx.lines.size(); ++k)
        if (ctx.lines[k].offset == site.call.begin) {
            ctx.site_line = k;
            return ctx;
        }
    return std::nullopt;
}

void report_depth(Diagnostics* diag, const CallSite& site)
{
    if (diag)
        diag->warn(site.location.app_id + "/" + site.location.file_path, site.location.line,
            "ResolutionDepthExceeded: gave up after " + std::to_string(kMaxResolutionDepth) + " steps");
}

std::optional<ConstValue> resolve_value(const CallSite& site, int arg_index, const LexedUnit& u,
    const ConstantTable& table, Diagnostics* diag, std::optional<std::size_t>* def_line_out = nullptr,
    std::optional<SmaliContext>* smali_out = nullptr)
{
    FinishedSource source(table);
    Resolver r(u, source, diag);
    const auto idx = normalized_index(arg_index, site.argument_exprs.size());
    if (!idx)
        return std::nullopt;
    std::optional<ConstValue> v;
    if (u.unit().language == Language::Smali) {
        auto ctx = smali_context(u, site);
        if (!ctx)
            return std::nullopt;
        std::size_t def = 0;
        v = r.smali_register(ctx->lines, ctx->site_line, site.argument_exprs[*idx], 0, &def);
        if (def_line_out && v)
            *def_line_out = def;
        if (smali_out)
            *smali_out = std::move(ctx);
    } else {
        auto toks = argument_tokens(u, site, *idx);
        if (!toks)
            return std::nullopt;
        prepare(r, u, site.call.begin);
        v = r.range(toks->first, toks->second, 0);
    }
    if (r.exceeded() || (v && static_cast<int>(v->steps.size()) > kMaxResolutionDepth)) {
        report_depth(diag, site);
        return std::nullopt;
    }
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// Constant table

const ConstantTable::Entry* ConstantTable::lookup(std::string_view file_path, std::string_view name) const
{
    std::vector<std::size_t> all;
    std::vector<std::size_t> same_file;
    auto [lo, hi] = m_by_name.equal_range(name);
    for (auto it = lo; it != hi; ++it) {
        all.push_back(it->second);
        if (m_entries[it->second].location.file_path == file_path)
            same_file.push_back(it->second);
    }
    auto value_of = [&](std::size_t i) { return m_entries[i].value ? &*m_entries[i].value : nullptr; };
    if (!same_file.empty()) {
        auto p = pick_unambiguous(same_file, value_of);
        return p ? &m_entries[*p] : nullptr;
    }
    if (ambiguous(name))
        return nullptr;
    return all.empty() ? nullptr : &m_entries[all.front()];
}

const ConstantTable::Entry* ConstantTable::lookup_qualified(std::string_view class_name, std::string_view name) const
{
    std::vector<std::size_t> matches;
    auto [lo, hi] = m_by_name.equal_range(name);
    for (auto it = lo; it != hi; ++it)
        if (m_entries[it->second].class_name == class_name)
            matches.push_back(it->second);
    auto p = pick_unambiguous(
        matches, [&](std::size_t i) { return m_entries[i].value ? &*m_entries[i].value : nullptr; });
    return p ? &m_entries[*p] : nullptr;
}

const ConstantTable::Entry* ConstantTable::lookup_smali(std::string_view key) const
{
    auto it = m_by_smali_key.find(key);
    return it == m_by_smali_key.end() ? nullptr : &m_entries[it->second];
}

bool ConstantTable::ambiguous(std::string_view name) const
{
    auto it = m_ambiguous.find(name);
    return it != m_ambiguous.end() && it->second;
}

std::string ConstantTable::scoped_key(const Entry& e) const
{
    return e.location.app_id + "/" + e.location.file_path + "#" + e.name;
}

class ConstantTableBuilder final : public ConstantSource {
public:
    ConstantTableBuilder(const std::vector<const LexedUnit*>& units, Diagnostics* diag) : m_units(units), m_diag(diag)
    {
    }

    ConstantTable build()
    {
        for (std::size_t u = 0; u < m_units.size(); ++u) {
            if (m_units[u]->unit().language == Language::Smali)
                collect_smali(u);
            else
                collect_source(u);
        }
        for (std::size_t i = 0; i < m_table.m_entries.size(); ++i) {
            m_table.m_by_name.emplace(m_table.m_entries[i].name, i);
            if (!m_table.m_entries[i].smali_key.empty())
                m_table.m_by_smali_key.emplace(m_table.m_entries[i].smali_key, i);
        }
        m_state.assign(m_table.m_entries.size(), State::Pending);
        for (std::size_t i = 0; i < m_table.m_entries.size(); ++i)
            compute(i, 0);
        for (const auto& [name, idx] : m_table.m_by_name) {
            if (m_table.m_ambiguous.contains(name))
                continue;
            std::vector<std::size_t> all;
            auto [lo, hi] = m_table.m_by_name.equal_range(name);
            for (auto it = lo; it != hi; ++it)
                all.push_back(it->second);
            const bool amb = all.size() > 1 && !pick_unambiguous(all, [&](std::size_t i) {
                return m_table.m_entries[i].value ? &*m_table.m_entries[i].value : nullptr;
            });
            m_table.m_ambiguous.emplace(name, amb);
        }
        return std::move(m_table);
    }

    const ConstantTable::Entry* bare(std::string_view file, std::string_view name, int depth) override
    {
        std::vector<std::size_t> all;
        std::vector<std::size_t> same_file;
        auto [lo, hi] = m_table.m_by_name.equal_range(name);
        for (auto it = lo; it != hi; ++it) {
            all.push_back(it->second);
            if (m_table.m_entries[it->second].location.file_path == file)
                same_file.push_back(it->second);
        }
        auto value_of = [&](std::size_t i) { return value(i, depth); };
        auto p = pick_unambiguous(same_file.empty() ? all : same_file, value_of);
        return p ? &m_table.m_entries[*p] : nullptr;
    }

    const ConstantTable::Entry* qualified(std::string_view cls, std::string_view name, int depth) override
    {
        std::vector<std::size_t> matches;
        auto [lo, hi] = m_table.m_by_name.equal_range(name);
        for (auto it = lo; it != hi; ++it)
            if (m_table.m_entries[it->second].class_name == cls)
                matches.push_back(it->second);
        auto p = pick_unambiguous(matches, [&](std::size_t i) { return value(i, depth); });
        return p ? &m_table.m_entries[*p] : nullptr;
    }

    const ConstantTable::Entry* smali(std::string_view key, int depth) override
    {
        auto it = m_table.m_by_smali_key.find(key);
        if (it == m_table.m_by_smali_key.end())
            return nullptr;
        value(it->second, depth);
        return &m_table.m_entries[it->second];
    }

private:
    enum class State { Pending, InProgress, Done };

    struct Pending {
        std::size_t unit = 0;
        std::size_t rhs_begin = 0;
        std::size_t rhs_end = 0;
    };

    const ConstValue* value(std::size_t i, int depth)
    {
        compute(i, depth);
        const auto& e = m_table.m_entries[i];
        return e.value ? &*e.value : nullptr;
    }

    void compute(std::size_t i, int depth)
    {
        if (m_state[i] == State::Done)
            return;
        auto& entry = m_table.m_entries[i];
        if (m_state[i] == State::InProgress) {
            if (m_diag)
                m_diag->warn(entry.location.app_id + "/" + entry.location.file_path, entry.location.line,
                    "constant " + entry.name + " refers to itself");
            return;
        }
        auto pend = m_pending.find(i);
        if (pend == m_pending.end()) {
            m_state[i] = State::Done;
            return;
        }
        m_state[i] = State::InProgress;
        const LexedUnit& u = *m_units[pend->second.unit];
        Resolver r(u, *this, m_diag);
        auto v = r.range(pend->second.rhs_begin, pend->second.rhs_end, depth);
        if (r.exceeded() && m_diag)
            m_diag->warn(entry.location.app_id + "/" + entry.location.file_path, entry.location.line,
                "ResolutionDepthExceeded: constant " + entry.name);
        m_table.m_entries[i].value = std::move(v);
        m_state[i] = State::Done;
    }

    void collect_source(std::size_t ui)
    {
        const LexedUnit& u = *m_units[ui];
        const auto& toks = u.tokens();
        const bool kotlin = u.unit().language == Language::Kotlin;
        FinishedSource dummy(m_table);
        Resolver helper(u, dummy, nullptr);
        for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
            const auto& t = toks[i];
            if (t.kind != TokenKind::Identifier)
                continue;
            std::size_t eq = i + 1;
            if (kotlin && toks[eq].is(":")) {
                while (eq < toks.size() && toks[eq].line == t.line && !toks[eq].is("=") && !toks[eq].is(";"))
                    ++eq;
                if (eq >= toks.size() || !toks[eq].is("="))
                    continue;
            } else if (!toks[eq].is("=")) {
                continue;
            }
            if (toks[i - 1].is(".") || toks[i - 1].is("?."))
                continue;
            if (method_scope(u, t.offset))
                continue;

            bool has_static = false;
            bool has_final = false;
            bool has_const = false;
            bool has_val = false;
            for (std::size_t k = i; k-- > 0;) {
                const auto& p = toks[k];
                if (p.is(";") || p.is("{") || p.is("}") || p.is("=") || p.is("(") || p.is(")")
                    || p.kind == TokenKind::String || p.kind == TokenKind::Number || p.kind == TokenKind::Char)
                    break;
                if (kotlin && p.line != t.line)
                    break;
                has_static = has_static || p.is_ident("static");
                has_final = has_final || p.is_ident("final");
                has_const = has_const || p.is_ident("const");
                has_val = has_val || p.is_ident("val");
            }
            const bool constant = kotlin ? (has_const && has_val)
                                         : ((has_static && has_final) || (u.inside_interface(t.offset)
                                                                             && looks_like_type(toks[i - 1])));
            if (!constant)
                continue;
            const std::size_t rhs_end = helper.expression_end(eq + 1, toks.size());
            if (rhs_end <= eq + 1) {
                if (m_diag)
                    m_diag->warn(u.unit().app_id + "/" + u.unit().file_path, t.line,
                        "skipped unparseable constant declaration of " + std::string(t.text));
                continue;
            }
            ConstantTable::Entry e;
            e.location = location_of(u, t.offset);
            e.class_name = u.enclosing_type_name(t.offset);
            e.name = std::string(t.text);
            m_pending[m_table.m_entries.size()] = {ui, eq + 1, rhs_end};
            m_table.m_entries.push_back(std::move(e));
        }
    }

    void collect_smali(std::size_t ui)
    {
        const LexedUnit& u = *m_units[ui];
        std::string class_desc;
        for (const auto& line : smali::lines_in(u, {0, u.content().size()})) {
            if (line.text.starts_with(".class")) {
                auto sp = line.text.find_last_of(" \t");
                class_desc = std::string(line.text.substr(sp == std::string_view::npos ? 0 : sp + 1));
                continue;
            }
            if (!line.text.starts_with(".field"))
                continue;
            const auto eq = line.text.find(" = ");
            if (eq == std::string_view::npos)
                continue;
            const auto decl = line.text.substr(0, eq);
            if (decl.find(" static ") == std::string_view::npos || decl.find(" final ") == std::string_view::npos)
                continue;
            const auto sp = decl.find_last_of(" \t");
            const auto name_type = decl.substr(sp + 1);
            const auto colon = name_type.find(':');
            if (colon == std::string_view::npos || class_desc.empty()) {
                if (m_diag)
                    m_diag->warn(u.unit().app_id + "/" + u.unit().file_path, line.number,
                        "skipped unparseable field declaration");
                continue;
            }
            ConstantTable::Entry e;
            e.name = std::string(name_type.substr(0, colon));
            const std::size_t name_off = line.offset + sp + 1;
            e.location = location_of(u, name_off);
            e.smali_key = class_desc + "->" + e.name;
            auto slash = class_desc.rfind('/');
            e.class_name = class_desc.substr(slash == std::string::npos ? 1 : slash + 1);
            if (!e.class_name.empty() && e.class_name.back() == ';')
                e.class_name.pop_back();

            const std::size_t value_off = line.offset + eq + 3;
            const auto type = name_type.substr(colon + 1);
            if (const ByteRange* lit = u.masked().literal_at(value_off)) {
                if (auto text = literal_value(u.original(lit->begin, lit->size()), Language::Smali)) {
                    ConstValue v;
                    v.text = *text;
                    v.origin = span_of(u, lit->begin, lit->end);
                    e.value = std::move(v);
                }
            } else if (type == "I" || type == "J" || type == "S" || type == "B") {
                auto raw = line.text.substr(eq + 3);
                if (auto n = smali::parse_int_literal(raw)) {
                    ConstValue v;
                    v.kind = ConstValue::Kind::Integer;
                    v.text = std::to_string(*n);
                    v.origin = span_of(u, value_off, value_off + raw.size());
                    e.value = std::move(v);
                }
            }
            m_table.m_entries.push_back(std::move(e));
        }
    }

    const std::vector<const LexedUnit*>& m_units;
    Diagnostics* m_diag;
    ConstantTable m_table;
    std::map<std::size_t, Pending> m_pending;
    std::vector<State> m_state;
};

ConstantTable build_constant_table(const std::vector<const LexedUnit*>& units, Diagnostics* diag)
{
    return ConstantTableBuilder(units, diag).build();
}

ConstantTable build_constant_table(const std::vector<SourceUnit>& units, Diagnostics* diag)
{
    std::vector<std::unique_ptr<LexedUnit>> lexed;
    std::vector<const LexedUnit*> ptrs;
    for (const auto& u : units) {
        lexed.push_back(std::make_unique<LexedUnit>(u, diag));
        ptrs.push_back(lexed.back().get());
    }
    return build_constant_table(ptrs, diag);
}

// ---------------------------------------------------------------------------
// Call sites

Resolution resolve_argument(const CallSite& site, const LexedUnit& unit, const ConstantTable& table, int arg_index,
    Diagnostics* diag)
{
    Resolution res;
    auto v = resolve_value(site, arg_index, unit, table, diag);
    if (!v || v->kind != ConstValue::Kind::String)
        return res;
    res.value = std::move(v->text);
    res.steps = std::move(v->steps);
    res.origin = std::move(v->origin);
    res.status = res.steps.empty() ? ResolutionStatus::ResolvedLiteral : ResolutionStatus::ResolvedViaDataflow;
    return res;
}

Resolution resolve_argument(const CallSite& site, const LexedUnit& unit, const ConstantTable& table,
    const Ruleset& rules, Diagnostics* diag)
{
    const Trigger* trig = rules.find_trigger(site.matched_pattern_id);
    if (!trig || !trig->arg_index_of_algorithm)
        return {};
    return resolve_argument(site, unit, table, *trig->arg_index_of_algorithm, diag);
}

std::optional<int> curve_bits(std::string_view curve_name)
{
    const std::string n = lower(curve_name);
    if (n == "x25519" || n == "ed25519" || n == "curve25519")
        return 255;
    if (n == "x448" || n == "ed448")
        return 448;
    if (n == "prime192v1")
        return 192;
    if (n == "prime256v1")
        return 256;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(n[i])))
            continue;
        std::size_t j = i;
        while (j < n.size() && std::isdigit(static_cast<unsigned char>(n[j])))
            ++j;
        int bits = 0;
        std::from_chars(n.data() + i, n.data() + j, bits);
        if (bits >= 160 && bits <= 571)
            return bits;
        i = j;
    }
    return std::nullopt;
}

namespace {

std::optional<int> positive_int(const std::optional<ConstValue>& v)
{
    if (!v || v->kind != ConstValue::Kind::Integer)
        return std::nullopt;
    long long n = 0;
    auto [p, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), n);
    if (ec != std::errc() || n <= 0 || n > (1 << 20))
        return std::nullopt;
    return static_cast<int>(n);
}

// initialize(...) argument: a number, or a parameter-spec constructor.
std::optional<int> key_size_from_init(Resolver& r, const LexedUnit& u, std::size_t b, std::size_t e)
{
    const auto& toks = u.tokens();
    if (auto n = positive_int(r.range(b, e, 0)))
        return n;
    std::size_t k = b;
    if (toks[k].is_ident("new"))
        ++k;
    while (k + 2 < e && toks[k + 1].is("."))
        k += 2;
    if (k + 1 >= e || !toks[k + 1].is("("))
        return std::nullopt;
    const auto cls = toks[k].text;
    const std::size_t close = u.matching_token(k + 1);
    if (close == LexedUnit::npos)
        return std::nullopt;
    const std::size_t arg_end = r.expression_end(k + 2, close);
    if (cls == "RSAKeyGenParameterSpec" || cls == "DSAGenParameterSpec")
        return positive_int(r.range(k + 2, arg_end, 0));
    if (cls == "ECGenParameterSpec" || cls == "NamedParameterSpec") {
        auto v = r.range(k + 2, arg_end, 0);
        if (v && v->kind == ConstValue::Kind::String)
            return curve_bits(v->text);
    }
    return std::nullopt;
}

std::optional<int> source_generator_bits(const CallSite& site, const LexedUnit& u, const ConstantTable& table,
    Diagnostics* diag)
{
    const auto& toks = u.tokens();
    std::size_t s = u.token_index_at(site.call.begin);
    // Skip a package qualifier such as `java.security.`.
    while (s >= 2 && toks[s - 1].is(".") && toks[s - 2].kind == TokenKind::Identifier)
        s -= 2;
    if (s < 2 || !toks[s - 1].is("=") || toks[s - 2].kind != TokenKind::Identifier)
        return std::nullopt;
    const auto var = toks[s - 2].text;
    const std::size_t after = u.token_index_at(site.call.end);
    const ByteRange scope = u.enclosing_scope(site.call.begin);
    FinishedSource source(table);
    Resolver r(u, source, diag);
    prepare(r, u, site.call.begin);
    for (std::size_t i = after; i + 3 < toks.size() && toks[i].offset < scope.end; ++i) {
        if (!toks[i].is_ident(var) || (i > 0 && toks[i - 1].is(".")))
            continue;
        if (!toks[i + 1].is(".") || !(toks[i + 2].is_ident("initialize") || toks[i + 2].is_ident("init"))
            || !toks[i + 3].is("("))
            continue;
        const std::size_t close = u.matching_token(i + 3);
        if (close == LexedUnit::npos || close == i + 4)
            return std::nullopt;
        const std::size_t arg_end = r.expression_end(i + 4, close);
        return key_size_from_init(r, u, i + 4, arg_end);
    }
    return std::nullopt;
}

std::optional<int> smali_generator_bits(const CallSite& site, const LexedUnit& u, const ConstantTable& table,
    Diagnostics* diag)
{
    auto ctx = smali_context(u, site);
    if (!ctx)
        return std::nullopt;
    const auto& lines = ctx->lines;
    std::string holder;
    std::size_t k = ctx->site_line + 1;
    for (; k < lines.size(); ++k) {
        if (lines[k].text.front() == '.')
            continue;
        auto ins = smali::parse_instruction(lines[k]);
        if (ins.opcode == "move-result-object" && !ins.operands.empty())
            holder = ins.operands[0];
        break;
    }
    if (holder.empty())
        return std::nullopt;
    FinishedSource source(table);
    Resolver r(u, source, diag);
    for (++k; k < lines.size(); ++k) {
        if (auto inv = smali::parse_invoke(lines[k])) {
            if (!inv->is_static && inv->registers.size() >= 2 && inv->registers[0] == holder
                && (inv->member == "initialize" || inv->member == "init")) {
                if (!inv->signature.starts_with("(I"))
                    return std::nullopt;
                return positive_int(r.smali_register(lines, k, inv->registers[1], 0));
            }
            continue;
        }
        if (smali::is_label(lines[k]) || lines[k].text.front() == '.')
            continue;
        auto ins = smali::parse_instruction(lines[k]);
        if (smali::writes_first_register(ins.opcode) && !ins.operands.empty() && ins.operands[0] == holder)
            return std::nullopt;
    }
    return std::nullopt;
}

bool mentions_register(std::string_view text, std::string_view reg)
{
    for (std::size_t p = text.find(reg); p != std::string_view::npos; p = text.find(reg, p + 1)) {
        const bool left = p == 0 || !std::isalnum(static_cast<unsigned char>(text[p - 1]));
        const std::size_t q = p + reg.size();
        const bool right = q >= text.size() || !std::isalnum(static_cast<unsigned char>(text[q]));
        if (left && right)
            return true;
    }
    return false;
}

} // namespace

ByteSource analyze_byte_argument(const CallSite& site, int arg_index, const LexedUnit& unit,
    const ConstantTable& table)
{
    ByteSource out;
    std::optional<std::size_t> def_line;
    std::optional<SmaliContext> ctx;
    auto v = resolve_value(site, arg_index, unit, table, nullptr, &def_line, &ctx);
    if (!v || v->kind != ConstValue::Kind::ByteArray)
        return out;
    out.size = v->array_size;
    out.kind = ByteSource::Kind::Constant;
    const auto idx = normalized_index(arg_index, site.argument_exprs.size());

    if (unit.unit().language == Language::Smali) {
        if (!ctx || !def_line)
            return out;
        const auto& reg = site.argument_exprs[*idx];
        for (std::size_t k = *def_line + 1; k < ctx->site_line; ++k) {
            const auto& text = ctx->lines[k].text;
            if (text.starts_with("fill-array-data") || text.front() == '.')
                continue;
            if (mentions_register(text, reg)) {
                out.kind = ByteSource::Kind::Dynamic;
                break;
            }
        }
        return out;
    }

    // A local array that is mentioned again before the site may have been
    // filled in (e.g. by nextBytes).
    auto toks = argument_tokens(unit, site, *idx);
    const auto& all = unit.tokens();
    if (!toks || toks->second - toks->first != 1 || all[toks->first].kind != TokenKind::Identifier)
        return out;
    if (v->steps.empty() || v->steps.front().rule != ResolutionRule::LocalAssignment)
        return out;
    FinishedSource source(table);
    Resolver r(unit, source, nullptr);
    prepare(r, unit, site.call.begin);
    const auto name = all[toks->first].text;
    const LocalInfo info = r.find_local(name);
    if (info.assignments.size() != 1)
        return out;
    const std::size_t from = info.assignments.front().rhs_end;
    for (std::size_t i = from; i < toks->first; ++i) {
        if (all[i].is_ident(name) && !(i > 0 && all[i - 1].is("."))) {
            out.kind = ByteSource::Kind::Dynamic;
            break;
        }
    }
    return out;
}

bool argument_is_constant_seed(const CallSite& site, int arg_index, const LexedUnit& unit,
    const ConstantTable& table)
{
    auto v = resolve_value(site, arg_index, unit, table, nullptr);
    if (!v)
        return false;
    if (v->kind == ConstValue::Kind::Integer)
        return true;
    if (v->kind == ConstValue::Kind::ByteArray)
        return analyze_byte_argument(site, arg_index, unit, table).kind == ByteSource::Kind::Constant;
    return false;
}

std::optional<int> resolve_key_bits(const CallSite& site, const LexedUnit& unit, const ConstantTable& table,
    Diagnostics* diag)
{
    const bool smali_unit = unit.unit().language == Language::Smali;
    switch (site.api_kind) {
    case ApiKind::KeyPairGeneratorFactory:
    case ApiKind::KeyGeneratorFactory:
        return smali_unit ? smali_generator_bits(site, unit, table, diag)
                          : source_generator_bits(site, unit, table, diag);
    case ApiKind::SecretKeyConstruction: {
        if (site.argument_exprs.size() >= 4) {
            auto len = positive_int(resolve_value(site, 2, unit, table, diag));
            if (len)
                return *len * 8;
            return std::nullopt;
        }
        if (site.argument_exprs.empty())
            return std::nullopt;
        auto src = analyze_byte_argument(site, 0, unit, table);
        if (src.size && *src.size > 0)
            return static_cast<int>(*src.size * 8);
        return std::nullopt;
    }
    default:
        return std::nullopt;
    }
}

} // namespace pqscan
