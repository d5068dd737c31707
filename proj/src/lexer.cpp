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

#include <pqscan/lexer.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>

namespace pqscan {

namespace {

bool ends_with_ci(std::string_view s, std::string_view suffix)
{
    if (s.size() < suffix.size())
        return false;
    auto tail = s.substr(s.size() - suffix.size());
    return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
}

bool in_ranges(const std::vector<ByteRange>& ranges, std::size_t offset)
{
    auto it = std::upper_bound(ranges.begin(), ranges.end(), offset,
        [](std::size_t off, const ByteRange& r) { return off < r.begin; });
    if (it == ranges.begin())
        return false;
    --it;
    return it->contains(offset);
}

class Masker {
public:
    Masker(std::string_view src, Language lang, Diagnostics* diag, std::string_view file)
        : m_src(src)
        , m_lang(lang)
        , m_diag(diag)
        , m_file(file)
    {
        m_out.text.assign(src);
    }

    MaskedSource run()
    {
        if (m_lang == Language::Smali)
            run_smali();
        else
            run_c_like();
        return std::move(m_out);
    }

private:
    char at(std::size_t i) const { return i < m_src.size() ? m_src[i] : '\0'; }

    void blank(std::size_t i)
    {
        if (m_out.text[i] != '\n')
            m_out.text[i] = ' ';
    }

    int line_of(std::size_t offset) const
    {
        return 1 + static_cast<int>(std::count(m_src.begin(), m_src.begin() + offset, '\n'));
    }

    void warn(std::size_t offset, const std::string& what)
    {
        if (m_diag)
            m_diag->warn(std::string(m_file), line_of(offset), what);
    }

    void line_comment(std::size_t& i)
    {
        const std::size_t start = i;
        while (i < m_src.size() && m_src[i] != '\n')
            blank(i++);
        m_out.comments.push_back({start, i});
    }

    void block_comment(std::size_t& i)
    {
        const std::size_t start = i;
        int depth = 1;
        blank(i);
        blank(i + 1);
        i += 2;
        while (i < m_src.size()) {
            if (m_lang == Language::Kotlin && at(i) == '/' && at(i + 1) == '*') {
                ++depth;
                blank(i);
                blank(i + 1);
                i += 2;
            } else if (at(i) == '*' && at(i + 1) == '/') {
                blank(i);
                blank(i + 1);
                i += 2;
                if (--depth == 0)
                    break;
            } else {
                blank(i++);
            }
        }
        if (depth > 0) {
            m_out.unterminated_comment = true;
            warn(start, "UnterminatedComment: block comment runs to end of file");
        }
        m_out.comments.push_back({start, i});
    }

    void text_block(std::size_t& i)
    {
        const std::size_t start = i;
        i += 3;
        while (i < m_src.size()) {
            if (m_lang == Language::Java && at(i) == '\\' && i + 1 < m_src.size()) {
                blank(i);
                blank(i + 1);
                i += 2;
                continue;
            }
            if (at(i) == '"' && at(i + 1) == '"' && at(i + 2) == '"') {
                i += 3;
                m_out.literals.push_back({start, i});
                return;
            }
            blank(i++);
        }
        m_out.unterminated_string = true;
        warn(start, "UnterminatedString: text block runs to end of file");
        m_out.literals.push_back({start, i});
    }

    void quoted(std::size_t& i, char quote)
    {
        const std::size_t start = i;
        ++i;
        while (i < m_src.size() && m_src[i] != quote && m_src[i] != '\n') {
            if (m_src[i] == '\\' && i + 1 < m_src.size() && m_src[i + 1] != '\n') {
                blank(i);
                blank(i + 1);
                i += 2;
                continue;
            }
            blank(i++);
        }
        if (i < m_src.size() && m_src[i] == quote) {
            ++i;
        } else {
            m_out.unterminated_string = true;
            warn(start, "UnterminatedString: literal not closed before end of line");
        }
        m_out.literals.push_back({start, i});
    }

    void run_c_like()
    {
        std::size_t i = 0;
        while (i < m_src.size()) {
            const char c = m_src[i];
            if (c == '/' && at(i + 1) == '/')
                line_comment(i);
            else if (c == '/' && at(i + 1) == '*')
                block_comment(i);
            else if (c == '"' && at(i + 1) == '"' && at(i + 2) == '"')
                text_block(i);
            else if (c == '"' || c == '\'')
                quoted(i, c);
            else
                ++i;
        }
    }

    void run_smali()
    {
        std::size_t i = 0;
        while (i < m_src.size()) {
            const char c = m_src[i];
            if (c == '#')
                line_comment(i);
            else if (c == '"')
                quoted(i, '"');
            else
                ++i;
        }
    }

    std::string_view m_src;
    Language m_lang;
    Diagnostics* m_diag;
    std::string_view m_file;
    MaskedSource m_out;
};

bool is_ident_start(char c)
{
    const auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || c == '_' || c == '$' || u >= 0x80;
}

constexpr std::array<std::string_view, 23> kMultiCharPuncts {
    "...", "?:", "?.", "!!", "::", "->", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
    "^=", "&&", "||", "++", "--", "..",
};

constexpr std::array<std::string_view, 14> kControlKeywords {
    "if", "for", "while", "switch", "catch", "synchronized", "try", "else", "do", "when", "return", "new",
    "foreach", "finally",
};

bool is_control_keyword(std::string_view s)
{
    return std::find(kControlKeywords.begin(), kControlKeywords.end(), s) != kControlKeywords.end();
}

} // namespace

std::string_view to_string(Language lang)
{
    switch (lang) {
    case Language::Java: return "Java";
    case Language::Kotlin: return "Kotlin";
    case Language::Smali: return "Smali";
    }
    return "?";
}

std::optional<Language> language_for_path(std::string_view path)
{
    if (ends_with_ci(path, ".java"))
        return Language::Java;
    if (ends_with_ci(path, ".kt"))
        return Language::Kotlin;
    if (ends_with_ci(path, ".smali"))
        return Language::Smali;
    return std::nullopt;
}

Language lexing_language_for_path(std::string_view path)
{
    if (auto l = language_for_path(path))
        return *l;
    if (ends_with_ci(path, ".kts"))
        return Language::Kotlin;
    return Language::Java;
}

std::size_t sanitize_utf8(std::string& text)
{
    std::size_t replaced = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto cont = [&](std::size_t k) { return k < n && (static_cast<unsigned char>(text[k]) & 0xC0) == 0x80; };
    while (i < n) {
        const auto b = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        if (b < 0x80)
            len = 1;
        else if (b >= 0xC2 && b <= 0xDF)
            len = 2;
        else if (b >= 0xE0 && b <= 0xEF)
            len = 3;
        else if (b >= 0xF0 && b <= 0xF4)
            len = 4;
        bool ok = len > 0;
        for (std::size_t k = 1; ok && k < len; ++k)
            ok = cont(i + k);
        if (ok && len == 3) {
            const auto b1 = static_cast<unsigned char>(text[i + 1]);
            ok = !(b == 0xE0 && b1 < 0xA0) && !(b == 0xED && b1 >= 0xA0);
        }
        if (ok && len == 4) {
            const auto b1 = static_cast<unsigned char>(text[i + 1]);
            ok = !(b == 0xF0 && b1 < 0x90) && !(b == 0xF4 && b1 >= 0x90);
        }
        if (!ok) {
            text[i] = '?';
            ++replaced;
            ++i;
            continue;
        }
        i += len;
    }
    return replaced;
}

SourceUnit make_source_unit(std::string app_id, std::string file_path, std::string bytes, Diagnostics& diag,
    std::optional<Language> language)
{
    SourceUnit unit;
    unit.app_id = std::move(app_id);
    unit.file_path = std::move(file_path);
    unit.language = language ? *language : lexing_language_for_path(unit.file_path);
    if (auto replaced = sanitize_utf8(bytes); replaced > 0)
        diag.warn(unit.app_id + "/" + unit.file_path, 0,
            "invalid UTF-8: replaced " + std::to_string(replaced) + " byte(s)");
    unit.content = std::move(bytes);
    return unit;
}

bool MaskedSource::in_literal(std::size_t offset) const { return in_ranges(literals, offset); }
bool MaskedSource::in_comment(std::size_t offset) const { return in_ranges(comments, offset); }

const ByteRange* MaskedSource::literal_at(std::size_t offset) const
{
    auto it = std::lower_bound(literals.begin(), literals.end(), offset,
        [](const ByteRange& r, std::size_t off) { return r.begin < off; });
    if (it != literals.end() && it->begin == offset)
        return &*it;
    return nullptr;
}

MaskedSource strip_noncode(std::string_view content, Language language, Diagnostics* diag, std::string_view file)
{
    return Masker(content, language, diag, file).run();
}

LineIndex::LineIndex(std::string_view text)
{
    m_starts.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n')
            m_starts.push_back(i + 1);
}

std::pair<int, int> LineIndex::position(std::size_t offset) const
{
    auto it = std::upper_bound(m_starts.begin(), m_starts.end(), offset);
    const auto line = static_cast<int>(it - m_starts.begin());
    return {line, static_cast<int>(offset - m_starts[static_cast<std::size_t>(line - 1)]) + 1};
}

std::size_t LineIndex::line_start(int line) const
{
    if (line < 1)
        return 0;
    if (static_cast<std::size_t>(line) > m_starts.size())
        return m_starts.back();
    return m_starts[static_cast<std::size_t>(line - 1)];
}

std::string_view LineIndex::line_text(std::string_view text, int line) const
{
    const std::size_t begin = line_start(line);
    if (begin >= text.size())
        return {};
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos)
        end = text.size();
    auto view = text.substr(begin, end - begin);
    if (!view.empty() && view.back() == '\r')
        view.remove_suffix(1);
    return view;
}

bool is_ident_char(char c)
{
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

std::vector<Token> tokenize(const MaskedSource& masked)
{
    std::vector<Token> tokens;
    const std::string_view s = masked.text;
    std::size_t i = 0;
    int line = 1;
    std::size_t lit = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        while (lit < masked.literals.size() && masked.literals[lit].begin < i)
            ++lit;
        if (lit < masked.literals.size() && masked.literals[lit].begin == i) {
            const auto& r = masked.literals[lit];
            Token t {c == '\'' ? TokenKind::Char : TokenKind::String, r.begin, r.size(), line, s.substr(r.begin, r.size())};
            tokens.push_back(t);
            line += static_cast<int>(std::count(s.begin() + r.begin, s.begin() + r.end, '\n'));
            i = r.end;
            continue;
        }
        std::size_t j = i + 1;
        TokenKind kind = TokenKind::Punct;
        if (is_ident_start(c)) {
            kind = TokenKind::Identifier;
            while (j < s.size() && is_ident_char(s[j]))
                ++j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            kind = TokenKind::Number;
            while (j < s.size() && (is_ident_char(s[j]) || (s[j] == '.' && j + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[j + 1])))))
                ++j;
        } else {
            for (auto p : kMultiCharPuncts) {
                if (s.substr(i, p.size()) == p) {
                    j = i + p.size();
                    break;
                }
            }
        }
        tokens.push_back({kind, i, j - i, line, s.substr(i, j - i)});
        i = j;
    }
    return tokens;
}

LexedUnit::LexedUnit(SourceUnit unit, Diagnostics* diag)
    : m_unit(std::move(unit))
    , m_masked(strip_noncode(m_unit.content, m_unit.language, diag, m_unit.app_id + "/" + m_unit.file_path))
    , m_lines(m_unit.content)
{
    if (m_unit.language == Language::Smali) {
        const std::string& t = m_masked.text;
        std::size_t pos = 0;
        constexpr std::size_t none = std::string::npos;
        std::size_t open = none;
        while (pos < t.size()) {
            auto eol = t.find('\n', pos);
            if (eol == std::string::npos)
                eol = t.size();
            std::string_view line(t.data() + pos, eol - pos);
            auto first = line.find_first_not_of(" \t\r");
            if (first != std::string_view::npos) {
                auto body = line.substr(first);
                if (body.starts_with(".method"))
                    open = pos;
                else if (body.starts_with(".end method") && open != none) {
                    m_smali_methods.push_back({open, eol});
                    open = none;
                }
            }
            pos = eol + 1;
        }
        return;
    }

    m_tokens = tokenize(m_masked);

    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < m_tokens.size(); ++i) {
        if (m_tokens[i].is("{")) {
            stack.push_back(i);
            continue;
        }
        if (!m_tokens[i].is("}") || stack.empty())
            continue;
        const std::size_t open = stack.back();
        stack.pop_back();

        std::size_t h = open;
        while (h > 0) {
            const auto& t = m_tokens[h - 1];
            if (t.is(";") || t.is("{") || t.is("}"))
                break;
            --h;
        }
        Block block;
        block.body = {m_tokens[open].offset, m_tokens[i].end()};
        block.header_begin = h < open ? m_tokens[h].offset : m_tokens[open].offset;

        bool is_type = false;
        bool has_fun = false;
        for (std::size_t k = h; k < open; ++k) {
            const auto& t = m_tokens[k];
            if (t.kind != TokenKind::Identifier)
                continue;
            const bool after_dot = k > h && (m_tokens[k - 1].is(".") || m_tokens[k - 1].is("::"));
            if (!after_dot
                && (t.text == "class" || t.text == "interface" || t.text == "enum" || t.text == "object"
                    || t.text == "record")) {
                is_type = true;
                if (t.text == "interface")
                    block.is_interface = true;
                if (k + 1 < open && m_tokens[k + 1].kind == TokenKind::Identifier && m_tokens[k + 1].text != "class")
                    block.type_name = std::string(m_tokens[k + 1].text);
            }
            if (t.text == "fun")
                has_fun = true;
        }
        if (is_type) {
            m_blocks.push_back(block);
            continue;
        }
        if (has_fun) {
            block.method_like = true;
        } else if (open - h == 1 && (m_tokens[h].is_ident("static") || m_tokens[h].is_ident("init"))) {
            block.method_like = true;
        } else if (m_unit.language == Language::Java && open > h) {
            std::size_t last = open - 1;
            for (std::size_t k = h; k < open; ++k) {
                if (m_tokens[k].is_ident("throws") && k > h) {
                    last = k - 1;
                    break;
                }
            }
            if (m_tokens[last].is(")")) {
                // walk back to the matching '('
                int depth = 0;
                std::size_t k = last;
                while (true) {
                    if (m_tokens[k].is(")"))
                        ++depth;
                    else if (m_tokens[k].is("(") && --depth == 0)
                        break;
                    if (k == h)
                        break;
                    --k;
                }
                if (depth == 0 && k > h && m_tokens[k - 1].kind == TokenKind::Identifier) {
                    const auto& name = m_tokens[k - 1];
                    const bool after_new = k - 1 > h && m_tokens[k - 2].is_ident("new");
                    const bool after_dot = k - 1 > h && m_tokens[k - 2].is(".");
                    if (!is_control_keyword(name.text) && !after_new && !after_dot)
                        block.method_like = true;
                }
            }
        }
        m_blocks.push_back(block);
    }
    std::sort(m_blocks.begin(), m_blocks.end(), [](const Block& a, const Block& b) { return a.body.begin < b.body.begin; });
}

ByteRange LexedUnit::enclosing_scope(std::size_t offset) const
{
    if (m_unit.language == Language::Smali) {
        for (const auto& r : m_smali_methods)
            if (offset >= r.begin && offset <= r.end)
                return r;
        return {0, m_unit.content.size()};
    }
    const Block* best = nullptr;
    for (const auto& b : m_blocks)
        if (b.method_like && b.body.contains(offset) && (!best || b.body.size() < best->body.size()))
            best = &b;
    if (best)
        return best->body;
    return {0, m_unit.content.size()};
}

std::size_t LexedUnit::scope_header_begin(std::size_t offset) const
{
    if (m_unit.language == Language::Smali)
        return enclosing_scope(offset).begin;
    const Block* best = nullptr;
    for (const auto& b : m_blocks)
        if (b.method_like && b.body.contains(offset) && (!best || b.body.size() < best->body.size()))
            best = &b;
    return best ? best->header_begin : 0;
}

std::string LexedUnit::enclosing_type_name(std::size_t offset) const
{
    if (m_unit.language == Language::Smali) {
        const auto& t = m_masked.text;
        auto pos = t.find(".class");
        if (pos != std::string::npos) {
            auto eol = t.find('\n', pos);
            std::string_view line(t.data() + pos, (eol == std::string::npos ? t.size() : eol) - pos);
            auto semi = line.rfind(';');
            auto l = line.rfind(' ', semi);
            if (semi != std::string_view::npos && l != std::string_view::npos) {
                auto desc = line.substr(l + 1, semi - l - 1);
                auto slash = desc.rfind('/');
                auto simple = slash == std::string_view::npos ? desc.substr(1) : desc.substr(slash + 1);
                return std::string(simple);
            }
        }
    } else {
        const Block* best = nullptr;
        for (const auto& b : m_blocks)
            if (!b.type_name.empty() && b.body.contains(offset) && (!best || b.body.size() < best->body.size()))
                best = &b;
        if (best)
            return best->type_name;
    }
    return std::filesystem::path(m_unit.file_path).stem().string();
}

bool LexedUnit::inside_interface(std::size_t offset) const
{
    const Block* best = nullptr;
    for (const auto& b : m_blocks)
        if (!b.method_like && (b.is_interface || !b.type_name.empty()) && b.body.contains(offset)
            && (!best || b.body.size() < best->body.size()))
            best = &b;
    return best && best->is_interface;
}

std::size_t LexedUnit::token_index_at(std::size_t offset) const
{
    auto it = std::lower_bound(m_tokens.begin(), m_tokens.end(), offset,
        [](const Token& t, std::size_t off) { return t.offset < off; });
    return static_cast<std::size_t>(it - m_tokens.begin());
}

std::size_t LexedUnit::matching_token(std::size_t open) const
{
    if (open >= m_tokens.size())
        return npos;
    int depth = 0;
    for (std::size_t i = open; i < m_tokens.size(); ++i) {
        const auto& t = m_tokens[i];
        if (t.kind != TokenKind::Punct)
            continue;
        if (t.is("(") || t.is("[") || t.is("{"))
            ++depth;
        else if (t.is(")") || t.is("]") || t.is("}")) {
            if (--depth == 0)
                return i;
            if (depth < 0)
                return npos;
        }
    }
    return npos;
}

std::string LexedUnit::text_without_comments(std::size_t begin, std::size_t end) const
{
    std::string out;
    end = std::min(end, m_unit.content.size());
    for (std::size_t i = begin; i < end; ++i)
        if (!m_masked.in_comment(i))
            out += m_unit.content[i];
    return out;
}

} // namespace pqscan
