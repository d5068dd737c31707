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

// Source units and the lexical layer shared by the scanner, the dataflow
// resolver and the patch validator: comment/string masking, a flat token
// stream, and an index of method-like scopes.

#include <pqscan/diagnostics.hpp>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pqscan {

enum class Language { Java, Kotlin, Smali };

std::string_view to_string(Language lang);

// Languages the scanner analyzes, keyed by extension (.java, .kt, .smali).
std::optional<Language> language_for_path(std::string_view path);

// Lexing rules to use for any file, including build scripts: .kts lexes as
// Kotlin, .smali as smali, everything else as Java.
Language lexing_language_for_path(std::string_view path);

struct SourceUnit {
    std::string app_id;
    std::string file_path;
    Language language = Language::Java;
    std::string content;
};

// Replaces bytes that are not valid UTF-8 with '?', keeping offsets stable.
// Returns the number of replaced bytes.
std::size_t sanitize_utf8(std::string& text);

// Builds a unit from raw bytes, inferring the language from the extension
// unless `language` is given. Invalid UTF-8 is replaced with a warning.
SourceUnit make_source_unit(std::string app_id, std::string file_path, std::string bytes,
    Diagnostics& diag, std::optional<Language> language = std::nullopt);

struct ByteRange {
    std::size_t begin = 0;
    std::size_t end = 0; // exclusive

    bool contains(std::size_t offset) const { return offset >= begin && offset < end; }
    std::size_t size() const { return end - begin; }
    bool operator==(const ByteRange&) const = default;
};

struct MaskedSource {
    // Same length and line structure as the input; comments and string
    // interiors are spaces. Quote characters stay in place.
    std::string text;
    std::vector<ByteRange> literals; // including the quotes
    std::vector<ByteRange> comments;
    bool unterminated_comment = false;
    bool unterminated_string = false;

    bool in_literal(std::size_t offset) const;
    bool in_comment(std::size_t offset) const;
    // The literal starting exactly at `offset`, if any.
    const ByteRange* literal_at(std::size_t offset) const;
};

// Masks comments and string literal interiors. Unterminated constructs are
// reported as warnings against `file` and masked to their natural end
// (end of line for strings, end of input for block comments).
MaskedSource strip_noncode(std::string_view content, Language language, Diagnostics* diag = nullptr,
    std::string_view file = {});

class LineIndex {
public:
    explicit LineIndex(std::string_view text);

    // 1-based line and byte column of an offset.
    std::pair<int, int> position(std::size_t offset) const;
    std::size_t line_start(int line) const;
    std::string_view line_text(std::string_view text, int line) const;
    int line_count() const { return static_cast<int>(m_starts.size()); }

private:
    std::vector<std::size_t> m_starts;
};

enum class TokenKind { Identifier, Number, String, Char, Punct };

struct Token {
    TokenKind kind = TokenKind::Punct;
    std::size_t offset = 0;
    std::size_t length = 0;
    int line = 1;
    std::string_view text; // view into the masked text

    bool is(std::string_view s) const { return kind != TokenKind::String && text == s; }
    bool is_ident(std::string_view s) const { return kind == TokenKind::Identifier && text == s; }
    std::size_t end() const { return offset + length; }
};

// Tokenizes masked Java/Kotlin text. Literals come out as single String/Char
// tokens spanning their quotes.
std::vector<Token> tokenize(const MaskedSource& masked);

// Brace block with the text that introduces it ("header").
struct Block {
    ByteRange body;           // from '{' to just past '}'
    std::size_t header_begin; // start of the header text
    bool method_like = false; // method, constructor, initializer or Kotlin fun
    std::string type_name;    // set for class/interface/enum/object/record blocks
    bool is_interface = false;
};

// Everything the analyses need about one unit, computed once.
class LexedUnit {
public:
    explicit LexedUnit(SourceUnit unit, Diagnostics* diag = nullptr);

    const SourceUnit& unit() const { return m_unit; }
    const std::string& content() const { return m_unit.content; }
    const MaskedSource& masked() const { return m_masked; }
    const LineIndex& lines() const { return m_lines; }
    const std::vector<Token>& tokens() const { return m_tokens; }
    const std::vector<Block>& blocks() const { return m_blocks; }

    // Innermost method-like scope containing the offset (smali: the
    // .method/.end method range), or the whole file.
    ByteRange enclosing_scope(std::size_t offset) const;
    // Header start of the scope returned by enclosing_scope, so parameter
    // declarations can be seen.
    std::size_t scope_header_begin(std::size_t offset) const;
    // Innermost enclosing class-like block's name, or the file stem.
    std::string enclosing_type_name(std::size_t offset) const;
    bool inside_interface(std::size_t offset) const;

    // Index of the first token at or after `offset`.
    std::size_t token_index_at(std::size_t offset) const;
    // Index of the token matching the bracket at `open`, or npos.
    std::size_t matching_token(std::size_t open) const;

    std::string_view original(std::size_t offset, std::size_t length) const
    {
        return std::string_view(m_unit.content).substr(offset, length);
    }
    // Original text of a range with comment bytes removed.
    std::string text_without_comments(std::size_t begin, std::size_t end) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    SourceUnit m_unit;
    MaskedSource m_masked;
    LineIndex m_lines;
    std::vector<Token> m_tokens;
    std::vector<Block> m_blocks;
    std::vector<ByteRange> m_smali_methods;
};

bool is_ident_char(char c);

} // namespace pqscan
