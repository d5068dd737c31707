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

#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

// Every failure the library reports through an exception carries one of these
// codes so callers (and the CLI exit-code mapping) can branch on it.
enum class ErrorCode {
    EmptyTransformation,
    TooManySegments,
    RulesetParseError,
    DuplicatePatternId,
    AmbiguousRuleMatch,
    IoError,
    SchemaError,
    SchemaVersionMismatch,
    UnresolvedTarget,
    SharedLiteralConflict,
    MissingContextFile,
    ContextMismatch,
    MalformedDiff,
    PathEscape,
    Timeout,
    TransportError,
    BudgetExceeded,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return m_code; }

private:
    ErrorCode m_code;
};

enum class Severity { Note, Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Warning;
    std::string file;  // empty when not tied to a file
    int line = 0;      // 0 when not tied to a line
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const Diagnostic& d);

// Thread-safe sink. Scanning workers report into a shared instance; sorted()
// gives a stable view independent of worker interleaving.
class Diagnostics {
public:
    Diagnostics() = default;
    Diagnostics(const Diagnostics& other);
    Diagnostics& operator=(const Diagnostics& other);

    void report(Diagnostic d);
    void warn(std::string file, int line, std::string message);
    void note(std::string file, int line, std::string message);

    std::vector<Diagnostic> sorted() const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    bool contains(std::string_view needle) const;
    void merge(const Diagnostics& other);

private:
    mutable std::mutex m_mutex;
    std::vector<Diagnostic> m_items;
};

} // namespace pqscan
