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

#include <pqscan/diagnostics.hpp>

#include <algorithm>
#include <tuple>

namespace pqscan {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::EmptyTransformation: return "EmptyTransformation";
    case ErrorCode::TooManySegments: return "TooManySegments";
    case ErrorCode::RulesetParseError: return "RulesetParseError";
    case ErrorCode::DuplicatePatternId: return "DuplicatePatternId";
    case ErrorCode::AmbiguousRuleMatch: return "AmbiguousRuleMatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::UnresolvedTarget: return "UnresolvedTarget";
    case ErrorCode::SharedLiteralConflict: return "SharedLiteralConflict";
    case ErrorCode::MissingContextFile: return "MissingContextFile";
    case ErrorCode::ContextMismatch: return "ContextMismatch";
    case ErrorCode::MalformedDiff: return "MalformedDiff";
    case ErrorCode::PathEscape: return "PathEscape";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , m_code(code)
{
}

std::string format_diagnostic(const Diagnostic& d)
{
    std::string out;
    switch (d.severity) {
    case Severity::Note: out = "note"; break;
    case Severity::Warning: out = "warning"; break;
    case Severity::Error: out = "error"; break;
    }
    out += ": ";
    if (!d.file.empty()) {
        out += d.file;
        if (d.line > 0)
            out += ":" + std::to_string(d.line);
        out += ": ";
    }
    out += d.message;
    return out;
}

Diagnostics::Diagnostics(const Diagnostics& other)
{
    std::lock_guard lock(other.m_mutex);
    m_items = other.m_items;
}

Diagnostics& Diagnostics::operator=(const Diagnostics& other)
{
    if (this == &other)
        return *this;
    auto copy = other.sorted();
    std::lock_guard lock(m_mutex);
    m_items = std::move(copy);
    return *this;
}

void Diagnostics::report(Diagnostic d)
{
    std::lock_guard lock(m_mutex);
    m_items.push_back(std::move(d));
}

void Diagnostics::warn(std::string file, int line, std::string message)
{
    report({Severity::Warning, std::move(file), line, std::move(message)});
}

void Diagnostics::note(std::string file, int line, std::string message)
{
    report({Severity::Note, std::move(file), line, std::move(message)});
}

std::vector<Diagnostic> Diagnostics::sorted() const
{
    std::vector<Diagnostic> copy;
    {
        std::lock_guard lock(m_mutex);
        copy = m_items;
    }
    std::stable_sort(copy.begin(), copy.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.file, a.line, a.message) < std::tie(b.file, b.line, b.message);
    });
    return copy;
}

std::size_t Diagnostics::size() const
{
    std::lock_guard lock(m_mutex);
    return m_items.size();
}

bool Diagnostics::contains(std::string_view needle) const
{
    std::lock_guard lock(m_mutex);
    return std::any_of(m_items.begin(), m_items.end(), [&](const Diagnostic& d) {
        return d.message.find(needle) != std::string::npos;
    });
}

void Diagnostics::merge(const Diagnostics& other)
{
    auto items = other.sorted();
    std::lock_guard lock(m_mutex);
    m_items.insert(m_items.end(), items.begin(), items.end());
}

} // namespace pqscan
