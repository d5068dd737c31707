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

// findings.jsonl: a header record on line 1, then one finding per line.

#include <pqscan/model.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

inline constexpr std::string_view kFindingsSchemaVersion = "1.0";

struct FindingsHeader {
    std::string schema_version {kFindingsSchemaVersion};
    std::string corpus_root;
    std::vector<std::string> apps; // every app walked, including ones without findings
    std::string generated_at;

    bool operator==(const FindingsHeader&) const = default;
};

struct FindingsFile {
    FindingsHeader header;
    bool has_header = false;
    std::vector<Finding> findings;
};

// One line of JSON, no trailing newline, fixed key order.
std::string finding_to_json(const Finding& f);
// Throws Error{SchemaError} naming `line_number` when the record is invalid.
Finding finding_from_json(std::string_view line, int line_number = 1);

std::string header_to_json(const FindingsHeader& h);

void persist_findings(const std::vector<Finding>& findings, const std::filesystem::path& path,
    const FindingsHeader& header = {});

// Throws Error{IoError | SchemaError | SchemaVersionMismatch}. An empty file
// holds no findings.
FindingsFile load_findings_file(const std::filesystem::path& path);
std::vector<Finding> load_findings(const std::filesystem::path& path);

// Same, over text already in memory; `name` labels errors.
FindingsFile parse_findings(std::string_view text, std::string_view name = "<findings>");

// ISO-8601 UTC time now, or `fixed` verbatim when given.
std::string timestamp_or(const std::string& fixed);

} // namespace pqscan
