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

// Unified diffs: computing, parsing, rendering and exact-context application.

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan {

// Relative path -> content.
using FileSet = std::map<std::string, std::string>;

struct HunkLine {
    char kind = ' '; // ' ', '-', '+'
    std::string text; // without the line terminator
    bool no_newline = false; // followed by "\ No newline at end of file"

    bool operator==(const HunkLine&) const = default;
};

struct Hunk {
    int old_start = 0;
    int old_count = 0;
    int new_start = 0;
    int new_count = 0;
    std::vector<HunkLine> lines;

    bool operator==(const Hunk&) const = default;
};

struct FilePatch {
    std::string path;    // normalized, without a/ b/ prefixes
    bool is_new = false;    // old side is /dev/null
    bool is_delete = false; // new side is /dev/null
    std::vector<Hunk> hunks;

    bool operator==(const FilePatch&) const = default;
};

struct Patch {
    std::vector<FilePatch> files;

    bool empty() const { return files.empty(); }
    // Paths of files the patch creates.
    std::vector<std::string> new_files() const;
    bool operator==(const Patch&) const = default;
};

inline constexpr int kDiffContext = 3;

// Patch turning `before` into `after`, files in path order.
Patch diff_file_sets(const FileSet& before, const FileSet& after, int context = kDiffContext);
FilePatch diff_file(const std::string& path, std::string_view before, std::string_view after,
    int context = kDiffContext);

std::string render_patch(const Patch& patch);

// Throws Error{MalformedDiff}. Text outside file sections is limited to git
// header lines ("diff --git", "index", mode lines).
Patch parse_patch(std::string_view text);

// Applies with exact context. `files` is the task context: every modified or
// deleted file must be in it, and new files must sit in a directory that
// holds one of its files. Throws Error{PathEscape | ContextMismatch |
// MalformedDiff}.
FileSet apply_patch(const FileSet& files, const Patch& patch);

// Lines of `text`, each keeping its '\n' (the last one may lack it).
std::vector<std::string> split_lines(std::string_view text);

} // namespace pqscan
