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

// File and JSON helpers shared inside the library.

#include <pqscan/diagnostics.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>

namespace pqscan::json {

using ordered = nlohmann::ordered_json;

// Throws Error{IoError}.
std::string read_file(const std::filesystem::path& path);
// Creates parent directories. Throws Error{IoError}.
void write_file(const std::filesystem::path& path, const std::string& text);

// Two-space indented dump with a trailing newline.
std::string pretty(const ordered& j);

} // namespace pqscan::json
