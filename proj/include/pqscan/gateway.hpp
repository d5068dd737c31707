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

// Model backends that turn prompt bundles into patches: an HTTP JSON client,
// a replay store keyed by bundle hash, and scripted offline behaviors.

#include <pqscan/diagnostics.hpp>
#include <pqscan/migration.hpp>
#include <pqscan/patch.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pqscan {

struct HttpJsonBackend {
    std::string endpoint_url;
    std::string model_name;
    std::string auth_env_var; // name of the variable holding the token; may be empty
    std::string dialect = "minimal"; // "minimal" or "chat"
};

struct ReplayBackend {
    std::string directory;
};

struct ScriptedBackend {
    std::string script_id;
};

struct ModelConfig {
    std::variant<HttpJsonBackend, ReplayBackend, ScriptedBackend> backend = ScriptedBackend {};
    double timeout_s = 120;
    int max_retries = 2;
    std::optional<double> temperature;
    std::optional<std::uint64_t> seed;
    int tool_budget = 32;
};

// "scripted:<id>", "replay:<dir>", or "http:<url>" (model and auth variable
// are set separately). Throws Error{InvalidArgument}.
ModelConfig parse_backend(std::string_view spec);

struct ToolCall {
    std::string name; // read_file, write_file, list_files
    std::string path;
    std::string content;

    bool operator==(const ToolCall&) const = default;
};

struct Usage {
    int request_count = 0;
    double elapsed_s = 0;
};

struct ModelResponse {
    std::string raw_text;
    std::optional<Patch> extracted_patch;
    std::vector<ToolCall> tool_calls;
    Usage usage;
    // Why no patch was extracted, when none was.
    std::string diagnostic;
};

struct ChatMessage {
    std::string role; // system, user, assistant, tool
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct BackendReply {
    std::string text;
    std::vector<ToolCall> tool_calls;

    bool operator==(const BackendReply&) const = default;
};

// One request/response exchange. `turn` counts from 0 within a session.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;
    virtual BackendReply send(const PromptBundle& bundle, const std::vector<ChatMessage>& messages, int turn) = 0;
};

std::unique_ptr<ModelBackend> make_backend(const ModelConfig& config);

// Edit mode: one exchange. Agentic mode: serve tool calls from the bundle's
// workspace until the model stops calling tools, then synthesize the patch
// from the write requests. Throws Error{Timeout | TransportError |
// BudgetExceeded | InvalidArgument}.
ModelResponse complete(const PromptBundle& bundle, const ModelConfig& config);
ModelResponse complete(const PromptBundle& bundle, ModelBackend& backend, const ModelConfig& config);

// The one unified diff in `raw_text`, fenced or bare. Zero or several diffs
// give nothing; `why` then says which.
std::optional<Patch> extract_patch(std::string_view raw_text, std::string* why = nullptr);

// SHA-256 (hex) over the canonicalized mode, instructions, files and
// exemplars.
std::string bundle_hash(const PromptBundle& bundle);

// Replay store entry: {"bundle_hash": ..., "turns": [{"text": ..., "tool_calls": [...]}]}.
std::string replay_entry_json(const std::string& hash, const std::vector<BackendReply>& turns);
std::vector<BackendReply> parse_replay_entry(std::string_view text, std::string_view name);

// Records every exchange of a wrapped backend so it can be written to a
// replay store.
class RecordingBackend : public ModelBackend {
public:
    explicit RecordingBackend(ModelBackend& inner) : m_inner(inner) {}
    BackendReply send(const PromptBundle& bundle, const std::vector<ChatMessage>& messages, int turn) override;
    const std::vector<BackendReply>& turns() const { return m_turns; }

private:
    ModelBackend& m_inner;
    std::vector<BackendReply> m_turns;
};

// Scripted behaviors, by id.
const std::vector<std::string>& scripted_ids();
std::unique_ptr<ModelBackend> make_scripted_backend(const std::string& script_id);

} // namespace pqscan
