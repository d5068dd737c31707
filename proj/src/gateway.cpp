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

#include <pqscan/gateway.hpp>

#include "json_util.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <set>
#include <thread>

namespace pqscan {

namespace fs = std::filesystem;

namespace {

bool diff_like(std::string_view l)
{
    return l.starts_with(" ") || l.starts_with("+") || l.starts_with("-") || l.starts_with("@@")
        || l.starts_with("\\") || l.starts_with("diff ") || l.starts_with("index ") || l.starts_with("new file mode")
        || l.starts_with("deleted file mode");
}

bool has_diff_headers(const std::vector<std::string_view>& lines)
{
    for (std::size_t i = 0; i + 1 < lines.size(); ++i)
        if (lines[i].starts_with("--- ") && lines[i + 1].starts_with("+++ "))
            return true;
    return false;
}

std::vector<std::string_view> split_view(std::string_view text)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            if (pos < text.size())
                out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, eol - pos));
        pos = eol + 1;
    }
    return out;
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t b, std::size_t e)
{
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        out += lines[i];
        out += '\n';
    }
    return out;
}

nlohmann::json tool_schema()
{
    auto tool = [](std::string_view name, std::string_view description, std::vector<std::string> params) {
        nlohmann::json t;
        t["name"] = name;
        t["description"] = description;
        t["parameters"] = params;
        return t;
    };
    return nlohmann::json::array({
        tool(kToolListFiles, "list the files of the task", {}),
        tool(kToolReadFile, "read one file", {"path"}),
        tool(kToolWriteFile, "replace the full content of one file", {"path", "content"}),
    });
}

ToolCall tool_call_from(const nlohmann::json& name, const nlohmann::json& args)
{
    ToolCall c;
    c.name = name.is_string() ? name.get<std::string>() : "";
    if (args.is_object()) {
        if (args.contains("path") && args["path"].is_string())
            c.path = args["path"].get<std::string>();
        if (args.contains("content") && args["content"].is_string())
            c.content = args["content"].get<std::string>();
    }
    return c;
}

class HttpBackend : public ModelBackend {
public:
    HttpBackend(HttpJsonBackend cfg, const ModelConfig& config) : m_cfg(std::move(cfg)), m_config(config)
    {
        const auto scheme = m_cfg.endpoint_url.find("://");
        if (scheme == std::string::npos)
            throw Error(ErrorCode::InvalidArgument, "endpoint URL needs a scheme: " + m_cfg.endpoint_url);
        const auto path = m_cfg.endpoint_url.find('/', scheme + 3);
        m_base = m_cfg.endpoint_url.substr(0, path);
        m_path = path == std::string::npos ? "/" : m_cfg.endpoint_url.substr(path);
        if (!m_cfg.auth_env_var.empty()) {
            const char* token = std::getenv(m_cfg.auth_env_var.c_str());
            if (!token || !*token)
                throw Error(ErrorCode::InvalidArgument, "environment variable " + m_cfg.auth_env_var + " is not set");
            m_token = token;
        }
    }

    BackendReply send(const PromptBundle& bundle, const std::vector<ChatMessage>& messages, int) override
    {
        nlohmann::json req;
        req["model"] = m_cfg.model_name;
        auto msgs = nlohmann::json::array();
        for (const auto& m : messages)
            msgs.push_back({{"role", m.role}, {"content", m.content}});
        req["messages"] = std::move(msgs);
        if (bundle.mode == PromptMode::Agentic)
            req["tools"] = tool_schema();
        if (m_config.temperature)
            req["temperature"] = *m_config.temperature;
        if (m_config.seed)
            req["seed"] = *m_config.seed;
        const std::string body = req.dump();

        httplib::Client client(m_base);
        const auto secs = std::chrono::duration<double>(m_config.timeout_s);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(secs);
        client.set_connection_timeout(micros);
        client.set_read_timeout(micros);
        client.set_write_timeout(micros);
        httplib::Headers headers;
        if (!m_token.empty())
            headers.emplace("Authorization", "Bearer " + m_token);

        std::string last_error;
        bool timed_out = false;
        for (int attempt = 0; attempt <= m_config.max_retries; ++attempt) {
            auto res = client.Post(m_path, headers, body, "application/json");
            if (!res) {
                const auto err = res.error();
                timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
                last_error = httplib::to_string(err);
                continue;
            }
            if (res->status >= 500) {
                timed_out = false;
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status >= 400)
                throw Error(ErrorCode::TransportError, m_cfg.endpoint_url + ": HTTP " + std::to_string(res->status));
            return parse(res->body);
        }
        throw Error(timed_out ? ErrorCode::Timeout : ErrorCode::TransportError,
            m_cfg.endpoint_url + ": " + last_error + " after " + std::to_string(m_config.max_retries + 1) + " attempts");
    }

private:
    BackendReply parse(const std::string& body) const
    {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::TransportError, m_cfg.endpoint_url + ": response is not JSON: " + e.what());
        }
        BackendReply r;
        const nlohmann::json* msg = &j;
        if (m_cfg.dialect == "chat") {
            if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()
                || !j["choices"][0].contains("message"))
                throw Error(ErrorCode::TransportError, m_cfg.endpoint_url + ": response has no choices[0].message");
            msg = &j["choices"][0]["message"];
            if (msg->contains("content") && (*msg)["content"].is_string())
                r.text = (*msg)["content"].get<std::string>();
            if (msg->contains("tool_calls") && (*msg)["tool_calls"].is_array())
                for (const auto& c : (*msg)["tool_calls"]) {
                    if (!c.contains("function"))
                        continue;
                    const auto& fn = c["function"];
                    nlohmann::json args = nlohmann::json::object();
                    if (fn.contains("arguments") && fn["arguments"].is_string())
                        args = nlohmann::json::parse(fn["arguments"].get<std::string>(), nullptr, false);
                    r.tool_calls.push_back(tool_call_from(fn.value("name", nlohmann::json()), args));
                }
            return r;
        }
        if (j.contains("text") && j["text"].is_string())
            r.text = j["text"].get<std::string>();
        if (j.contains("tool_calls") && j["tool_calls"].is_array())
            for (const auto& c : j["tool_calls"])
                r.tool_calls.push_back(tool_call_from(c.value("name", nlohmann::json()), c.value("arguments", nlohmann::json())));
        return r;
    }

    HttpJsonBackend m_cfg;
    ModelConfig m_config;
    std::string m_base;
    std::string m_path;
    std::string m_token;
};

class ReplayStore : public ModelBackend {
public:
    explicit ReplayStore(std::string dir) : m_dir(std::move(dir)) {}

    BackendReply send(const PromptBundle& bundle, const std::vector<ChatMessage>&, int turn) override
    {
        const std::string hash = bundle_hash(bundle);
        const fs::path file = fs::path(m_dir) / (hash + ".json");
        std::error_code ec;
        if (!fs::is_regular_file(file, ec))
            throw Error(ErrorCode::TransportError, "replay miss: no recorded response for bundle " + hash);
        const auto turns = parse_replay_entry(json::read_file(file), file.string());
        if (turn < 0 || static_cast<std::size_t>(turn) >= turns.size())
            throw Error(ErrorCode::TransportError,
                "replay miss: bundle " + hash + " has no recorded turn " + std::to_string(turn));
        return turns[static_cast<std::size_t>(turn)];
    }

private:
    std::string m_dir;
};

std::string tool_calls_text(const std::vector<ToolCall>& calls)
{
    std::string out;
    for (const auto& c : calls) {
        nlohmann::json j;
        j["name"] = c.name;
        if (!c.path.empty())
            j["path"] = c.path;
        if (c.name == kToolWriteFile)
            j["content"] = c.content;
        out += j.dump() + "\n";
    }
    return out;
}

} // namespace

ModelConfig parse_backend(std::string_view spec)
{
    ModelConfig config;
    if (spec.starts_with("scripted:")) {
        std::string id(spec.substr(9));
        const auto& ids = scripted_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end())
            throw Error(ErrorCode::InvalidArgument, "unknown scripted backend '" + id + "'");
        config.backend = ScriptedBackend {id};
    } else if (spec.starts_with("replay:")) {
        if (spec.size() == 7)
            throw Error(ErrorCode::InvalidArgument, "replay backend needs a directory");
        config.backend = ReplayBackend {std::string(spec.substr(7))};
    } else if (spec.starts_with("http:") || spec.starts_with("https:")) {
        std::string url(spec.starts_with("http:") && !spec.starts_with("http://") ? spec.substr(5) : spec);
        config.backend = HttpJsonBackend {url, "", "", "minimal"};
    } else {
        throw Error(ErrorCode::InvalidArgument,
            "backend must be scripted:<id>, replay:<dir> or http:<url>, got '" + std::string(spec) + "'");
    }
    return config;
}

std::unique_ptr<ModelBackend> make_backend(const ModelConfig& config)
{
    if (const auto* h = std::get_if<HttpJsonBackend>(&config.backend))
        return std::make_unique<HttpBackend>(*h, config);
    if (const auto* r = std::get_if<ReplayBackend>(&config.backend))
        return std::make_unique<ReplayStore>(r->directory);
    return make_scripted_backend(std::get<ScriptedBackend>(config.backend).script_id);
}

std::optional<Patch> extract_patch(std::string_view raw_text, std::string* why)
{
    const auto lines = split_view(raw_text);
    std::vector<std::string> blocks;
    std::size_t i = 0;
    while (i < lines.size()) {
        if (lines[i].starts_with("```")) {
            std::size_t e = i + 1;
            while (e < lines.size() && !lines[e].starts_with("```"))
                ++e;
            std::vector<std::string_view> body(lines.begin() + static_cast<std::ptrdiff_t>(i + 1),
                lines.begin() + static_cast<std::ptrdiff_t>(e));
            if (has_diff_headers(body))
                blocks.push_back(join_lines(lines, i + 1, e));
            i = e + 1;
            continue;
        }
        if ((lines[i].starts_with("--- ") && i + 1 < lines.size() && lines[i + 1].starts_with("+++ "))
            || lines[i].starts_with("diff --git ")) {
            std::size_t e = i;
            while (e < lines.size()) {
                if (lines[e].starts_with("```"))
                    break;
                if (diff_like(lines[e]) || lines[e].starts_with("+++ ")) {
                    ++e;
                    continue;
                }
                if (lines[e].empty()) {
                    std::size_t n = e;
                    while (n < lines.size() && lines[n].empty())
                        ++n;
                    if (n < lines.size() && diff_like(lines[n]) && !lines[n].starts_with("--- ")
                        && !lines[n].starts_with("diff "))
                        e = n;
                    else
                        break;
                    continue;
                }
                break;
            }
            std::vector<std::string_view> body(lines.begin() + static_cast<std::ptrdiff_t>(i),
                lines.begin() + static_cast<std::ptrdiff_t>(e));
            if (has_diff_headers(body))
                blocks.push_back(join_lines(lines, i, e));
            i = std::max(e, i + 1);
            continue;
        }
        ++i;
    }
    if (blocks.empty()) {
        if (why)
            *why = "no unified diff in response";
        return std::nullopt;
    }
    if (blocks.size() > 1) {
        if (why)
            *why = "ambiguous patch: " + std::to_string(blocks.size()) + " diff blocks in response";
        return std::nullopt;
    }
    try {
        return parse_patch(blocks.front());
    } catch (const Error& e) {
        if (why)
            *why = std::string("unparseable diff: ") + e.what();
        return std::nullopt;
    }
}

std::string bundle_hash(const PromptBundle& b)
{
    json::ordered j;
    j["task_id"] = b.task.task_id;
    j["kind"] = std::string(to_string(b.task.kind));
    j["mode"] = std::string(to_string(b.mode));
    j["instructions"] = b.instructions;
    auto files = json::ordered::array();
    for (const auto& [path, content] : b.workspace)
        files.push_back(json::ordered::array({path, content}));
    j["files"] = std::move(files);
    j["exemplars"] = b.exemplar_diffs;
    const std::string text = j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::InvalidArgument, "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string replay_entry_json(const std::string& hash, const std::vector<BackendReply>& turns)
{
    json::ordered j;
    j["bundle_hash"] = hash;
    auto arr = json::ordered::array();
    for (const auto& t : turns) {
        json::ordered o;
        o["text"] = t.text;
        auto calls = json::ordered::array();
        for (const auto& c : t.tool_calls) {
            json::ordered call;
            call["name"] = c.name;
            json::ordered args = json::ordered::object();
            if (!c.path.empty())
                args["path"] = c.path;
            if (c.name == kToolWriteFile)
                args["content"] = c.content;
            call["arguments"] = std::move(args);
            calls.push_back(std::move(call));
        }
        o["tool_calls"] = std::move(calls);
        arr.push_back(std::move(o));
    }
    j["turns"] = std::move(arr);
    return json::pretty(j);
}

std::vector<BackendReply> parse_replay_entry(std::string_view text, std::string_view name)
{
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorCode::TransportError, std::string(name) + ": replay entry is not a JSON object");
    std::vector<BackendReply> turns;
    if (j.contains("turns") && j["turns"].is_array()) {
        for (const auto& t : j["turns"]) {
            BackendReply r;
            if (t.contains("text") && t["text"].is_string())
                r.text = t["text"].get<std::string>();
            if (t.contains("tool_calls") && t["tool_calls"].is_array())
                for (const auto& c : t["tool_calls"])
                    r.tool_calls.push_back(tool_call_from(c.value("name", nlohmann::json()), c.value("arguments", nlohmann::json())));
            turns.push_back(std::move(r));
        }
    } else if (j.contains("text") && j["text"].is_string()) {
        turns.push_back({j["text"].get<std::string>(), {}});
    } else {
        throw Error(ErrorCode::TransportError, std::string(name) + ": replay entry has neither turns nor text");
    }
    return turns;
}

BackendReply RecordingBackend::send(const PromptBundle& bundle, const std::vector<ChatMessage>& messages, int turn)
{
    BackendReply r = m_inner.send(bundle, messages, turn);
    m_turns.push_back(r);
    return r;
}

ModelResponse complete(const PromptBundle& bundle, const ModelConfig& config)
{
    auto backend = make_backend(config);
    return complete(bundle, *backend, config);
}

ModelResponse complete(const PromptBundle& bundle, ModelBackend& backend, const ModelConfig& config)
{
    const auto started = std::chrono::steady_clock::now();
    ModelResponse resp;
    std::vector<ChatMessage> messages {
        {"system", "You migrate cryptographic code. Answer with a unified diff."},
        {"user", render_prompt(bundle)},
    };

    auto finish = [&](std::string text) {
        resp.raw_text = std::move(text);
        resp.extracted_patch = extract_patch(resp.raw_text, &resp.diagnostic);
        resp.usage.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return resp;
    };

    if (bundle.mode == PromptMode::Edit) {
        BackendReply r = backend.send(bundle, messages, 0);
        resp.usage.request_count = 1;
        return finish(std::move(r.text));
    }

    std::set<std::string> dirs;
    for (const auto& [path, content] : bundle.workspace) {
        auto slash = path.rfind('/');
        dirs.insert(slash == std::string::npos ? std::string() : path.substr(0, slash));
    }
    FileSet after = bundle.workspace;
    int used = 0;
    for (int turn = 0;; ++turn) {
        BackendReply r = backend.send(bundle, messages, turn);
        ++resp.usage.request_count;
        if (r.tool_calls.empty()) {
            std::string text = std::move(r.text);
            Patch p = diff_file_sets(bundle.workspace, after);
            if (!p.empty()) {
                if (!text.empty() && !text.ends_with('\n'))
                    text += '\n';
                text += "```diff\n" + render_patch(p) + "```\n";
            }
            return finish(std::move(text));
        }
        messages.push_back({"assistant", r.text + (r.text.empty() ? "" : "\n") + tool_calls_text(r.tool_calls)});
        for (const auto& call : r.tool_calls) {
            if (++used > config.tool_budget)
                throw Error(ErrorCode::BudgetExceeded, bundle.task.task_id + ": more than "
                        + std::to_string(config.tool_budget) + " tool calls");
            resp.tool_calls.push_back(call);
            std::string result;
            const auto norm = normalize_relative_path(call.path);
            const bool clean = norm && *norm == call.path;
            if (call.name == kToolListFiles) {
                for (const auto& [path, content] : after)
                    result += path + "\n";
            } else if (call.name == kToolReadFile) {
                if (!clean || !after.contains(call.path))
                    result = "PathEscape: " + call.path + " is not in the task files";
                else
                    result = after.at(call.path);
            } else if (call.name == kToolWriteFile) {
                auto slash = call.path.rfind('/');
                const std::string dir = slash == std::string::npos ? std::string() : call.path.substr(0, slash);
                if (!clean || (!after.contains(call.path) && !dirs.contains(dir))) {
                    result = "PathEscape: " + call.path + " is outside the task files";
                } else {
                    after[call.path] = call.content;
                    result = "ok";
                }
            } else {
                result = "unknown tool '" + call.name + "'";
            }
            messages.push_back({"tool", result});
        }
    }
}

} // namespace pqscan
