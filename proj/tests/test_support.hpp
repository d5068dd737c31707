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

#include <pqscan/patch.hpp>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace pqscan::testing {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return PQSCAN_FIXTURE_DIR; }
inline fs::path corpus_dir() { return fixture_dir() / "corpus"; }
inline fs::path data_dir() { return PQSCAN_DATA_DIR; }
inline std::string cli_path() { return PQSCAN_CLI; }

inline std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

class TempDir {
public:
    TempDir()
    {
        std::random_device rd;
        m_path = fs::temp_directory_path() / ("pqscan-test-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(m_path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(m_path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return m_path; }
    fs::path operator/(const std::string& rel) const { return m_path / rel; }

private:
    fs::path m_path;
};

// One hand-labeled site of the fixture corpus, written as a trailing
// "//@ key=value ..." (or "#@ ..." in smali) on the line of the call.
struct Expectation {
    std::string app;
    std::string file;
    int line = 0;
    std::map<std::string, std::string> fields;

    std::string get(const std::string& key) const
    {
        auto it = fields.find(key);
        return it == fields.end() ? std::string() : it->second;
    }
};

inline std::vector<Expectation> load_inventory(const fs::path& corpus)
{
    std::vector<Expectation> out;
    for (const auto& app : fs::directory_iterator(corpus)) {
        if (!app.is_directory())
            continue;
        for (const auto& e : fs::recursive_directory_iterator(app.path())) {
            std::error_code ec;
            if (!fs::is_regular_file(e.path(), ec))
                continue;
            std::ifstream in(e.path());
            std::string text;
            int number = 0;
            while (std::getline(in, text)) {
                ++number;
                auto at = text.find("//@ ");
                std::size_t skip = 4;
                if (at == std::string::npos) {
                    at = text.find("#@ ");
                    skip = 3;
                }
                if (at == std::string::npos)
                    continue;
                Expectation x;
                x.app = app.path().filename().string();
                x.file = fs::relative(e.path(), app.path()).generic_string();
                x.line = number;
                std::istringstream fields(text.substr(at + skip));
                std::string kv;
                while (fields >> kv) {
                    auto eq = kv.find('=');
                    x.fields[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
                }
                out.push_back(std::move(x));
            }
        }
    }
    return out;
}

// Reads every regular file below `root` into a FileSet keyed by relative path.
inline FileSet read_tree(const fs::path& root)
{
    FileSet out;
    if (!fs::exists(root))
        return out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        std::error_code ec;
        if (fs::is_regular_file(e.path(), ec))
            out[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
    }
    return out;
}

inline int run(const std::string& command)
{
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace pqscan::testing
