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

#include <pqscan/patch.hpp>

#include <pqscan/diagnostics.hpp>
#include <pqscan/model.hpp>

#include <algorithm>
#include <charconv>

namespace pqscan {

namespace {

enum class Op { Equal, Delete, Insert };

struct Edit {
    Op op;
    int a; // old index (Equal/Delete)
    int b; // new index (Equal/Insert)
};

// Myers' O(ND) shortest edit script over the middle section [lo, hi).
void myers(const std::vector<std::string>& a, const std::vector<std::string>& b, int a0, int a1, int b0, int b1,
    std::vector<Edit>& out)
{
    const int n = a1 - a0;
    const int m = b1 - b0;
    const int max = n + m;
    if (max == 0)
        return;
    const int off = max + 1;
    std::vector<int> v(2 * max + 3, 0);
    std::vector<std::vector<int>> trace;
    int found_d = -1;
    for (int d = 0; d <= max && found_d < 0; ++d) {
        trace.push_back(v);
        for (int k = -d; k <= d; k += 2) {
            int x = (k == -d || (k != d && v[k - 1 + off] < v[k + 1 + off])) ? v[k + 1 + off] : v[k - 1 + off] + 1;
            int y = x - k;
            while (x < n && y < m && a[a0 + x] == b[b0 + y]) {
                ++x;
                ++y;
            }
            v[k + off] = x;
            if (x >= n && y >= m) {
                found_d = d;
                break;
            }
        }
    }
    std::vector<Edit> rev;
    int x = n;
    int y = m;
    for (int d = found_d; d >= 0; --d) {
        const auto& vd = trace[d];
        const int k = x - y;
        int prev_k;
        if (d == 0)
            prev_k = 0;
        else if (k == -d || (k != d && vd[k - 1 + off] < vd[k + 1 + off]))
            prev_k = k + 1;
        else
            prev_k = k - 1;
        const int prev_x = d == 0 ? 0 : vd[prev_k + off];
        const int prev_y = d == 0 ? 0 : prev_x - prev_k;
        while (x > prev_x && y > prev_y) {
            rev.push_back({Op::Equal, a0 + x - 1, b0 + y - 1});
            --x;
            --y;
        }
        if (d > 0) {
            if (x == prev_x)
                rev.push_back({Op::Insert, a0 + prev_x, b0 + prev_y});
            else
                rev.push_back({Op::Delete, a0 + prev_x, b0 + prev_y});
        }
        x = prev_x;
        y = prev_y;
    }
    out.insert(out.end(), rev.rbegin(), rev.rend());
}

std::vector<Edit> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<Edit> edits;
    int pre = 0;
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    while (pre < n && pre < m && a[pre] == b[pre]) {
        edits.push_back({Op::Equal, pre, pre});
        ++pre;
    }
    int suf = 0;
    while (suf < n - pre && suf < m - pre && a[n - 1 - suf] == b[m - 1 - suf])
        ++suf;
    myers(a, b, pre, n - suf, pre, m - suf, edits);
    for (int s = suf; s > 0; --s)
        edits.push_back({Op::Equal, n - s, m - s});
    return edits;
}

HunkLine hunk_line(char kind, const std::string& line)
{
    HunkLine h;
    h.kind = kind;
    h.no_newline = line.empty() || line.back() != '\n';
    h.text = h.no_newline ? line : line.substr(0, line.size() - 1);
    return h;
}

std::string line_with_terminator(const HunkLine& l)
{
    return l.no_newline ? l.text : l.text + "\n";
}

[[noreturn]] void malformed(int line, const std::string& what)
{
    throw Error(ErrorCode::MalformedDiff, "line " + std::to_string(line) + ": " + what);
}

std::string header_path(std::string_view rest, char prefix)
{
    if (auto tab = rest.find('\t'); tab != std::string_view::npos)
        rest = rest.substr(0, tab);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r'))
        rest.remove_suffix(1);
    if (rest.size() > 2 && rest[0] == prefix && rest[1] == '/')
        rest.remove_prefix(2);
    return std::string(rest);
}

bool parse_range(std::string_view s, int& start, int& count)
{
    auto comma = s.find(',');
    auto first = s.substr(0, comma);
    auto [p, ec] = std::from_chars(first.data(), first.data() + first.size(), start);
    if (ec != std::errc() || p != first.data() + first.size())
        return false;
    count = 1;
    if (comma != std::string_view::npos) {
        auto second = s.substr(comma + 1);
        auto [p2, ec2] = std::from_chars(second.data(), second.data() + second.size(), count);
        if (ec2 != std::errc() || p2 != second.data() + second.size())
            return false;
    }
    return start >= 0 && count >= 0;
}

std::string parent_dir(const std::string& path)
{
    auto slash = path.rfind('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

} // namespace

std::vector<std::string> split_lines(std::string_view text)
{
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            lines.emplace_back(text.substr(pos));
            break;
        }
        lines.emplace_back(text.substr(pos, eol + 1 - pos));
        pos = eol + 1;
    }
    return lines;
}

std::vector<std::string> Patch::new_files() const
{
    std::vector<std::string> out;
    for (const auto& f : files)
        if (f.is_new)
            out.push_back(f.path);
    return out;
}

FilePatch diff_file(const std::string& path, std::string_view before, std::string_view after, int context)
{
    FilePatch fp;
    fp.path = path;
    const auto a = split_lines(before);
    const auto b = split_lines(after);
    const auto edits = edit_script(a, b);
    const int total = static_cast<int>(edits.size());
    int i = 0;
    while (i < total) {
        int c = i;
        while (c < total && edits[c].op == Op::Equal)
            ++c;
        if (c >= total)
            break;
        const int start = std::max(c - context, i == 0 ? 0 : i);
        int last_change = c;
        int j = c;
        while (j < total) {
            if (edits[j].op != Op::Equal)
                last_change = j;
            else if (j - last_change > 2 * context)
                break;
            ++j;
        }
        const int end = std::min(last_change + context + 1, total);

        Hunk h;
        int old_before = 0;
        int new_before = 0;
        if (start < total) {
            const Edit& e = edits[start];
            old_before = e.a;
            new_before = e.b;
        }
        for (int k = start; k < end; ++k) {
            const Edit& e = edits[k];
            switch (e.op) {
            case Op::Equal:
                h.lines.push_back(hunk_line(' ', a[e.a]));
                ++h.old_count;
                ++h.new_count;
                break;
            case Op::Delete:
                h.lines.push_back(hunk_line('-', a[e.a]));
                ++h.old_count;
                break;
            case Op::Insert:
                h.lines.push_back(hunk_line('+', b[e.b]));
                ++h.new_count;
                break;
            }
        }
        h.old_start = h.old_count > 0 ? old_before + 1 : old_before;
        h.new_start = h.new_count > 0 ? new_before + 1 : new_before;
        fp.hunks.push_back(std::move(h));
        i = end;
    }
    return fp;
}

Patch diff_file_sets(const FileSet& before, const FileSet& after, int context)
{
    Patch p;
    std::set<std::string> paths;
    for (const auto& [k, v] : before)
        paths.insert(k);
    for (const auto& [k, v] : after)
        paths.insert(k);
    for (const auto& path : paths) {
        auto b = before.find(path);
        auto a = after.find(path);
        if (b != before.end() && a != after.end()) {
            if (b->second == a->second)
                continue;
            p.files.push_back(diff_file(path, b->second, a->second, context));
        } else if (a != after.end()) {
            FilePatch fp = diff_file(path, "", a->second, context);
            fp.is_new = true;
            p.files.push_back(std::move(fp));
        } else {
            FilePatch fp = diff_file(path, b->second, "", context);
            fp.is_delete = true;
            p.files.push_back(std::move(fp));
        }
    }
    return p;
}

std::string render_patch(const Patch& patch)
{
    std::string out;
    for (const auto& f : patch.files) {
        out += f.is_new ? std::string("--- /dev/null\n") : "--- a/" + f.path + "\n";
        out += f.is_delete ? std::string("+++ /dev/null\n") : "+++ b/" + f.path + "\n";
        for (const auto& h : f.hunks) {
            out += "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_count) + " +"
                + std::to_string(h.new_start) + "," + std::to_string(h.new_count) + " @@\n";
            for (const auto& l : h.lines) {
                out += l.kind;
                out += l.text;
                out += '\n';
                if (l.no_newline)
                    out += "\\ No newline at end of file\n";
            }
        }
    }
    return out;
}

Patch parse_patch(std::string_view text)
{
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view l = text.substr(pos, eol - pos);
        if (!l.empty() && l.back() == '\r')
            l.remove_suffix(1);
        lines.push_back(l);
        pos = eol + 1;
    }

    Patch patch;
    std::size_t i = 0;
    auto git_header = [](std::string_view l) {
        return l.starts_with("diff ") || l.starts_with("index ") || l.starts_with("new file mode")
            || l.starts_with("deleted file mode") || l.starts_with("old mode") || l.starts_with("new mode")
            || l.starts_with("similarity index");
    };
    while (i < lines.size()) {
        const std::string_view l = lines[i];
        const int lineno = static_cast<int>(i) + 1;
        if (l.empty() || git_header(l)) {
            ++i;
            continue;
        }
        if (!l.starts_with("--- "))
            malformed(lineno, "expected a '---' file header");
        if (i + 1 >= lines.size() || !lines[i + 1].starts_with("+++ "))
            malformed(lineno + 1, "expected a '+++' file header");
        const std::string old_path = header_path(l.substr(4), 'a');
        const std::string new_path = header_path(lines[i + 1].substr(4), 'b');
        FilePatch fp;
        fp.is_new = old_path == "/dev/null";
        fp.is_delete = new_path == "/dev/null";
        if (fp.is_new && fp.is_delete)
            malformed(lineno, "both sides are /dev/null");
        if (!fp.is_new && !fp.is_delete && old_path != new_path)
            malformed(lineno, "renames are not supported (" + old_path + " -> " + new_path + ")");
        fp.path = fp.is_new ? new_path : old_path;
        if (fp.path.empty())
            malformed(lineno, "empty path");
        i += 2;

        while (i < lines.size() && lines[i].starts_with("@@")) {
            const std::string_view hl = lines[i];
            const int hline = static_cast<int>(i) + 1;
            auto close = hl.find(" @@", 2);
            if (!hl.starts_with("@@ -") || close == std::string_view::npos)
                malformed(hline, "bad hunk header");
            auto ranges = hl.substr(4, close - 4);
            auto plus = ranges.find(" +");
            if (plus == std::string_view::npos)
                malformed(hline, "bad hunk header");
            Hunk h;
            if (!parse_range(ranges.substr(0, plus), h.old_start, h.old_count)
                || !parse_range(ranges.substr(plus + 2), h.new_start, h.new_count))
                malformed(hline, "bad hunk range");
            ++i;
            int old_seen = 0;
            int new_seen = 0;
            while (old_seen < h.old_count || new_seen < h.new_count) {
                if (i >= lines.size())
                    malformed(static_cast<int>(i), "hunk ends early");
                const std::string_view body = lines[i];
                if (body.starts_with("\\")) {
                    if (h.lines.empty())
                        malformed(static_cast<int>(i) + 1, "stray no-newline marker");
                    h.lines.back().no_newline = true;
                    ++i;
                    continue;
                }
                const char kind = body.empty() ? ' ' : body[0];
                if (kind != ' ' && kind != '-' && kind != '+')
                    malformed(static_cast<int>(i) + 1, "unexpected line in hunk");
                HunkLine line;
                line.kind = kind;
                line.text = body.empty() ? std::string() : std::string(body.substr(1));
                if (kind != '+')
                    ++old_seen;
                if (kind != '-')
                    ++new_seen;
                if (old_seen > h.old_count || new_seen > h.new_count)
                    malformed(static_cast<int>(i) + 1, "hunk longer than its header says");
                h.lines.push_back(std::move(line));
                ++i;
            }
            if (i < lines.size() && lines[i].starts_with("\\")) {
                if (h.lines.empty())
                    malformed(static_cast<int>(i) + 1, "stray no-newline marker");
                h.lines.back().no_newline = true;
                ++i;
            }
            fp.hunks.push_back(std::move(h));
        }
        if (fp.hunks.empty() && !fp.is_new && !fp.is_delete)
            malformed(lineno, "file section without hunks");
        patch.files.push_back(std::move(fp));
    }
    if (patch.files.empty())
        throw Error(ErrorCode::MalformedDiff, "no file sections");
    return patch;
}

FileSet apply_patch(const FileSet& files, const Patch& patch)
{
    std::set<std::string> dirs;
    for (const auto& [path, content] : files)
        dirs.insert(parent_dir(path));

    FileSet out = files;
    for (const auto& fp : patch.files) {
        auto norm = normalize_relative_path(fp.path);
        if (!norm || *norm != fp.path)
            throw Error(ErrorCode::PathEscape, "path '" + fp.path + "' leaves the task context");
        const std::string& path = *norm;
        if (fp.is_new) {
            if (!dirs.contains(parent_dir(path)))
                throw Error(ErrorCode::PathEscape, "new file '" + path + "' is outside the context directories");
            if (out.contains(path))
                throw Error(ErrorCode::ContextMismatch, path + ":0: file already exists");
        } else if (!files.contains(path)) {
            throw Error(ErrorCode::PathEscape, "file '" + path + "' is not in the task context");
        }

        const auto original = fp.is_new ? std::vector<std::string>() : split_lines(out[path]);
        std::string result;
        std::size_t cursor = 0;
        for (const auto& h : fp.hunks) {
            std::size_t pos = h.old_count > 0 ? static_cast<std::size_t>(h.old_start - 1)
                                              : static_cast<std::size_t>(h.old_start);
            if (h.old_count > 0 && h.old_start == 0)
                throw Error(ErrorCode::ContextMismatch, path + ":0: hunk starts before the file");
            if (pos < cursor || pos > original.size())
                throw Error(ErrorCode::ContextMismatch, path + ":" + std::to_string(h.old_start)
                        + ": hunk is out of order or past the end of the file");
            for (std::size_t k = cursor; k < pos; ++k)
                result += original[k];
            std::size_t at = pos;
            for (const auto& l : h.lines) {
                if (l.kind == '+') {
                    result += line_with_terminator(l);
                    continue;
                }
                if (at >= original.size() || original[at] != line_with_terminator(l))
                    throw Error(ErrorCode::ContextMismatch,
                        path + ":" + std::to_string(at + 1) + ": context does not match");
                if (l.kind == ' ')
                    result += original[at];
                ++at;
            }
            cursor = at;
        }
        for (std::size_t k = cursor; k < original.size(); ++k)
            result += original[k];
        if (fp.is_delete)
            out.erase(path);
        else
            out[path] = std::move(result);
    }
    return out;
}

} // namespace pqscan
