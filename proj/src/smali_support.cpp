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

#include "smali_support.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace pqscan::smali {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<Line> lines_in(const LexedUnit& unit, ByteRange range)
{
    std::vector<Line> out;
    const std::string& t = unit.masked().text;
    std::size_t pos = unit.lines().line_start(unit.lines().position(range.begin).first);
    const std::size_t end = std::min(range.end, t.size());
    while (pos < end) {
        auto eol = t.find('\n', pos);
        if (eol == std::string::npos)
            eol = t.size();
        std::string_view line(t.data() + pos, eol - pos);
        auto first = line.find_first_not_of(" \t\r");
        if (first != std::string_view::npos) {
            auto last = line.find_last_not_of(" \t\r");
            Line l;
            l.offset = pos + first;
            l.number = unit.lines().position(pos).first;
            l.text = line.substr(first, last - first + 1);
            out.push_back(l);
        }
        pos = eol + 1;
    }
    return out;
}

std::vector<std::string> expand_registers(std::string_view list)
{
    std::vector<std::string> regs;
    list = trim(list);
    if (list.empty())
        return regs;
    if (auto dots = list.find(".."); dots != std::string_view::npos) {
        auto a = trim(list.substr(0, dots));
        auto b = trim(list.substr(dots + 2));
        int lo = 0;
        int hi = -1;
        if (a.size() > 1 && b.size() > 1 && a[0] == b[0]) {
            std::from_chars(a.data() + 1, a.data() + a.size(), lo);
            std::from_chars(b.data() + 1, b.data() + b.size(), hi);
        }
        for (int r = lo; r <= hi; ++r)
            regs.push_back(std::string(1, a[0]) + std::to_string(r));
        return regs;
    }
    std::size_t start = 0;
    while (start <= list.size()) {
        auto comma = list.find(',', start);
        auto reg = trim(list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!reg.empty())
            regs.emplace_back(reg);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return regs;
}

std::vector<std::string> Invoke::argument_registers() const
{
    if (is_static || registers.empty())
        return registers;
    return {registers.begin() + 1, registers.end()};
}

std::optional<Invoke> parse_invoke(const Line& line)
{
    const std::string_view t = line.text;
    if (!t.starts_with("invoke-"))
        return std::nullopt;
    Invoke inv;
    auto ws = t.find_first_of(" \t");
    if (ws == std::string_view::npos)
        return std::nullopt;
    inv.opcode = std::string(t.substr(0, ws));
    inv.is_static = inv.opcode.starts_with("invoke-static");
    auto lb = t.find('{', ws);
    auto rb = t.find('}', ws);
    if (lb == std::string_view::npos || rb == std::string_view::npos || rb < lb)
        return std::nullopt;
    auto list = t.substr(lb + 1, rb - lb - 1);
    inv.registers = expand_registers(list);
    for (const auto& r : inv.registers) {
        auto p = list.find(r);
        inv.register_offsets.push_back(line.offset + lb + 1 + (p == std::string_view::npos ? 0 : p));
    }
    auto arrow = t.find("->", rb);
    auto comma = t.find(',', rb);
    if (arrow == std::string_view::npos || comma == std::string_view::npos || comma > arrow)
        return std::nullopt;
    inv.class_descriptor = std::string(trim(t.substr(comma + 1, arrow - comma - 1)));
    auto paren = t.find('(', arrow);
    if (paren == std::string_view::npos)
        return std::nullopt;
    inv.member = std::string(trim(t.substr(arrow + 2, paren - arrow - 2)));
    inv.signature = std::string(trim(t.substr(paren)));
    return inv;
}

Instruction parse_instruction(const Line& line)
{
    Instruction ins;
    const std::string_view t = line.text;
    auto ws = t.find_first_of(" \t");
    ins.opcode = std::string(t.substr(0, ws));
    if (ws == std::string_view::npos)
        return ins;
    std::size_t pos = ws;
    // Operands are comma separated; a quoted operand is masked, so commas
    // inside string constants never appear here.
    while (pos < t.size()) {
        auto comma = t.find(',', pos + 1);
        std::size_t begin = pos + (t[pos] == ',' ? 1 : 0);
        auto piece = t.substr(begin, comma == std::string_view::npos ? std::string_view::npos : comma - begin);
        auto lead = piece.find_first_not_of(" \t");
        auto trimmed = trim(piece);
        if (!trimmed.empty()) {
            ins.operands.emplace_back(trimmed);
            ins.operand_offsets.push_back(line.offset + begin + (lead == std::string_view::npos ? 0 : lead));
        }
        if (comma == std::string_view::npos)
            break;
        pos = comma;
    }
    return ins;
}

bool writes_first_register(std::string_view op)
{
    static constexpr std::string_view kNonWriting[] = {
        "invoke", "if-", "goto", "return", "throw", "monitor-", "fill-array-data", "sput", "iput", "aput",
        "packed-switch", "sparse-switch", "nop", "check-cast", "filled-new-array",
    };
    if (op.empty() || op.front() == '.' || op.front() == ':')
        return false;
    for (auto p : kNonWriting)
        if (op.starts_with(p))
            return false;
    return true;
}

bool is_label(const Line& line)
{
    return !line.text.empty() && line.text.front() == ':';
}

std::optional<long long> parse_int_literal(std::string_view text)
{
    text = trim(text);
    bool neg = false;
    if (!text.empty() && text.front() == '-') {
        neg = true;
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == 'L' || text.back() == 'l' || text.back() == 's' || text.back() == 't'))
        text.remove_suffix(1);
    std::string digits;
    for (char c : text)
        if (c != '_')
            digits += c;
    int base = 10;
    std::string_view d = digits;
    if (d.size() > 2 && d[0] == '0' && (d[1] == 'x' || d[1] == 'X')) {
        base = 16;
        d.remove_prefix(2);
    }
    if (d.empty())
        return std::nullopt;
    long long v = 0;
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), v, base);
    if (ec != std::errc() || ptr != d.data() + d.size())
        return std::nullopt;
    return neg ? -v : v;
}

} // namespace pqscan::smali
