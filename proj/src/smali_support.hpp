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

// Line-level helpers for smali disassembly. Internal to the library.

#include <pqscan/lexer.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pqscan::smali {

struct Line {
    int number = 1;
    std::size_t offset = 0;      // offset of the first non-blank character
    std::string_view text;       // masked text, trimmed
};

// Non-blank lines of `range`, in order.
std::vector<Line> lines_in(const LexedUnit& unit, ByteRange range);

struct Invoke {
    std::string opcode;
    std::vector<std::string> registers;
    std::vector<std::size_t> register_offsets; // absolute offsets
    std::string class_descriptor;              // "Ljava/security/MessageDigest;"
    std::string member;                        // "getInstance"
    std::string signature;                     // "(Ljava/lang/String;)Ljava/security/MessageDigest;"
    bool is_static = false;

    // Registers holding declared arguments (drops the receiver).
    std::vector<std::string> argument_registers() const;
};

std::optional<Invoke> parse_invoke(const Line& line);

// "v0 .. v3" -> v0 v1 v2 v3
std::vector<std::string> expand_registers(std::string_view list);

struct Instruction {
    std::string opcode;
    std::vector<std::string> operands; // comma separated, trimmed
    std::vector<std::size_t> operand_offsets;
};

Instruction parse_instruction(const Line& line);

// True when the instruction's first operand is a register it writes.
bool writes_first_register(std::string_view opcode);

bool is_label(const Line& line);

// Parses smali/Java integer literal text ("0x400", "-0x1", "2048", "16L").
std::optional<long long> parse_int_literal(std::string_view text);

} // namespace pqscan::smali
