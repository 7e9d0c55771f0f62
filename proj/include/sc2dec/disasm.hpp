#pragma once

#include <string>
#include <vector>

#include "sc2dec/types.hpp"

namespace sc2dec {

// One function's cleaned assembly at a specific (compiler, optimization level).
struct AssemblyListing {
    std::string function_name;
    OptLevel opt_level = OptLevel::O0;  // stamped by callers that know the config
    std::string compiler_id;
    std::string text;  // one instruction or label per line, address-free
    std::string raw;   // the objdump excerpt it came from
};

struct AlignedBlock {
    std::vector<std::string> source_lines;  // may be empty for synthesized code
    std::vector<std::string> asm_lines;     // cleaned
};

// Ordered (source-block, asm-block) pairs parsed from interleaved disassembly.
struct AlignedSequence {
    std::string function_name;
    std::vector<AlignedBlock> blocks;
    OptLevel opt_level = OptLevel::O0;
};

// Normalizes an objdump function body: strips the address and opcode-byte
// columns, rewrites `addr <sym+0x..>` targets to `<sym>`, drops `#`-comments,
// nop padding and byte-continuation lines, keeps `addr <sym>:` label lines as
// `sym:`, and collapses blank-line runs. Total and idempotent.
std::string clean_asm(const std::string& raw_region);

// Region from the `<name>:` label up to the next label/section, cleaned.
// Throws FunctionNotFound.
AssemblyListing extract_function(const std::string& raw_objdump, const std::string& name);

// Function symbols of one section in address order.
std::vector<std::string> list_functions(const std::string& raw_objdump,
                                        const std::string& section = ".text");

// Cleaned concatenation of every non-CRT function in .text, in address order.
// This is what a recompiled decompilation result contributes as context asm:
// the model names its functions freely, so extraction cannot go by name.
std::string clean_user_text_asm(const std::string& raw_objdump);

// Parses `-S --source-comment=;` output for one function into blocks: each
// `;`-run opens a block's source lines, the instructions that follow form its
// asm lines. Throws FunctionNotFound; NoDebugInfo when the region has zero
// `;`-lines.
AlignedSequence parse_interleaved(const std::string& raw_objdump_S, const std::string& name);

}  // namespace sc2dec
