#include "sc2dec/disasm.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "sc2dec/errors.hpp"
#include "sc2dec/strutil.hpp"

namespace sc2dec {

namespace {

bool is_hex(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) || (c >= 'a' && c <= 'f');
    });
}

// "0000000000001040 <deregister_tm_clones>:"
bool parse_label_line(std::string_view line, std::string* name) {
    if (line.empty() || !std::isxdigit(static_cast<unsigned char>(line[0]))) return false;
    size_t sp = line.find(' ');
    if (sp == std::string_view::npos || !is_hex(line.substr(0, sp))) return false;
    std::string_view rest = trim_view(line.substr(sp + 1));
    if (rest.size() < 3 || rest.front() != '<' || !ends_with(rest, ">:")) return false;
    if (name) *name = std::string(rest.substr(1, rest.size() - 3));
    return true;
}

bool is_section_header(std::string_view line, std::string* section) {
    constexpr std::string_view kPrefix = "Disassembly of section ";
    if (!starts_with(line, kPrefix) || !ends_with(line, ":")) return false;
    if (section)
        *section = std::string(line.substr(kPrefix.size(), line.size() - kPrefix.size() - 1));
    return true;
}

// "  10f9:\tf3 0f 1e fa \tendbr64" -> {addr, bytes, mnemonic}. A line with an
// address and bytes but no third field is the continuation of a long
// encoding.
struct InstrParts {
    bool is_instruction = false;
    bool is_continuation = false;
    std::string mnemonic;  // tail field(s), unnormalized
};

InstrParts parse_instruction_line(std::string_view line) {
    InstrParts parts;
    auto fields = split_on(line, '\t');
    if (fields.size() < 2) return parts;
    std::string addr = trim(fields[0]);
    if (addr.size() < 2 || addr.back() != ':' || !is_hex(std::string_view(addr).substr(0, addr.size() - 1)))
        return parts;
    if (fields.size() == 2) {
        parts.is_continuation = true;
        return parts;
    }
    parts.is_instruction = true;
    std::string tail = fields[2];
    for (size_t i = 3; i < fields.size(); ++i) tail += " " + fields[i];
    parts.mnemonic = tail;
    return parts;
}

// "je 1135 <f0+0x2c>" -> "je <f0>". The bare hex token must not be the
// line's first word, which keeps hex-alphabet mnemonics (add, dec, ...) out
// of reach and makes the rewrite idempotent.
std::string rewrite_symbol_targets(const std::string& text) {
    std::vector<std::string> words = split_on(text, ' ');
    std::vector<std::string> out;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i > 0 && i + 1 < words.size() && is_hex(words[i]) && words[i + 1].size() >= 2 &&
            words[i + 1].front() == '<' && words[i + 1].back() == '>') {
            std::string sym = words[i + 1].substr(1, words[i + 1].size() - 2);
            size_t plus = sym.find('+');
            if (plus != std::string::npos) sym = sym.substr(0, plus);
            out.push_back("<" + sym + ">");
            ++i;
            continue;
        }
        out.push_back(words[i]);
    }
    std::string joined;
    for (size_t i = 0; i < out.size(); ++i) {
        if (i) joined += ' ';
        joined += out[i];
    }
    return joined;
}

// Instruction text -> cleaned line, or nullopt when the line is dropped.
std::optional<std::string> clean_instruction(const std::string& mnemonic_field) {
    std::string text = mnemonic_field;
    size_t hash = text.find('#');
    if (hash != std::string::npos) text.resize(hash);
    text = collapse_spaces(text);
    if (text.empty()) return std::nullopt;
    if (starts_with(text, "nop")) return std::nullopt;  // alignment padding
    return rewrite_symbol_targets(text);
}

const std::unordered_set<std::string>& crt_helper_names() {
    static const std::unordered_set<std::string> names = {
        "deregister_tm_clones", "register_tm_clones", "__do_global_dtors_aux",
        "frame_dummy",          "call_weak_fn",       "_init",
        "_fini",                "_start",             "__libc_csu_init",
        "__libc_csu_fini",      "_dl_relocate_static_pie"};
    return names;
}

// [begin, end) line range of the named function's region, label included.
std::pair<size_t, size_t> function_region(const std::vector<std::string>& lines,
                                          const std::string& name) {
    size_t begin = lines.size();
    std::string label;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (parse_label_line(lines[i], &label) && label == name) {
            begin = i;
            break;
        }
    }
    if (begin == lines.size()) throw FunctionNotFound(name);
    size_t end = begin + 1;
    while (end < lines.size() && !parse_label_line(lines[end], nullptr) &&
           !is_section_header(lines[end], nullptr))
        ++end;
    return {begin, end};
}

}  // namespace

std::string clean_asm(const std::string& raw_region) {
    std::vector<std::string> out;
    bool last_blank = false;
    for (const std::string& line : split_lines(raw_region)) {
        std::string trimmed = trim(line);
        if (trimmed.empty()) {
            if (!out.empty() && !last_blank) {
                out.emplace_back();
                last_blank = true;
            }
            continue;
        }
        if (trimmed == "..." || trimmed[0] == ';') continue;

        std::string cleaned;
        std::string label;
        if (parse_label_line(trimmed, &label)) {
            cleaned = label + ":";
        } else {
            InstrParts parts = parse_instruction_line(line);
            if (parts.is_continuation) continue;
            if (parts.is_instruction) {
                auto instr = clean_instruction(parts.mnemonic);
                if (!instr) continue;
                cleaned = *instr;
            } else {
                cleaned = rtrim(line);  // already-clean or foreign text passes through
            }
        }
        out.push_back(std::move(cleaned));
        last_blank = false;
    }
    while (!out.empty() && out.back().empty()) out.pop_back();
    return join_lines(out);
}

AssemblyListing extract_function(const std::string& raw_objdump, const std::string& name) {
    std::vector<std::string> lines = split_lines(raw_objdump);
    auto [begin, end] = function_region(lines, name);

    AssemblyListing listing;
    listing.function_name = name;
    std::vector<std::string> region(lines.begin() + begin, lines.begin() + end);
    listing.raw = join_lines(region);
    listing.text = clean_asm(listing.raw);
    return listing;
}

std::vector<std::string> list_functions(const std::string& raw_objdump,
                                        const std::string& section) {
    std::vector<std::string> names;
    std::string current_section;
    std::string scratch;
    for (const std::string& line : split_lines(raw_objdump)) {
        if (is_section_header(line, &scratch)) {
            current_section = scratch;
            continue;
        }
        if (current_section == section && parse_label_line(line, &scratch))
            names.push_back(scratch);
    }
    return names;
}

std::string clean_user_text_asm(const std::string& raw_objdump) {
    std::vector<std::string> pieces;
    for (const std::string& name : list_functions(raw_objdump, ".text")) {
        if (crt_helper_names().count(name)) continue;
        pieces.push_back(extract_function(raw_objdump, name).text);
    }
    std::string joined;
    for (size_t i = 0; i < pieces.size(); ++i) {
        if (i) joined += '\n';
        joined += pieces[i];
    }
    return joined;
}

AlignedSequence parse_interleaved(const std::string& raw_objdump_S, const std::string& name) {
    std::vector<std::string> lines = split_lines(raw_objdump_S);
    auto [begin, end] = function_region(lines, name);

    AlignedSequence seq;
    seq.function_name = name;

    AlignedBlock current;
    bool saw_source = false;
    auto flush = [&] {
        if (!current.source_lines.empty() || !current.asm_lines.empty())
            seq.blocks.push_back(std::move(current));
        current = AlignedBlock{};
    };

    for (size_t i = begin; i < end; ++i) {
        const std::string& line = lines[i];
        if (!line.empty() && line[0] == ';') {
            saw_source = true;
            if (!current.asm_lines.empty()) flush();
            current.source_lines.push_back(line.substr(1));
            continue;
        }
        std::string label;
        if (parse_label_line(trim(line), &label)) {
            current.asm_lines.push_back(label + ":");
            continue;
        }
        InstrParts parts = parse_instruction_line(line);
        if (!parts.is_instruction) continue;
        auto cleaned = clean_instruction(parts.mnemonic);
        if (cleaned) current.asm_lines.push_back(std::move(*cleaned));
    }
    flush();

    if (!saw_source) throw NoDebugInfo(name);

    // A trailing source-only group has no instructions of its own; keep its
    // text with the preceding block.
    if (!seq.blocks.empty() && seq.blocks.back().asm_lines.empty() && seq.blocks.size() > 1) {
        AlignedBlock tail = std::move(seq.blocks.back());
        seq.blocks.pop_back();
        auto& prev = seq.blocks.back();
        prev.source_lines.insert(prev.source_lines.end(), tail.source_lines.begin(),
                                 tail.source_lines.end());
    }
    return seq;
}

}  // namespace sc2dec
