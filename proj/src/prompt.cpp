#include "sc2dec/prompt.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "sc2dec/disasm.hpp"
#include "sc2dec/errors.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

bool uses_self_context(StrategyKind kind) {
    return kind == StrategyKind::sc2dec || kind == StrategyKind::one_shot_then_sc2dec;
}

std::string to_string(TemplateFamily family) {
    return family == TemplateFamily::chat_style ? "chat_style" : "decompile_style";
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::vanilla: return "vanilla";
        case StrategyKind::one_shot: return "one_shot";
        case StrategyKind::retrieval: return "retrieval";
        case StrategyKind::sc2dec: return "sc2dec";
        case StrategyKind::one_shot_then_sc2dec: return "one_shot_then_sc2dec";
    }
    return "vanilla";
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::fixed_one_shot: return "fixed_one_shot";
        case Provenance::retrieved: return "retrieved";
        case Provenance::self_constructed: return "self_constructed";
    }
    return "fixed_one_shot";
}

std::optional<TemplateFamily> parse_family(const std::string& text) {
    if (text == "chat_style") return TemplateFamily::chat_style;
    if (text == "decompile_style") return TemplateFamily::decompile_style;
    return std::nullopt;
}

std::optional<StrategyKind> parse_strategy_kind(const std::string& text) {
    for (StrategyKind k : {StrategyKind::vanilla, StrategyKind::one_shot, StrategyKind::retrieval,
                           StrategyKind::sc2dec, StrategyKind::one_shot_then_sc2dec})
        if (text == to_string(k)) return k;
    return std::nullopt;
}

std::optional<Provenance> parse_provenance(const std::string& text) {
    for (Provenance p : {Provenance::fixed_one_shot, Provenance::retrieved,
                         Provenance::self_constructed})
        if (text == to_string(p)) return p;
    return std::nullopt;
}

// The two prompt boxes, byte-for-byte. decompile_style has a trailing space
// after the colon.
static constexpr const char* kChatQuestion =
    "What is the C source code of the assembly code below:\n";
static constexpr const char* kDecompileHeader = "# This is the assembly code: \n";
static constexpr const char* kDecompileQuestion = "# What is the source code?\n";

std::string render_vanilla(const std::string& asm_text, TemplateFamily family) {
    if (asm_text.empty())
        throw std::invalid_argument("render_vanilla: assembly text must be nonempty");
    if (family == TemplateFamily::chat_style)
        return std::string(kChatQuestion) + "```asm\n" + asm_text + "\n```\n";
    return std::string(kDecompileHeader) + asm_text + "\n\n" + kDecompileQuestion;
}

std::string render_with_context(const ContextExample& example, const std::string& target_asm,
                                TemplateFamily family) {
    if (example.asm_text.empty())
        throw std::invalid_argument("render_with_context: example asm must be nonempty");
    if (example.source.empty())
        throw std::invalid_argument("render_with_context: example source must be nonempty");

    // The shot is the same template completed with its answer, one blank line,
    // then the target question. Asm first, source second, target last.
    std::string shot;
    if (family == TemplateFamily::chat_style) {
        shot = std::string(kChatQuestion) + "```asm\n" + example.asm_text + "\n```\n" +
               "```c\n" + example.source + "\n```\n";
    } else {
        shot = std::string(kDecompileHeader) + example.asm_text + "\n\n" + kDecompileQuestion +
               example.source + "\n";
    }
    return shot + "\n" + render_vanilla(target_asm, family);
}

const SourceFunction& fixed_example_function() {
    // Handwritten to cover the usual control shapes: if statements, a loop,
    // continue, and early returns.
    static const SourceFunction fn = {
        /*id=*/"fixed_one_shot",
        /*prelude=*/"",
        /*body=*/
        "int score_sequence(const int *values, int count) {\n"
        "    if (count <= 0)\n"
        "        return -1;\n"
        "    int total = 0;\n"
        "    for (int i = 0; i < count; i++) {\n"
        "        if (values[i] < 0)\n"
        "            continue;\n"
        "        total += values[i];\n"
        "        if (total >= 1000)\n"
        "            return 1000;\n"
        "    }\n"
        "    if (total % 2 == 0)\n"
        "        total = total + 1;\n"
        "    return total;\n"
        "}\n",
        /*entry_name=*/"score_sequence"};
    return fn;
}

ContextExample fixed_one_shot_example(OptLevel level, const CompilerConfig& toolchain,
                                      const ToolLimits& limits) {
    static std::mutex cache_mutex;
    static std::map<std::string, ContextExample> cache;

    std::string key = toolchain.compiler_id + "/" + to_string(level);
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const SourceFunction& fn = fixed_example_function();
    CompilerConfig cfg = toolchain;
    cfg.opt_level = level;
    cfg.debug_info = false;

    TempDir workdir("sc2dec-shot");
    CompileOutcome outcome =
        compile_function(fn, cfg, OutputKind::shared_library, workdir.path(), limits);
    if (!outcome.success)
        throw ToolError("fixed one-shot example failed to compile with " + cfg.compiler_id +
                        " at " + to_string(level) + ": " + outcome.diagnostics);

    std::string raw = disassemble(*outcome.artifact_path, /*with_source=*/false, limits);
    AssemblyListing listing = extract_function(raw, fn.entry_name);

    ContextExample example;
    example.asm_text = listing.text;
    example.source = source_text(fn);
    example.opt_level = level;
    example.provenance = Provenance::fixed_one_shot;

    std::lock_guard lock(cache_mutex);
    cache.emplace(key, example);
    return example;
}

}  // namespace sc2dec
