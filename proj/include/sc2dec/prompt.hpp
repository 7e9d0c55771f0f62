#pragma once

#include <string>

#include "sc2dec/toolchain.hpp"
#include "sc2dec/types.hpp"

namespace sc2dec {

// chat_style is the GPT-4/Deepseek prompt box; decompile_style the
// llm4decompile one. Both are reproduced byte-for-byte.
enum class TemplateFamily { chat_style, decompile_style };

enum class StrategyKind { vanilla, one_shot, retrieval, sc2dec, one_shot_then_sc2dec };

struct PromptStrategy {
    StrategyKind kind = StrategyKind::vanilla;
    TemplateFamily family = TemplateFamily::decompile_style;
};

// Whether the strategy runs the recompile-and-decompile-again loop.
bool uses_self_context(StrategyKind kind);

enum class Provenance { fixed_one_shot, retrieved, self_constructed };

// An (asm, source) demonstration pair. In every rendered prompt the asm
// precedes the source, and the pair precedes the target asm.
struct ContextExample {
    std::string asm_text;
    std::string source;
    OptLevel opt_level = OptLevel::O0;
    Provenance provenance = Provenance::fixed_one_shot;
};

std::string to_string(TemplateFamily family);
std::string to_string(StrategyKind kind);
std::string to_string(Provenance p);
std::optional<TemplateFamily> parse_family(const std::string& text);
std::optional<StrategyKind> parse_strategy_kind(const std::string& text);
std::optional<Provenance> parse_provenance(const std::string& text);

std::string render_vanilla(const std::string& asm_text, TemplateFamily family);

std::string render_with_context(const ContextExample& example,
                                const std::string& target_asm, TemplateFamily family);

// The shipped handwritten example (if statements, a loop, early returns),
// compiled at the requested level, disassembled and cleaned. Memoized per
// (compiler, level); safe for concurrent readers.
ContextExample fixed_one_shot_example(OptLevel level, const CompilerConfig& toolchain,
                                      const ToolLimits& limits = ToolLimits::from_env());

const SourceFunction& fixed_example_function();

}  // namespace sc2dec
