#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sc2dec/backend.hpp"
#include "sc2dec/prompt.hpp"
#include "sc2dec/retrieval.hpp"
#include "sc2dec/toolchain.hpp"

namespace sc2dec {

struct DecompilationTask {
    std::string sample_id;
    std::string target_asm;
    OptLevel opt_level = OptLevel::O0;
    PromptStrategy strategy;
    CompilerConfig context_compiler;
    // Absent: the context build uses opt_level. Set: Table-2 style mismatch runs.
    std::optional<OptLevel> context_opt_level_override;
};

// Full trace of one run. rounds=2 iff the strategy includes the self-context
// loop and round 1 compiled; final_output = initial_output whenever rounds=1.
struct DecompilationRecord {
    std::string sample_id;
    OptLevel opt_level = OptLevel::O0;
    StrategyKind strategy = StrategyKind::vanilla;
    std::string initial_prompt;
    std::string initial_output;
    bool initial_compilable = false;
    std::optional<ContextExample> context;
    std::string final_prompt;
    std::string final_output;
    int rounds = 1;
    std::string diagnostics;
};

struct PipelineEnv {
    Backend* backend = nullptr;
    ToolLimits limits = ToolLimits::from_env();
    const AsmIndex* retrieval_index = nullptr;  // required for retrieval strategies
    int extra_rounds = 1;                       // self-context iterations after round 1
    std::filesystem::path scratch_root;         // per-task workdirs live under here
    int max_new_tokens = 2048;
};

// The four-step loop: decompile; recompile the result; build the (asm, source)
// context from it; decompile the ORIGINAL asm again with that context. A
// non-compilable round-1 output is a fallback, never an error.
DecompilationRecord run_sc2dec(const DecompilationTask& task, const PipelineEnv& env);

// Prepends a standard-header prelude unless the code already has include
// directives.
std::string wrap_translation_unit(const std::string& decompiled);

}  // namespace sc2dec
