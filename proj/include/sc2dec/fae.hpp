#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sc2dec/disasm.hpp"
#include "sc2dec/toolchain.hpp"
#include "sc2dec/types.hpp"

namespace sc2dec {

enum class ExampleKind { end_to_end, step_by_step };

std::string to_string(ExampleKind kind);
std::optional<ExampleKind> parse_example_kind(const std::string& text);

struct TrainingExample {
    ExampleKind kind = ExampleKind::end_to_end;
    std::string sample_id;
    OptLevel opt_level = OptLevel::O0;
    std::string prompt;      // the asm-bearing input
    std::string completion;  // full source, or interleaved blocks + full source
};

struct SkipRecord {
    std::string sample_id;
    OptLevel opt_level = OptLevel::O0;
    std::string reason;
};

struct SynthesisResult {
    std::vector<TrainingExample> examples;  // deterministic (corpus x level) order
    std::vector<SkipRecord> skips;
};

struct FaeOptions {
    std::filesystem::path scratch_root;
    int parallelism = 4;
    long max_samples = 0;                     // 0 = no cap
    std::vector<std::string> reject_idents;   // lexical reject-list
    ToolLimits limits = ToolLimits::from_env();
    // (sample_id, level, kind) -> already synthesized? resumption hook.
    std::function<bool(const std::string&, OptLevel, ExampleKind)> already_done;
};

// Asm lines bare, source lines with the objdump ';' prefix, one blank line,
// then the complete source. Empty-source blocks fold into the neighboring
// group so the segments strictly alternate. Throws EmptySequence.
std::string serialize_step_by_step(const AlignedSequence& seq, const std::string& full_source);

// compile -> disassemble -> parse -> reorganize, per (function, level). Every
// config must have debug_info=true. Per-sample failures become skip records.
SynthesisResult synthesize(const std::vector<SourceFunction>& corpus,
                           const std::vector<CompilerConfig>& compilers,
                           const FaeOptions& options);

}  // namespace sc2dec
