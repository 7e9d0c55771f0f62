#pragma once

#include <map>
#include <string>
#include <vector>

#include "sc2dec/pipeline.hpp"
#include "sc2dec/toolchain.hpp"
#include "sc2dec/types.hpp"

namespace sc2dec {

struct EvalSample {
    std::string sample_id;
    std::string reference_source;
    std::string test_harness;  // a main() with assertions, exits 0 on success
    std::map<OptLevel, std::string> asm_by_level;
    std::string entry_name;
};

struct LevelTally {
    int recompilable = 0;
    int reexecutable = 0;
    int total = 0;

    double recompilable_pct() const { return total ? 100.0 * recompilable / total : 0.0; }
    double reexecutable_pct() const { return total ? 100.0 * reexecutable / total : 0.0; }
};

struct SampleVerdict {
    std::string sample_id;
    OptLevel opt_level = OptLevel::O0;
    bool recompilable = false;
    bool reexecutable = false;
};

struct EvalReport {
    std::map<OptLevel, LevelTally> levels;  // always all four levels
    std::vector<SampleVerdict> rows;        // sorted by (sample_id, level)
    double avg_recompilable_pct = 0.0;      // mean of the four level percentages
    double avg_reexecutable_pct = 0.0;
};

struct EvalOptions {
    ToolLimits limits = ToolLimits::from_env();
    std::filesystem::path scratch_root;
    int parallelism = 4;
};

// Compile-stage check: wrap_translation_unit(decompiled) builds as a shared
// library. Whitespace-only text is not compilable. Propagates ToolNotFound.
bool score_recompilability(const std::string& decompiled, const CompilerConfig& toolchain,
                           const std::filesystem::path& workdir,
                           const ToolLimits& limits = ToolLimits::from_env());

// (decompiled unit + test harness) builds as an executable AND runs to exit 0.
bool score_reexecutability(const std::string& decompiled, const EvalSample& sample,
                           const CompilerConfig& toolchain,
                           const std::filesystem::path& workdir,
                           const ToolLimits& limits = ToolLimits::from_env(),
                           double timeout_s = 10.0);

// Scores each record's final_output on both metrics and aggregates per level.
// Throws UnknownSample for records outside the benchmark.
EvalReport evaluate_run(const std::vector<DecompilationRecord>& records,
                        const std::vector<EvalSample>& benchmark,
                        const CompilerConfig& toolchain, const EvalOptions& options);

// Scoring the references must yield exactly 100/100 before a model run is
// accepted; returns per-failure messages, empty when the benchmark is sound.
std::vector<std::string> verify_benchmark(const std::vector<EvalSample>& benchmark,
                                          const CompilerConfig& toolchain,
                                          const EvalOptions& options);

// Aligned-column table mirroring the paper's report layout (O0..O3 + AVG).
std::string render_report_table(const EvalReport& report);

}  // namespace sc2dec
