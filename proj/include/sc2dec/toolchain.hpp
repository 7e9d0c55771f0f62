#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sc2dec/types.hpp"

namespace sc2dec {

struct CompilerConfig {
    std::string compiler_id = "gcc";  // resolved on PATH verbatim
    OptLevel opt_level = OptLevel::O0;
    bool debug_info = false;
    std::vector<std::string> extra_flags;

    bool operator==(const CompilerConfig&) const = default;
};

enum class OutputKind { shared_library, object_file, executable };

struct CompileOutcome {
    bool success = false;
    std::optional<std::filesystem::path> artifact_path;
    std::string diagnostics;  // compiler stderr, verbatim
    std::string command_line;
};

// Wall-clock caps. Defaults: 30 s compile, 10 s run; SC2DEC_TOOL_TIMEOUT_S
// overrides both when set.
struct ToolLimits {
    double compile_timeout_s = 30.0;
    double run_timeout_s = 10.0;

    static ToolLimits from_env();
};

// Flag order is fixed (opt, debug, kind, output, input, extras) so identical
// configs produce identical command lines. Source and artifact use fixed
// names relative to the per-call workdir, which keeps diagnostics free of
// temp paths.
std::vector<std::string> compile_argv(const CompilerConfig& cfg, OutputKind kind);
std::string artifact_name(OutputKind kind);

// Writes `unit` to <workdir>/input.c and compiles it. Throws ToolNotFound /
// ToolTimeout; a failing compile is a returned verdict.
CompileOutcome compile_source(const std::string& unit, const CompilerConfig& cfg,
                              OutputKind kind, const std::filesystem::path& workdir,
                              const ToolLimits& limits = ToolLimits::from_env());

CompileOutcome compile_function(const SourceFunction& fn, const CompilerConfig& cfg,
                                OutputKind kind, const std::filesystem::path& workdir,
                                const ToolLimits& limits = ToolLimits::from_env());

// `objdump -d [-S --source-comment=;] <artifact>`, stdout returned unmodified.
// Runs in the artifact's directory so DWARF source lookup finds input.c.
std::string disassemble(const std::filesystem::path& artifact, bool with_source,
                        const ToolLimits& limits = ToolLimits::from_env());

enum class RunStatus { Pass, Fail, Timeout, Crash };

struct RunResult {
    RunStatus status = RunStatus::Fail;
    int exit_code = 0;   // for Fail
    int signal_no = 0;   // for Crash
    std::string stdout_text;
    std::string stderr_text;
};

// All failure modes are verdict values; Pass iff exit status 0 in time.
RunResult run_executable(const std::filesystem::path& artifact, double timeout_s);

}  // namespace sc2dec
