#include "sc2dec/toolchain.hpp"

#include <cstdlib>
#include <fstream>

#include "sc2dec/errors.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

namespace fs = std::filesystem;

std::string to_string(OptLevel level) {
    switch (level) {
        case OptLevel::O0: return "O0";
        case OptLevel::O1: return "O1";
        case OptLevel::O2: return "O2";
        case OptLevel::O3: return "O3";
    }
    return "O0";
}

std::optional<OptLevel> parse_opt_level(const std::string& text) {
    for (OptLevel level : kAllOptLevels)
        if (text == to_string(level)) return level;
    return std::nullopt;
}

std::string source_text(const SourceFunction& fn) {
    if (fn.prelude.empty()) return fn.body;
    return fn.prelude + "\n" + fn.body;
}

ToolLimits ToolLimits::from_env() {
    ToolLimits limits;
    if (const char* env = std::getenv("SC2DEC_TOOL_TIMEOUT_S")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0) {
            limits.compile_timeout_s = v;
            limits.run_timeout_s = v;
        }
    }
    return limits;
}

std::string artifact_name(OutputKind kind) {
    switch (kind) {
        case OutputKind::shared_library: return "input.so";
        case OutputKind::object_file: return "input.o";
        case OutputKind::executable: return "prog";
    }
    return "input.so";
}

std::vector<std::string> compile_argv(const CompilerConfig& cfg, OutputKind kind) {
    // order: opt, debug, kind, output, input, extras
    std::vector<std::string> argv;
    argv.push_back(cfg.compiler_id);
    argv.push_back("-" + to_string(cfg.opt_level));
    if (cfg.debug_info) argv.push_back("-g");
    switch (kind) {
        case OutputKind::shared_library:
            argv.push_back("-shared");
            argv.push_back("-fPIC");
            break;
        case OutputKind::object_file:
            argv.push_back("-c");
            break;
        case OutputKind::executable:
            break;
    }
    argv.push_back("-o");
    argv.push_back(artifact_name(kind));
    argv.push_back("input.c");
    for (const auto& flag : cfg.extra_flags) argv.push_back(flag);
    return argv;
}

namespace {

std::string join_argv(const std::vector<std::string>& argv) {
    std::string line;
    for (size_t i = 0; i < argv.size(); ++i) {
        if (i) line += ' ';
        line += argv[i];
    }
    return line;
}

}  // namespace

CompileOutcome compile_source(const std::string& unit, const CompilerConfig& cfg,
                              OutputKind kind, const fs::path& workdir,
                              const ToolLimits& limits) {
    if (!resolve_on_path(cfg.compiler_id)) throw ToolNotFound(cfg.compiler_id);

    fs::create_directories(workdir);
    {
        std::ofstream src(workdir / "input.c", std::ios::binary);
        src << unit;
        if (!unit.empty() && unit.back() != '\n') src << '\n';
    }

    std::vector<std::string> argv = compile_argv(cfg, kind);
    CompileOutcome outcome;
    outcome.command_line = join_argv(argv);

    ProcessResult proc = run_process(argv, workdir, limits.compile_timeout_s);
    if (proc.timed_out)
        throw ToolTimeout("compile exceeded " + std::to_string(limits.compile_timeout_s) +
                          " s: " + outcome.command_line);
    if (proc.exec_failed) throw ToolNotFound(cfg.compiler_id);

    outcome.diagnostics = proc.err;
    fs::path artifact = workdir / artifact_name(kind);
    if (proc.exited_zero() && fs::exists(artifact)) {
        outcome.success = true;
        outcome.artifact_path = artifact;
    } else {
        outcome.success = false;
        std::error_code ec;
        fs::remove(artifact, ec);  // no artifact on failure
    }
    return outcome;
}

CompileOutcome compile_function(const SourceFunction& fn, const CompilerConfig& cfg,
                                OutputKind kind, const fs::path& workdir,
                                const ToolLimits& limits) {
    return compile_source(source_text(fn), cfg, kind, workdir, limits);
}

std::string disassemble(const fs::path& artifact, bool with_source, const ToolLimits& limits) {
    if (!resolve_on_path("objdump")) throw ToolNotFound("objdump");
    std::error_code ec;
    if (!fs::exists(artifact, ec))
        throw DisassemblyFailed("artifact does not exist: " + artifact.string());

    std::vector<std::string> argv = {"objdump", "-d"};
    if (with_source) {
        argv.push_back("-S");
        argv.push_back("--source-comment=;");
    }
    argv.push_back(artifact.filename().string());

    ProcessResult proc = run_process(argv, artifact.parent_path(), limits.compile_timeout_s);
    if (proc.timed_out) throw ToolTimeout("objdump exceeded the wall-clock cap");
    if (proc.exec_failed) throw ToolNotFound("objdump");
    if (proc.term_signal != 0 || proc.exit_code != 0)
        throw DisassemblyFailed("objdump failed on " + artifact.string() + ": " + proc.err);
    return proc.out;
}

RunResult run_executable(const fs::path& artifact, double timeout_s) {
    RunResult result;
    ProcessResult proc = run_process({fs::absolute(artifact).string()},
                                     artifact.parent_path(), timeout_s);
    result.stdout_text = proc.out;
    result.stderr_text = proc.err;
    if (proc.timed_out) {
        result.status = RunStatus::Timeout;
    } else if (proc.term_signal != 0) {
        result.status = RunStatus::Crash;
        result.signal_no = proc.term_signal;
    } else if (proc.exit_code == 0) {
        result.status = RunStatus::Pass;
    } else {
        result.status = RunStatus::Fail;
        result.exit_code = proc.exit_code;
    }
    return result;
}

}  // namespace sc2dec
