#pragma once

#include <stdexcept>
#include <string>

namespace sc2dec {

// Tool invocation failures that callers are not expected to recover from
// per-sample. Compile *failures* are verdicts (CompileOutcome.success=false),
// not exceptions.
struct ToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ToolNotFound : ToolError {
    explicit ToolNotFound(const std::string& tool)
        : ToolError("tool not found on PATH: " + tool) {}
};

struct ToolTimeout : ToolError {
    explicit ToolTimeout(const std::string& what) : ToolError(what) {}
};

struct DisassemblyFailed : ToolError {
    explicit DisassemblyFailed(const std::string& what) : ToolError(what) {}
};

struct FunctionNotFound : std::runtime_error {
    explicit FunctionNotFound(const std::string& name)
        : std::runtime_error("function not found in disassembly: " + name) {}
};

struct NoDebugInfo : std::runtime_error {
    explicit NoDebugInfo(const std::string& name)
        : std::runtime_error("no interleaved source lines for function: " + name +
                             " (artifact built without -g?)") {}
};

struct EmptySequence : std::runtime_error {
    EmptySequence() : std::runtime_error("aligned sequence has no blocks") {}
};

struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("cannot build an index over an empty corpus") {}
};

struct UnknownSample : std::runtime_error {
    explicit UnknownSample(const std::string& id)
        : std::runtime_error("record references a sample missing from the benchmark: " + id) {}
};

struct BackendMisconfigured : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetworkError : std::runtime_error {
    NetworkError(const std::string& what, int attempts_made)
        : std::runtime_error(what + " (after " + std::to_string(attempts_made) + " attempts)"),
          attempts(attempts_made) {}
    int attempts;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sc2dec
