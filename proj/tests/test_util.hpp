#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sc2dec/disasm.hpp"
#include "sc2dec/eval.hpp"
#include "sc2dec/jsonl.hpp"
#include "sc2dec/subprocess.hpp"
#include "sc2dec/toolchain.hpp"
#include "sc2dec/types.hpp"

namespace sc2dec::testing {

inline std::filesystem::path data_dir() { return SC2DEC_DATA_DIR; }
inline std::filesystem::path cli_bin() { return SC2DEC_CLI_BIN; }
inline std::filesystem::path toy_corpus_path() {
    return data_dir() / "toy" / "benchmark_src.jsonl";
}

struct ToyFunction {
    SourceFunction fn;
    std::string harness;
};

inline std::vector<ToyFunction> load_toy_corpus() {
    std::vector<ToyFunction> corpus;
    for (const json& row : read_jsonl(toy_corpus_path())) {
        ToyFunction toy;
        toy.fn = source_function_from_json(row);
        toy.harness = row.value("harness", "");
        corpus.push_back(std::move(toy));
    }
    return corpus;
}

inline CompilerConfig gcc_config(OptLevel level, bool debug = false) {
    CompilerConfig cfg;
    cfg.compiler_id = "gcc";
    cfg.opt_level = level;
    cfg.debug_info = debug;
    cfg.extra_flags = {"-lm"};
    return cfg;
}

// Compiles one function and returns plain and (for debug builds) interleaved
// disassembly. The workdir must outlive objdump's source lookup, so the
// caller owns it.
struct BuiltFunction {
    CompileOutcome outcome;
    std::string raw_plain;        // objdump -d
    std::string raw_interleaved;  // objdump -d -S --source-comment=; (debug builds)
};

inline BuiltFunction build_function(const SourceFunction& fn, const CompilerConfig& cfg,
                                    const std::filesystem::path& workdir) {
    BuiltFunction built;
    built.outcome = compile_function(fn, cfg, OutputKind::shared_library, workdir);
    if (!built.outcome.success) return built;
    built.raw_plain = disassemble(*built.outcome.artifact_path, false);
    if (cfg.debug_info)
        built.raw_interleaved = disassemble(*built.outcome.artifact_path, true);
    return built;
}

inline EvalSample make_eval_sample(const ToyFunction& toy,
                                   const std::string& compiler_id = "gcc") {
    EvalSample sample;
    sample.sample_id = toy.fn.id;
    sample.reference_source = source_text(toy.fn);
    sample.test_harness = toy.harness;
    sample.entry_name = toy.fn.entry_name;
    for (OptLevel level : kAllOptLevels) {
        CompilerConfig cfg = gcc_config(level);
        cfg.compiler_id = compiler_id;
        TempDir workdir("sc2dec-test-bench");
        CompileOutcome outcome =
            compile_function(toy.fn, cfg, OutputKind::shared_library, workdir.path());
        REQUIRE_MESSAGE(outcome.success, toy.fn.id, " at ", to_string(level), ": ",
                        outcome.diagnostics);
        std::string raw = disassemble(*outcome.artifact_path, false);
        sample.asm_by_level[level] = extract_function(raw, toy.fn.entry_name).text;
    }
    return sample;
}

inline std::map<std::string, std::string> answer_map(const std::vector<ToyFunction>& corpus) {
    std::map<std::string, std::string> answers;
    for (const ToyFunction& toy : corpus) answers[toy.fn.id] = source_text(toy.fn);
    return answers;
}

}  // namespace sc2dec::testing
