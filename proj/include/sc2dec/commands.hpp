#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sc2dec/backend.hpp"
#include "sc2dec/prompt.hpp"
#include "sc2dec/toolchain.hpp"

namespace sc2dec {

// Declarative run configuration. Loaded from a JSON file, every field
// overridable by a flag; the effective config is echoed into the run
// directory.
struct RunConfig {
    // backend
    std::string backend = "null";  // null | echo | mutator | remote
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env = "SC2DEC_API_KEY";
    long mutator_seed = 1;
    std::string answers_path;  // reference map for echo/mutator (benchmark or corpus JSONL)
    int max_new_tokens = 2048;

    // toolchain
    std::string compiler = "gcc";
    std::string opt_level = "O0";  // scoring/context compiles
    std::vector<std::string> extra_flags = {"-lm"};

    // strategy
    std::string strategy = "sc2dec";
    std::string family = "decompile_style";
    std::optional<std::string> context_level;  // Table-2 style override

    // io
    std::string corpus_path;
    std::string benchmark_path;
    std::string tasks_path;
    std::string records_path;
    std::string index_path;
    std::string out_dir;  // defaults to runs/<timestamp>

    // execution
    int parallelism = 4;
    bool force = false;
    bool no_selfcheck = false;
    std::optional<double> timeout_s;  // overrides both tool timeouts
    long max_samples = 0;
    std::vector<std::string> reject_idents;
    std::vector<std::string> matrix_context_levels = {"O0", "O1", "O2", "O3"};
    std::vector<std::string> matrix_compilers = {"gcc"};

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);

    CompilerConfig toolchain_config() const;
    PromptStrategy prompt_strategy() const;
    std::optional<OptLevel> context_override() const;
    ToolLimits limits() const;
    std::unique_ptr<Backend> make_backend() const;

    // Resolves out_dir (timestamp default), creates it, writes config.json.
    std::filesystem::path prepare_out_dir() const;
};

int cmd_synthesize(const RunConfig& cfg);
int cmd_decompile(const RunConfig& cfg);
int cmd_evaluate(const RunConfig& cfg);
int cmd_index(const RunConfig& cfg);
int cmd_retrieve(const RunConfig& cfg, const std::string& query_asm_path, int top_k);
int cmd_matrix(const RunConfig& cfg);
int cmd_make_benchmark(const RunConfig& cfg);
int cmd_make_tasks(const RunConfig& cfg);

}  // namespace sc2dec
