#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sc2dec/commands.hpp"
#include "sc2dec/errors.hpp"

namespace {

using sc2dec::RunConfig;

// Flag values land here as optionals so a config file can be overlaid first
// and explicit flags still win.
struct Flags {
    std::optional<std::string> config_file;
    std::optional<std::string> backend, endpoint, model, api_key_env, answers;
    std::optional<long> mutator_seed;
    std::optional<int> max_new_tokens;
    std::optional<std::string> compiler, opt_level, strategy, family, context_level;
    std::optional<std::string> corpus, benchmark, tasks, records, index, out;
    std::optional<int> parallelism;
    std::optional<double> timeout;
    std::optional<long> max_samples;
    std::vector<std::string> reject_idents;
    std::vector<std::string> matrix_levels;
    std::vector<std::string> matrix_compilers;
    bool force = false;
    bool no_selfcheck = false;

    RunConfig resolve() const {
        RunConfig cfg;
        if (config_file) {
            std::ifstream in(*config_file);
            if (!in) throw sc2dec::ConfigError("cannot open --config " + *config_file);
            cfg = RunConfig::from_json(nlohmann::json::parse(in));
        }
        if (backend) cfg.backend = *backend;
        if (endpoint) cfg.endpoint_url = *endpoint;
        if (model) cfg.model_name = *model;
        if (api_key_env) cfg.api_key_env = *api_key_env;
        if (answers) cfg.answers_path = *answers;
        if (mutator_seed) cfg.mutator_seed = *mutator_seed;
        if (max_new_tokens) cfg.max_new_tokens = *max_new_tokens;
        if (compiler) cfg.compiler = *compiler;
        if (opt_level) cfg.opt_level = *opt_level;
        if (strategy) cfg.strategy = *strategy;
        if (family) cfg.family = *family;
        if (context_level) cfg.context_level = *context_level;
        if (corpus) cfg.corpus_path = *corpus;
        if (benchmark) cfg.benchmark_path = *benchmark;
        if (tasks) cfg.tasks_path = *tasks;
        if (records) cfg.records_path = *records;
        if (index) cfg.index_path = *index;
        if (out) cfg.out_dir = *out;
        if (parallelism) cfg.parallelism = *parallelism;
        if (timeout) cfg.timeout_s = *timeout;
        if (max_samples) cfg.max_samples = *max_samples;
        if (!reject_idents.empty()) cfg.reject_idents = reject_idents;
        if (!matrix_levels.empty()) cfg.matrix_context_levels = matrix_levels;
        if (!matrix_compilers.empty()) cfg.matrix_compilers = matrix_compilers;
        if (force) cfg.force = true;
        if (no_selfcheck) cfg.no_selfcheck = true;
        return cfg;
    }
};

void add_common_options(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_file, "JSON config file; flags override it");
    cmd->add_option("--backend", flags.backend, "null | echo | mutator | remote");
    cmd->add_option("--endpoint", flags.endpoint, "chat-completions endpoint URL");
    cmd->add_option("--model", flags.model, "remote model name");
    cmd->add_option("--api-key-env", flags.api_key_env, "env var holding the API key");
    cmd->add_option("--answers", flags.answers, "reference map JSONL for echo/mutator");
    cmd->add_option("--seed", flags.mutator_seed, "mutator statement-choice seed");
    cmd->add_option("--max-new-tokens", flags.max_new_tokens, "generation cap");
    cmd->add_option("--compiler", flags.compiler, "compiler id resolved on PATH");
    cmd->add_option("--opt-level", flags.opt_level, "O0|O1|O2|O3 for scoring/context builds");
    cmd->add_option("--strategy", flags.strategy,
                    "vanilla | one_shot | retrieval | sc2dec | one_shot_then_sc2dec");
    cmd->add_option("--family", flags.family, "chat_style | decompile_style");
    cmd->add_option("--context-level", flags.context_level,
                    "fixed level for self-context builds (mismatch experiments)");
    cmd->add_option("--corpus", flags.corpus, "SourceFunction JSONL");
    cmd->add_option("--benchmark", flags.benchmark, "EvalSample JSONL");
    cmd->add_option("--tasks", flags.tasks, "DecompilationTask JSONL");
    cmd->add_option("--records", flags.records, "DecompilationRecord JSONL");
    cmd->add_option("--index", flags.index, "BM25 index JSON");
    cmd->add_option("--out", flags.out, "run directory (default runs/<timestamp>)");
    cmd->add_option("--parallelism", flags.parallelism, "worker pool size");
    cmd->add_option("--timeout", flags.timeout, "tool timeout override, seconds");
    cmd->add_option("--max-samples", flags.max_samples, "cap on corpus samples");
    cmd->add_option("--reject-idents", flags.reject_idents, "reject functions mentioning these")
        ->delimiter(',');
    cmd->add_option("--matrix-context-levels", flags.matrix_levels, "levels for matrix sweeps")
        ->delimiter(',');
    cmd->add_option("--matrix-compilers", flags.matrix_compilers, "compilers for matrix sweeps")
        ->delimiter(',');
    cmd->add_flag("--force", flags.force, "redo existing per-sample outputs");
    cmd->add_flag("--no-selfcheck", flags.no_selfcheck, "skip the benchmark self-check");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sc2dec: self-constructed context decompilation toolkit"};
    app.require_subcommand(1);

    Flags flags;
    std::string retrieve_query;
    int retrieve_top_k = 1;

    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "Build FAE training data (end-to-end + step-by-step) from a corpus");
    CLI::App* decompile =
        app.add_subcommand("decompile", "Run the decompilation pipeline over a task file");
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Score records for re-compilability and re-executability");
    CLI::App* index_cmd =
        app.add_subcommand("index", "Build the BM25 retrieval index from a corpus");
    CLI::App* retrieve =
        app.add_subcommand("retrieve", "Query the BM25 index with an assembly file");
    CLI::App* matrix = app.add_subcommand(
        "matrix", "Sweep context levels and compilers, one report per cell");
    CLI::App* make_benchmark = app.add_subcommand(
        "make-benchmark", "Compile a corpus with harnesses into a benchmark JSONL");
    CLI::App* make_tasks =
        app.add_subcommand("make-tasks", "Derive a task file from a benchmark");

    for (CLI::App* cmd : {synthesize, decompile, evaluate, index_cmd, retrieve, matrix,
                          make_benchmark, make_tasks})
        add_common_options(cmd, flags);

    retrieve->add_option("query", retrieve_query, "file containing the query assembly")
        ->required();
    retrieve->add_option("--top-k", retrieve_top_k, "results to return");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = flags.resolve();
        if (synthesize->parsed()) return sc2dec::cmd_synthesize(cfg);
        if (decompile->parsed()) return sc2dec::cmd_decompile(cfg);
        if (evaluate->parsed()) return sc2dec::cmd_evaluate(cfg);
        if (index_cmd->parsed()) return sc2dec::cmd_index(cfg);
        if (retrieve->parsed()) return sc2dec::cmd_retrieve(cfg, retrieve_query, retrieve_top_k);
        if (matrix->parsed()) return sc2dec::cmd_matrix(cfg);
        if (make_benchmark->parsed()) return sc2dec::cmd_make_benchmark(cfg);
        if (make_tasks->parsed()) return sc2dec::cmd_make_tasks(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
