#include "sc2dec/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

#include "sc2dec/disasm.hpp"
#include "sc2dec/errors.hpp"
#include "sc2dec/eval.hpp"
#include "sc2dec/fae.hpp"
#include "sc2dec/jsonl.hpp"
#include "sc2dec/parallel.hpp"
#include "sc2dec/pipeline.hpp"
#include "sc2dec/retrieval.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

namespace fs = std::filesystem;

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = {
        {"backend", backend},
        {"endpoint_url", endpoint_url},
        {"model_name", model_name},
        {"api_key_env", api_key_env},
        {"mutator_seed", mutator_seed},
        {"answers_path", answers_path},
        {"max_new_tokens", max_new_tokens},
        {"compiler", compiler},
        {"opt_level", opt_level},
        {"extra_flags", extra_flags},
        {"strategy", strategy},
        {"family", family},
        {"corpus_path", corpus_path},
        {"benchmark_path", benchmark_path},
        {"tasks_path", tasks_path},
        {"records_path", records_path},
        {"index_path", index_path},
        {"out_dir", out_dir},
        {"parallelism", parallelism},
        {"force", force},
        {"no_selfcheck", no_selfcheck},
        {"max_samples", max_samples},
        {"reject_idents", reject_idents},
        {"matrix_context_levels", matrix_context_levels},
        {"matrix_compilers", matrix_compilers},
    };
    if (context_level) j["context_level"] = *context_level;
    if (timeout_s) j["timeout_s"] = *timeout_s;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig cfg;
    cfg.backend = j.value("backend", cfg.backend);
    cfg.endpoint_url = j.value("endpoint_url", cfg.endpoint_url);
    cfg.model_name = j.value("model_name", cfg.model_name);
    cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
    cfg.mutator_seed = j.value("mutator_seed", cfg.mutator_seed);
    cfg.answers_path = j.value("answers_path", cfg.answers_path);
    cfg.max_new_tokens = j.value("max_new_tokens", cfg.max_new_tokens);
    cfg.compiler = j.value("compiler", cfg.compiler);
    cfg.opt_level = j.value("opt_level", cfg.opt_level);
    cfg.extra_flags = j.value("extra_flags", cfg.extra_flags);
    cfg.strategy = j.value("strategy", cfg.strategy);
    cfg.family = j.value("family", cfg.family);
    if (j.contains("context_level")) cfg.context_level = j.at("context_level").get<std::string>();
    cfg.corpus_path = j.value("corpus_path", cfg.corpus_path);
    cfg.benchmark_path = j.value("benchmark_path", cfg.benchmark_path);
    cfg.tasks_path = j.value("tasks_path", cfg.tasks_path);
    cfg.records_path = j.value("records_path", cfg.records_path);
    cfg.index_path = j.value("index_path", cfg.index_path);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.force = j.value("force", cfg.force);
    cfg.no_selfcheck = j.value("no_selfcheck", cfg.no_selfcheck);
    if (j.contains("timeout_s")) cfg.timeout_s = j.at("timeout_s").get<double>();
    cfg.max_samples = j.value("max_samples", cfg.max_samples);
    cfg.reject_idents = j.value("reject_idents", cfg.reject_idents);
    cfg.matrix_context_levels = j.value("matrix_context_levels", cfg.matrix_context_levels);
    cfg.matrix_compilers = j.value("matrix_compilers", cfg.matrix_compilers);
    return cfg;
}

CompilerConfig RunConfig::toolchain_config() const {
    CompilerConfig tc;
    tc.compiler_id = compiler;
    auto level = parse_opt_level(opt_level);
    if (!level) throw ConfigError("bad --opt-level: " + opt_level);
    tc.opt_level = *level;
    tc.extra_flags = extra_flags;
    return tc;
}

PromptStrategy RunConfig::prompt_strategy() const {
    PromptStrategy s;
    auto kind = parse_strategy_kind(strategy);
    if (!kind) throw ConfigError("bad --strategy: " + strategy);
    auto fam = parse_family(family);
    if (!fam) throw ConfigError("bad --family: " + family);
    s.kind = *kind;
    s.family = *fam;
    return s;
}

std::optional<OptLevel> RunConfig::context_override() const {
    if (!context_level) return std::nullopt;
    auto level = parse_opt_level(*context_level);
    if (!level) throw ConfigError("bad --context-level: " + *context_level);
    return level;
}

ToolLimits RunConfig::limits() const {
    ToolLimits limits = ToolLimits::from_env();
    if (timeout_s && *timeout_s > 0) {
        limits.compile_timeout_s = *timeout_s;
        limits.run_timeout_s = *timeout_s;
    }
    return limits;
}

namespace {

std::map<std::string, std::string> load_answer_map(const std::string& path) {
    if (path.empty())
        throw ConfigError("this backend needs --answers (benchmark or corpus JSONL)");
    std::map<std::string, std::string> answers;
    for (const json& row : read_jsonl(path)) {
        if (row.contains("reference_source")) {
            answers[row.at("sample_id").get<std::string>()] =
                row.at("reference_source").get<std::string>();
        } else if (row.contains("body")) {
            SourceFunction fn = source_function_from_json(row);
            answers[fn.id] = source_text(fn);
        }
    }
    if (answers.empty()) throw ConfigError("no usable answers in " + path);
    return answers;
}

std::string timestamp_dir_name() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    localtime_r(&t, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, "run-%Y%m%d-%H%M%S", &tm);
    return buf;
}

std::vector<EvalSample> load_benchmark(const std::string& path) {
    if (path.empty()) throw ConfigError("missing --benchmark");
    std::vector<EvalSample> samples;
    for (const json& row : read_jsonl(path)) samples.push_back(eval_sample_from_json(row));
    if (samples.empty()) throw ConfigError("benchmark is empty: " + path);
    return samples;
}

void run_selfcheck(const std::vector<EvalSample>& benchmark, const RunConfig& cfg) {
    if (cfg.no_selfcheck) return;
    EvalOptions options;
    options.limits = cfg.limits();
    options.parallelism = cfg.parallelism;
    auto failures = verify_benchmark(benchmark, cfg.toolchain_config(), options);
    if (!failures.empty()) {
        std::string msg = "benchmark self-check failed:";
        for (const auto& f : failures) msg += "\n  " + f;
        throw ConfigError(msg);
    }
}

}  // namespace

std::unique_ptr<Backend> RunConfig::make_backend() const {
    if (backend == "null") return std::make_unique<NullBackend>();
    if (backend == "echo") return std::make_unique<EchoBackend>(load_answer_map(answers_path));
    if (backend == "mutator")
        return std::make_unique<MutatorBackend>(load_answer_map(answers_path), mutator_seed);
    if (backend == "remote") {
        RemoteConfig rc;
        rc.endpoint_url = endpoint_url;
        rc.model_name = model_name;
        rc.api_key_env = api_key_env;
        rc.max_in_flight = std::max(1, parallelism);
        return make_remote_backend(rc);
    }
    throw ConfigError("unknown backend: " + backend +
                      " (expected null, echo, mutator, remote)");
}

fs::path RunConfig::prepare_out_dir() const {
    fs::path dir = out_dir.empty() ? fs::path("runs") / timestamp_dir_name() : fs::path(out_dir);
    fs::create_directories(dir);
    std::ofstream echo(dir / "config.json", std::ios::binary);
    echo << to_json().dump(2) << '\n';
    return dir;
}

int cmd_synthesize(const RunConfig& cfg) {
    if (cfg.corpus_path.empty()) throw ConfigError("missing --corpus");
    std::vector<SourceFunction> corpus;
    for (const json& row : read_jsonl(cfg.corpus_path))
        corpus.push_back(source_function_from_json(row));

    fs::path out = cfg.prepare_out_dir();

    // (sample, level, kind) keys already present in the output files survive
    // a resumed run untouched.
    std::map<std::string, TrainingExample> existing;
    auto key_of = [](const std::string& id, OptLevel level, ExampleKind kind) {
        return id + "\x01" + to_string(level) + "\x01" + to_string(kind);
    };
    if (!cfg.force) {
        for (ExampleKind kind : {ExampleKind::end_to_end, ExampleKind::step_by_step}) {
            for (OptLevel level : kAllOptLevels) {
                fs::path file =
                    out / ("fae_" + to_string(kind) + "_" + to_string(level) + ".jsonl");
                if (!fs::exists(file)) continue;
                for (const json& row : read_jsonl(file)) {
                    TrainingExample ex = training_example_from_json(row);
                    existing[key_of(ex.sample_id, ex.opt_level, ex.kind)] = std::move(ex);
                }
            }
        }
    }

    std::vector<CompilerConfig> compilers;
    for (OptLevel level : kAllOptLevels) {
        CompilerConfig cc = cfg.toolchain_config();
        cc.opt_level = level;
        cc.debug_info = true;
        compilers.push_back(cc);
    }

    FaeOptions options;
    options.parallelism = cfg.parallelism;
    options.max_samples = cfg.max_samples;
    options.reject_idents = cfg.reject_idents;
    options.limits = cfg.limits();
    if (!existing.empty())
        options.already_done = [&](const std::string& id, OptLevel level, ExampleKind kind) {
            return existing.count(key_of(id, level, kind)) > 0;
        };

    SynthesisResult result = synthesize(corpus, compilers, options);

    for (TrainingExample& ex : result.examples)
        existing[key_of(ex.sample_id, ex.opt_level, ex.kind)] = std::move(ex);

    // Emit in corpus x level order per file, deterministically.
    size_t written = 0;
    for (ExampleKind kind : {ExampleKind::end_to_end, ExampleKind::step_by_step}) {
        for (OptLevel level : kAllOptLevels) {
            std::vector<json> rows;
            for (const SourceFunction& fn : corpus) {
                auto it = existing.find(key_of(fn.id, level, kind));
                if (it != existing.end()) rows.push_back(to_json(it->second));
            }
            written += rows.size();
            write_jsonl(out / ("fae_" + to_string(kind) + "_" + to_string(level) + ".jsonl"),
                        rows);
        }
    }

    std::vector<json> skip_rows;
    for (const SkipRecord& skip : result.skips) skip_rows.push_back(to_json(skip));
    write_jsonl(out / "skips.jsonl", skip_rows);

    std::cout << "synthesize: " << written << " examples (" << result.skips.size()
              << " skips) -> " << out.string() << "\n";
    return 0;
}

namespace {

std::vector<DecompilationRecord> run_decompile_tasks(std::vector<DecompilationTask> tasks,
                                                     const RunConfig& cfg,
                                                     const fs::path& records_file) {
    std::map<std::string, DecompilationRecord> done;
    auto key_of = [](const std::string& id, OptLevel level) {
        return id + "\x01" + to_string(level);
    };
    if (!cfg.force && fs::exists(records_file)) {
        for (const json& row : read_jsonl(records_file)) {
            DecompilationRecord rec = record_from_json(row);
            done[key_of(rec.sample_id, rec.opt_level)] = std::move(rec);
        }
    }

    std::unique_ptr<Backend> backend = cfg.make_backend();
    AsmIndex index;
    bool have_index = false;
    bool needs_index = false;
    for (const auto& task : tasks)
        if (task.strategy.kind == StrategyKind::retrieval) needs_index = true;
    if (needs_index) {
        if (cfg.index_path.empty())
            throw ConfigError("retrieval strategy needs --index");
        index = load_index(cfg.index_path);
        have_index = true;
    }

    PipelineEnv env;
    env.backend = backend.get();
    env.limits = cfg.limits();
    env.retrieval_index = have_index ? &index : nullptr;
    env.max_new_tokens = cfg.max_new_tokens;

    std::vector<size_t> todo;
    for (size_t i = 0; i < tasks.size(); ++i)
        if (!done.count(key_of(tasks[i].sample_id, tasks[i].opt_level))) todo.push_back(i);

    std::vector<DecompilationRecord> fresh = parallel_map_ordered<DecompilationRecord>(
        todo.size(), cfg.parallelism,
        [&](size_t i) { return run_sc2dec(tasks[todo[i]], env); });
    for (DecompilationRecord& rec : fresh)
        done[key_of(rec.sample_id, rec.opt_level)] = std::move(rec);

    std::vector<DecompilationRecord> records;
    std::vector<json> rows;
    for (const DecompilationTask& task : tasks) {
        auto it = done.find(key_of(task.sample_id, task.opt_level));
        if (it == done.end()) continue;
        records.push_back(it->second);
        rows.push_back(to_json(it->second));
    }
    write_jsonl(records_file, rows);
    return records;
}

EvalReport evaluate_records(const std::vector<DecompilationRecord>& records,
                            const std::vector<EvalSample>& benchmark, const RunConfig& cfg) {
    EvalOptions options;
    options.limits = cfg.limits();
    options.parallelism = cfg.parallelism;
    return evaluate_run(records, benchmark, cfg.toolchain_config(), options);
}

void write_report(const EvalReport& report, const fs::path& dir) {
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << to_json(report).dump(2) << '\n';
    }
    std::ofstream txt(dir / "report.txt", std::ios::binary);
    txt << render_report_table(report);
}

}  // namespace

int cmd_decompile(const RunConfig& cfg) {
    if (cfg.tasks_path.empty()) throw ConfigError("missing --tasks");
    std::vector<DecompilationTask> tasks;
    for (const json& row : read_jsonl(cfg.tasks_path)) tasks.push_back(task_from_json(row));

    // --context-level overrides the whole task file (Table-2 style sweep).
    if (auto override_level = cfg.context_override()) {
        for (auto& task : tasks) task.context_opt_level_override = override_level;
    }

    fs::path out = cfg.prepare_out_dir();
    std::vector<DecompilationRecord> records = run_decompile_tasks(tasks, cfg, out / "records.jsonl");

    int compilable = 0, two_rounds = 0;
    for (const auto& rec : records) {
        compilable += rec.initial_compilable ? 1 : 0;
        two_rounds += rec.rounds >= 2 ? 1 : 0;
    }
    std::cout << "decompile: " << records.size() << " records, " << compilable
              << " compilable round-1 outputs, " << two_rounds << " with self-context -> "
              << (out / "records.jsonl").string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    std::string records_path = cfg.records_path;
    if (records_path.empty()) throw ConfigError("missing --records");
    std::vector<DecompilationRecord> records;
    for (const json& row : read_jsonl(records_path)) records.push_back(record_from_json(row));

    std::vector<EvalSample> benchmark = load_benchmark(cfg.benchmark_path);
    fs::path out = cfg.prepare_out_dir();
    if (fs::exists(out / "report.json") && !cfg.force) {
        std::cout << "evaluate: report already exists (use --force to redo)\n";
        return 0;
    }

    run_selfcheck(benchmark, cfg);
    EvalReport report = evaluate_records(records, benchmark, cfg);
    write_report(report, out);
    std::cout << render_report_table(report);
    return 0;
}

int cmd_index(const RunConfig& cfg) {
    if (cfg.corpus_path.empty()) throw ConfigError("missing --corpus");
    fs::path out = cfg.prepare_out_dir();
    fs::path index_file = cfg.index_path.empty() ? out / "index.json" : fs::path(cfg.index_path);
    if (fs::exists(index_file) && !cfg.force) {
        std::cout << "index: " << index_file.string() << " already exists (use --force)\n";
        return 0;
    }

    std::vector<SourceFunction> corpus;
    for (const json& row : read_jsonl(cfg.corpus_path))
        corpus.push_back(source_function_from_json(row));

    CompilerConfig cc = cfg.toolchain_config();
    ToolLimits limits = cfg.limits();

    auto build_doc = [&](size_t i) -> std::optional<CorpusDoc> {
        const SourceFunction& fn = corpus[i];
        TempDir workdir("sc2dec-index");
        CompileOutcome outcome =
            compile_function(fn, cc, OutputKind::shared_library, workdir.path(), limits);
        if (!outcome.success) return std::nullopt;
        try {
            std::string raw = disassemble(*outcome.artifact_path, false, limits);
            AssemblyListing listing = extract_function(raw, fn.entry_name);
            return CorpusDoc{fn.id, listing.text, source_text(fn)};
        } catch (const FunctionNotFound&) {
            return std::nullopt;
        }
    };

    auto maybe_docs = parallel_map_ordered<std::optional<CorpusDoc>>(
        corpus.size(), cfg.parallelism, build_doc);
    std::vector<CorpusDoc> docs;
    for (auto& d : maybe_docs)
        if (d) docs.push_back(std::move(*d));

    AsmIndex index = build_index(docs);
    save_index(index, index_file);
    std::cout << "index: " << index.documents.size() << " documents -> " << index_file.string()
              << "\n";
    return 0;
}

int cmd_retrieve(const RunConfig& cfg, const std::string& query_asm_path, int top_k) {
    if (cfg.index_path.empty()) throw ConfigError("missing --index");
    std::ifstream in(query_asm_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open query file: " + query_asm_path);
    std::string asm_text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    AsmIndex index = load_index(cfg.index_path);
    json out = json::array();
    for (const ScoredDoc& hit : bm25_query(index, asm_text, top_k))
        out.push_back({{"doc_id", hit.doc_id}, {"score", hit.score}});
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_matrix(const RunConfig& cfg) {
    std::vector<EvalSample> benchmark = load_benchmark(cfg.benchmark_path);
    run_selfcheck(benchmark, cfg);

    std::vector<DecompilationTask> base_tasks;
    if (!cfg.tasks_path.empty()) {
        for (const json& row : read_jsonl(cfg.tasks_path))
            base_tasks.push_back(task_from_json(row));
    } else {
        PromptStrategy strategy = cfg.prompt_strategy();
        for (const EvalSample& sample : benchmark) {
            for (const auto& [level, asm_text] : sample.asm_by_level) {
                DecompilationTask task;
                task.sample_id = sample.sample_id;
                task.target_asm = asm_text;
                task.opt_level = level;
                task.strategy = strategy;
                task.context_compiler = cfg.toolchain_config();
                base_tasks.push_back(task);
            }
        }
    }

    fs::path out = cfg.prepare_out_dir();
    for (const std::string& compiler : cfg.matrix_compilers) {
        for (const std::string& level_name : cfg.matrix_context_levels) {
            auto level = parse_opt_level(level_name);
            if (!level) throw ConfigError("bad matrix context level: " + level_name);

            fs::path cell_dir = out / "matrix" / (compiler + "_" + level_name);
            fs::create_directories(cell_dir);
            if (fs::exists(cell_dir / "report.json") && !cfg.force) {
                std::cout << "matrix: " << cell_dir.string() << " already done\n";
                continue;
            }

            std::vector<DecompilationTask> tasks = base_tasks;
            for (auto& task : tasks) {
                task.context_compiler.compiler_id = compiler;
                task.context_opt_level_override = level;
            }

            std::vector<DecompilationRecord> records =
                run_decompile_tasks(std::move(tasks), cfg, cell_dir / "records.jsonl");
            EvalReport report = evaluate_records(records, benchmark, cfg);
            write_report(report, cell_dir);
            std::cout << "matrix cell " << compiler << "/" << level_name << ": avg reexec "
                      << report.avg_reexecutable_pct << "\n";
        }
    }
    return 0;
}

int cmd_make_benchmark(const RunConfig& cfg) {
    if (cfg.corpus_path.empty()) throw ConfigError("missing --corpus");
    std::vector<json> rows = read_jsonl(cfg.corpus_path);

    CompilerConfig base = cfg.toolchain_config();
    ToolLimits limits = cfg.limits();

    auto build_sample = [&](size_t i) -> EvalSample {
        const json& row = rows[i];
        SourceFunction fn = source_function_from_json(row);
        EvalSample sample;
        sample.sample_id = fn.id;
        sample.reference_source = source_text(fn);
        sample.test_harness = row.value("harness", "");
        sample.entry_name = fn.entry_name;
        if (sample.test_harness.empty())
            throw ConfigError("corpus row " + fn.id + " lacks a 'harness' field");

        for (OptLevel level : kAllOptLevels) {
            CompilerConfig cc = base;
            cc.opt_level = level;
            cc.debug_info = false;
            TempDir workdir("sc2dec-bench");
            CompileOutcome outcome =
                compile_function(fn, cc, OutputKind::shared_library, workdir.path(), limits);
            if (!outcome.success)
                throw ConfigError("benchmark function " + fn.id + " fails to build at " +
                                  to_string(level) + ":\n" + outcome.diagnostics);
            std::string raw = disassemble(*outcome.artifact_path, false, limits);
            sample.asm_by_level[level] = extract_function(raw, fn.entry_name).text;
        }
        return sample;
    };

    std::vector<EvalSample> samples =
        parallel_map_ordered<EvalSample>(rows.size(), cfg.parallelism, build_sample);
    run_selfcheck(samples, cfg);

    fs::path out_file = cfg.benchmark_path.empty()
                            ? cfg.prepare_out_dir() / "benchmark.jsonl"
                            : fs::path(cfg.benchmark_path);
    std::vector<json> out_rows;
    for (const EvalSample& sample : samples) out_rows.push_back(to_json(sample));
    write_jsonl(out_file, out_rows);
    std::cout << "make-benchmark: " << samples.size() << " samples x 4 levels -> "
              << out_file.string() << "\n";
    return 0;
}

int cmd_make_tasks(const RunConfig& cfg) {
    std::vector<EvalSample> benchmark = load_benchmark(cfg.benchmark_path);
    PromptStrategy strategy = cfg.prompt_strategy();
    auto override_level = cfg.context_override();

    std::vector<json> rows;
    for (const EvalSample& sample : benchmark) {
        for (const auto& [level, asm_text] : sample.asm_by_level) {
            DecompilationTask task;
            task.sample_id = sample.sample_id;
            task.target_asm = asm_text;
            task.opt_level = level;
            task.strategy = strategy;
            task.context_compiler = cfg.toolchain_config();
            task.context_opt_level_override = override_level;
            rows.push_back(to_json(task));
        }
    }

    fs::path out_file =
        cfg.tasks_path.empty() ? cfg.prepare_out_dir() / "tasks.jsonl" : fs::path(cfg.tasks_path);
    write_jsonl(out_file, rows);
    std::cout << "make-tasks: " << rows.size() << " tasks -> " << out_file.string() << "\n";
    return 0;
}

}  // namespace sc2dec
