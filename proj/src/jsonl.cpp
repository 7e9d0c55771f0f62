#include "sc2dec/jsonl.hpp"

#include "sc2dec/strutil.hpp"

namespace sc2dec {

namespace {

OptLevel require_level(const json& j, const char* key) {
    auto level = parse_opt_level(j.at(key).get<std::string>());
    if (!level) throw ConfigError("bad optimization level in field '" + std::string(key) + "'");
    return *level;
}

}  // namespace

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::vector<json> rows;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        try {
            rows.push_back(json::parse(t));
        } catch (const json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": invalid JSON: " + e.what());
        }
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (const json& row : rows) out << row.dump() << '\n';
}

json to_json(const SourceFunction& fn) {
    return {{"id", fn.id},
            {"prelude", fn.prelude},
            {"body", fn.body},
            {"entry_name", fn.entry_name}};
}

SourceFunction source_function_from_json(const json& j) {
    SourceFunction fn;
    fn.id = j.at("id").get<std::string>();
    fn.prelude = j.value("prelude", "");
    fn.body = j.at("body").get<std::string>();
    fn.entry_name = j.at("entry_name").get<std::string>();
    return fn;
}

json to_json(const CompilerConfig& cfg) {
    return {{"compiler_id", cfg.compiler_id},
            {"opt_level", to_string(cfg.opt_level)},
            {"debug_info", cfg.debug_info},
            {"extra_flags", cfg.extra_flags}};
}

CompilerConfig compiler_config_from_json(const json& j) {
    CompilerConfig cfg;
    cfg.compiler_id = j.value("compiler_id", "gcc");
    if (j.contains("opt_level")) cfg.opt_level = require_level(j, "opt_level");
    cfg.debug_info = j.value("debug_info", false);
    cfg.extra_flags = j.value("extra_flags", std::vector<std::string>{});
    return cfg;
}

json to_json(const ContextExample& ex) {
    return {{"asm", ex.asm_text},
            {"source", ex.source},
            {"opt_level", to_string(ex.opt_level)},
            {"provenance", to_string(ex.provenance)}};
}

ContextExample context_example_from_json(const json& j) {
    ContextExample ex;
    ex.asm_text = j.at("asm").get<std::string>();
    ex.source = j.at("source").get<std::string>();
    ex.opt_level = require_level(j, "opt_level");
    if (auto p = parse_provenance(j.value("provenance", "self_constructed")); p)
        ex.provenance = *p;
    return ex;
}

json to_json(const DecompilationTask& task) {
    json j = {{"sample_id", task.sample_id},
              {"target_asm", task.target_asm},
              {"opt_level", to_string(task.opt_level)},
              {"strategy", to_string(task.strategy.kind)},
              {"template_family", to_string(task.strategy.family)},
              {"context_compiler", to_json(task.context_compiler)}};
    if (task.context_opt_level_override)
        j["context_opt_level_override"] = to_string(*task.context_opt_level_override);
    return j;
}

DecompilationTask task_from_json(const json& j) {
    DecompilationTask task;
    task.sample_id = j.at("sample_id").get<std::string>();
    task.target_asm = j.at("target_asm").get<std::string>();
    task.opt_level = require_level(j, "opt_level");
    auto kind = parse_strategy_kind(j.value("strategy", "vanilla"));
    if (!kind) throw ConfigError("unknown strategy in task " + task.sample_id);
    task.strategy.kind = *kind;
    auto family = parse_family(j.value("template_family", "decompile_style"));
    if (!family) throw ConfigError("unknown template family in task " + task.sample_id);
    task.strategy.family = *family;
    if (j.contains("context_compiler"))
        task.context_compiler = compiler_config_from_json(j.at("context_compiler"));
    if (j.contains("context_opt_level_override"))
        task.context_opt_level_override = require_level(j, "context_opt_level_override");
    return task;
}

json to_json(const DecompilationRecord& rec) {
    json j = {{"sample_id", rec.sample_id},
              {"opt_level", to_string(rec.opt_level)},
              {"strategy", to_string(rec.strategy)},
              {"initial_prompt", rec.initial_prompt},
              {"initial_output", rec.initial_output},
              {"initial_compilable", rec.initial_compilable},
              {"final_prompt", rec.final_prompt},
              {"final_output", rec.final_output},
              {"rounds", rec.rounds},
              {"diagnostics", rec.diagnostics}};
    if (rec.context) j["context"] = to_json(*rec.context);
    return j;
}

DecompilationRecord record_from_json(const json& j) {
    DecompilationRecord rec;
    rec.sample_id = j.at("sample_id").get<std::string>();
    rec.opt_level = require_level(j, "opt_level");
    if (auto kind = parse_strategy_kind(j.value("strategy", "vanilla")); kind)
        rec.strategy = *kind;
    rec.initial_prompt = j.value("initial_prompt", "");
    rec.initial_output = j.value("initial_output", "");
    rec.initial_compilable = j.value("initial_compilable", false);
    rec.final_prompt = j.value("final_prompt", "");
    rec.final_output = j.value("final_output", "");
    rec.rounds = j.value("rounds", 1);
    rec.diagnostics = j.value("diagnostics", "");
    if (j.contains("context")) rec.context = context_example_from_json(j.at("context"));
    return rec;
}

json to_json(const TrainingExample& ex) {
    return {{"kind", to_string(ex.kind)},
            {"sample_id", ex.sample_id},
            {"opt_level", to_string(ex.opt_level)},
            {"prompt", ex.prompt},
            {"completion", ex.completion}};
}

TrainingExample training_example_from_json(const json& j) {
    TrainingExample ex;
    auto kind = parse_example_kind(j.at("kind").get<std::string>());
    if (!kind) throw ConfigError("unknown training example kind");
    ex.kind = *kind;
    ex.sample_id = j.at("sample_id").get<std::string>();
    ex.opt_level = require_level(j, "opt_level");
    ex.prompt = j.at("prompt").get<std::string>();
    ex.completion = j.at("completion").get<std::string>();
    return ex;
}

json to_json(const SkipRecord& skip) {
    return {{"sample_id", skip.sample_id},
            {"level", to_string(skip.opt_level)},
            {"reason", skip.reason}};
}

json to_json(const EvalSample& sample) {
    json asm_map = json::object();
    for (const auto& [level, text] : sample.asm_by_level) asm_map[to_string(level)] = text;
    return {{"sample_id", sample.sample_id},
            {"reference_source", sample.reference_source},
            {"test_harness", sample.test_harness},
            {"entry_name", sample.entry_name},
            {"asm_by_level", asm_map}};
}

EvalSample eval_sample_from_json(const json& j) {
    EvalSample sample;
    sample.sample_id = j.at("sample_id").get<std::string>();
    sample.reference_source = j.at("reference_source").get<std::string>();
    sample.test_harness = j.at("test_harness").get<std::string>();
    sample.entry_name = j.value("entry_name", "");
    if (j.contains("asm_by_level")) {
        for (const auto& [key, value] : j.at("asm_by_level").items()) {
            auto level = parse_opt_level(key);
            if (!level) throw ConfigError("bad level key in asm_by_level: " + key);
            sample.asm_by_level[*level] = value.get<std::string>();
        }
    }
    return sample;
}

json to_json(const EvalReport& report) {
    json levels = json::object();
    for (const auto& [level, tally] : report.levels) {
        levels[to_string(level)] = {{"recompilable", tally.recompilable},
                                    {"reexecutable", tally.reexecutable},
                                    {"total", tally.total},
                                    {"recompilable_pct", tally.recompilable_pct()},
                                    {"reexecutable_pct", tally.reexecutable_pct()}};
    }
    json rows = json::array();
    for (const SampleVerdict& v : report.rows) {
        rows.push_back({{"sample_id", v.sample_id},
                        {"opt_level", to_string(v.opt_level)},
                        {"recompilable", v.recompilable},
                        {"reexecutable", v.reexecutable}});
    }
    return {{"levels", levels},
            {"avg_recompilable_pct", report.avg_recompilable_pct},
            {"avg_reexecutable_pct", report.avg_reexecutable_pct},
            {"rows", rows}};
}

}  // namespace sc2dec
