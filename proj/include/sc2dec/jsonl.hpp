#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sc2dec/errors.hpp"
#include "sc2dec/eval.hpp"
#include "sc2dec/fae.hpp"
#include "sc2dec/pipeline.hpp"

namespace sc2dec {

using nlohmann::json;

std::vector<json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

// Struct <-> JSON. Enum-valued fields serialize as their string names; object
// keys are emitted in nlohmann's sorted order, which keeps files byte-stable.

json to_json(const SourceFunction& fn);
SourceFunction source_function_from_json(const json& j);

json to_json(const CompilerConfig& cfg);
CompilerConfig compiler_config_from_json(const json& j);

json to_json(const ContextExample& ex);
ContextExample context_example_from_json(const json& j);

json to_json(const DecompilationTask& task);
DecompilationTask task_from_json(const json& j);

json to_json(const DecompilationRecord& rec);
DecompilationRecord record_from_json(const json& j);

json to_json(const TrainingExample& ex);
TrainingExample training_example_from_json(const json& j);

json to_json(const SkipRecord& skip);

json to_json(const EvalSample& sample);
EvalSample eval_sample_from_json(const json& j);

json to_json(const EvalReport& report);

}  // namespace sc2dec
