#pragma once

#include <array>
#include <optional>
#include <string>

namespace sc2dec {

// The four levels the experiments cover. Everything that stamps a level
// (listings, tasks, training examples, report rows) uses this enum.
enum class OptLevel { O0, O1, O2, O3 };

constexpr std::array<OptLevel, 4> kAllOptLevels = {OptLevel::O0, OptLevel::O1,
                                                   OptLevel::O2, OptLevel::O3};

std::string to_string(OptLevel level);
std::optional<OptLevel> parse_opt_level(const std::string& text);

// One compilable C function plus whatever prelude it needs; the unit of all
// corpora and benchmarks.
struct SourceFunction {
    std::string id;
    std::string prelude;     // includes/typedefs, may be empty
    std::string body;        // one complete function definition
    std::string entry_name;  // symbol defined in body
};

// prelude + body as a single translation-unit text. Both the dataset
// synthesizer and its fidelity checks go through this one definition.
std::string source_text(const SourceFunction& fn);

}  // namespace sc2dec
