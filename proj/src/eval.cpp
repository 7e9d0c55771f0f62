#include "sc2dec/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "sc2dec/errors.hpp"
#include "sc2dec/parallel.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

namespace fs = std::filesystem;

bool score_recompilability(const std::string& decompiled, const CompilerConfig& toolchain,
                           const fs::path& workdir, const ToolLimits& limits) {
    if (trim_view(decompiled).empty()) return false;
    CompileOutcome outcome = compile_source(wrap_translation_unit(decompiled), toolchain,
                                            OutputKind::shared_library, workdir, limits);
    return outcome.success;
}

bool score_reexecutability(const std::string& decompiled, const EvalSample& sample,
                           const CompilerConfig& toolchain, const fs::path& workdir,
                           const ToolLimits& limits, double timeout_s) {
    if (trim_view(decompiled).empty()) return false;
    std::string unit = wrap_translation_unit(decompiled) + "\n" + sample.test_harness;
    CompileOutcome outcome =
        compile_source(unit, toolchain, OutputKind::executable, workdir, limits);
    if (!outcome.success) return false;
    RunResult run = run_executable(*outcome.artifact_path, timeout_s);
    return run.status == RunStatus::Pass;
}

namespace {

void finalize(EvalReport& report) {
    for (OptLevel level : kAllOptLevels) report.levels[level];  // ensure all four rows
    double recomp = 0.0, reexec = 0.0;
    for (OptLevel level : kAllOptLevels) {
        recomp += report.levels[level].recompilable_pct();
        reexec += report.levels[level].reexecutable_pct();
    }
    report.avg_recompilable_pct = recomp / kAllOptLevels.size();
    report.avg_reexecutable_pct = reexec / kAllOptLevels.size();

    std::sort(report.rows.begin(), report.rows.end(),
              [](const SampleVerdict& a, const SampleVerdict& b) {
                  if (a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
                  return a.opt_level < b.opt_level;
              });
}

}  // namespace

EvalReport evaluate_run(const std::vector<DecompilationRecord>& records,
                        const std::vector<EvalSample>& benchmark,
                        const CompilerConfig& toolchain, const EvalOptions& options) {
    std::map<std::string, const EvalSample*> by_id;
    for (const EvalSample& sample : benchmark) by_id[sample.sample_id] = &sample;
    for (const DecompilationRecord& rec : records)
        if (!by_id.count(rec.sample_id)) throw UnknownSample(rec.sample_id);

    auto score_one = [&](size_t i) -> SampleVerdict {
        const DecompilationRecord& rec = records[i];
        const EvalSample& sample = *by_id.at(rec.sample_id);
        SampleVerdict verdict;
        verdict.sample_id = rec.sample_id;
        verdict.opt_level = rec.opt_level;

        TempDir workdir("sc2dec-eval", options.scratch_root);
        verdict.recompilable = score_recompilability(rec.final_output, toolchain,
                                                     workdir.path() / "compile", options.limits);
        // Execution requires successful compilation; don't bother otherwise.
        if (verdict.recompilable) {
            verdict.reexecutable =
                score_reexecutability(rec.final_output, sample, toolchain,
                                      workdir.path() / "exec", options.limits,
                                      options.limits.run_timeout_s);
        }
        return verdict;
    };

    EvalReport report;
    report.rows = parallel_map_ordered<SampleVerdict>(records.size(), options.parallelism,
                                                      score_one);
    for (const SampleVerdict& verdict : report.rows) {
        LevelTally& tally = report.levels[verdict.opt_level];
        tally.total += 1;
        tally.recompilable += verdict.recompilable ? 1 : 0;
        tally.reexecutable += verdict.reexecutable ? 1 : 0;
    }
    finalize(report);
    return report;
}

std::vector<std::string> verify_benchmark(const std::vector<EvalSample>& benchmark,
                                          const CompilerConfig& toolchain,
                                          const EvalOptions& options) {
    struct Case {
        const EvalSample* sample;
        OptLevel level;
    };
    std::vector<Case> cases;
    for (const EvalSample& sample : benchmark)
        for (OptLevel level : kAllOptLevels) cases.push_back({&sample, level});

    auto check_one = [&](size_t i) -> std::string {
        const EvalSample& sample = *cases[i].sample;
        CompilerConfig cfg = toolchain;
        cfg.opt_level = cases[i].level;
        TempDir workdir("sc2dec-selfcheck", options.scratch_root);
        if (!score_reexecutability(sample.reference_source, sample, cfg, workdir.path(),
                                   options.limits, options.limits.run_timeout_s))
            return sample.sample_id + " reference does not pass its harness at " +
                   to_string(cases[i].level);
        return {};
    };

    std::vector<std::string> raw = parallel_map_ordered<std::string>(
        cases.size(), options.parallelism, check_one);
    std::vector<std::string> failures;
    for (std::string& msg : raw)
        if (!msg.empty()) failures.push_back(std::move(msg));
    return failures;
}

std::string render_report_table(const EvalReport& report) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    std::vector<std::vector<std::string>> grid;
    grid.push_back({"Metric", "O0", "O1", "O2", "O3", "AVG"});
    std::vector<std::string> recomp = {"Re-Compilability"};
    std::vector<std::string> reexec = {"Re-Executability"};
    for (OptLevel level : kAllOptLevels) {
        auto it = report.levels.find(level);
        LevelTally tally = it == report.levels.end() ? LevelTally{} : it->second;
        recomp.push_back(fmt(tally.recompilable_pct()));
        reexec.push_back(fmt(tally.reexecutable_pct()));
    }
    recomp.push_back(fmt(report.avg_recompilable_pct));
    reexec.push_back(fmt(report.avg_reexecutable_pct));
    grid.push_back(recomp);
    grid.push_back(reexec);

    std::vector<size_t> widths(grid[0].size(), 0);
    for (const auto& row : grid)
        for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());

    std::string out;
    for (const auto& row : grid) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c) out += "  ";
            std::string cell = row[c];
            size_t pad = widths[c] - cell.size();
            if (c == 0) {
                out += cell + std::string(pad, ' ');
            } else {
                out += std::string(pad, ' ') + cell;
            }
        }
        // no trailing spaces; rows end cleanly
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    }
    return out;
}

}  // namespace sc2dec
