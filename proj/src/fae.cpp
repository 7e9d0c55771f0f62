#include "sc2dec/fae.hpp"

#include <cctype>
#include <stdexcept>

#include "sc2dec/errors.hpp"
#include "sc2dec/parallel.hpp"
#include "sc2dec/prompt.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

std::string to_string(ExampleKind kind) {
    return kind == ExampleKind::end_to_end ? "end_to_end" : "step_by_step";
}

std::optional<ExampleKind> parse_example_kind(const std::string& text) {
    if (text == "end_to_end") return ExampleKind::end_to_end;
    if (text == "step_by_step") return ExampleKind::step_by_step;
    return std::nullopt;
}

namespace {

// Groups blocks so the serialized segments strictly alternate asm/source:
// an empty-source block's asm joins the previous group when one exists,
// otherwise the next one.
struct Group {
    std::vector<std::string> asm_lines;
    std::vector<std::string> source_lines;
};

std::vector<Group> group_blocks(const AlignedSequence& seq) {
    std::vector<Group> groups;
    std::vector<std::string> pending;
    for (const AlignedBlock& block : seq.blocks) {
        if (block.source_lines.empty()) {
            if (!groups.empty()) {
                auto& dst = groups.back().asm_lines;
                dst.insert(dst.end(), block.asm_lines.begin(), block.asm_lines.end());
            } else {
                pending.insert(pending.end(), block.asm_lines.begin(), block.asm_lines.end());
            }
            continue;
        }
        Group g;
        g.asm_lines = std::move(pending);
        pending.clear();
        g.asm_lines.insert(g.asm_lines.end(), block.asm_lines.begin(), block.asm_lines.end());
        g.source_lines = block.source_lines;
        groups.push_back(std::move(g));
    }
    if (!pending.empty()) {
        // Whole function had no source mapping at all; emit asm-only group.
        Group g;
        g.asm_lines = std::move(pending);
        groups.push_back(std::move(g));
    }
    return groups;
}

bool body_mentions_any(const std::string& body, const std::vector<std::string>& idents) {
    for (const std::string& ident : idents) {
        size_t pos = 0;
        while ((pos = body.find(ident, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || (!std::isalnum(static_cast<unsigned char>(body[pos - 1])) &&
                                        body[pos - 1] != '_');
            size_t after = pos + ident.size();
            bool right_ok = after >= body.size() ||
                            (!std::isalnum(static_cast<unsigned char>(body[after])) &&
                             body[after] != '_');
            if (left_ok && right_ok) return true;
            pos = after;
        }
    }
    return false;
}

}  // namespace

std::string serialize_step_by_step(const AlignedSequence& seq, const std::string& full_source) {
    if (seq.blocks.empty()) throw EmptySequence();

    std::vector<std::string> lines;
    for (const Group& g : group_blocks(seq)) {
        for (const std::string& a : g.asm_lines) lines.push_back(a);
        for (const std::string& s : g.source_lines) lines.push_back(";" + s);
    }
    return join_lines(lines) + "\n\n" + full_source;
}

SynthesisResult synthesize(const std::vector<SourceFunction>& corpus,
                           const std::vector<CompilerConfig>& compilers,
                           const FaeOptions& options) {
    for (const CompilerConfig& cfg : compilers)
        if (!cfg.debug_info)
            throw std::invalid_argument(
                "synthesize: every compiler config needs debug_info=true (DWARF drives the "
                "alignment)");

    std::vector<const SourceFunction*> selected;
    for (const SourceFunction& fn : corpus) {
        if (!options.reject_idents.empty() &&
            body_mentions_any(fn.body, options.reject_idents))
            continue;
        selected.push_back(&fn);
        if (options.max_samples > 0 &&
            selected.size() >= static_cast<size_t>(options.max_samples))
            break;
    }

    struct Job {
        const SourceFunction* fn;
        const CompilerConfig* cfg;
    };
    std::vector<Job> jobs;
    for (const SourceFunction* fn : selected)
        for (const CompilerConfig& cfg : compilers) jobs.push_back({fn, &cfg});

    struct JobResult {
        std::vector<TrainingExample> examples;
        std::optional<SkipRecord> skip;
    };

    auto run_job = [&](size_t i) -> JobResult {
        const SourceFunction& fn = *jobs[i].fn;
        const CompilerConfig& cfg = *jobs[i].cfg;
        JobResult result;

        bool need_e2e = !options.already_done ||
                        !options.already_done(fn.id, cfg.opt_level, ExampleKind::end_to_end);
        bool need_sbs = !options.already_done ||
                        !options.already_done(fn.id, cfg.opt_level, ExampleKind::step_by_step);
        if (!need_e2e && !need_sbs) return result;

        TempDir workdir("sc2dec-fae", options.scratch_root);
        CompileOutcome outcome =
            compile_function(fn, cfg, OutputKind::shared_library, workdir.path(), options.limits);
        if (!outcome.success) {
            std::vector<std::string> diag_lines = split_lines(outcome.diagnostics);
            result.skip = SkipRecord{fn.id, cfg.opt_level,
                                     "compile failed: " +
                                         (diag_lines.empty() ? "unknown" : diag_lines.front())};
            return result;
        }

        std::string raw;
        AlignedSequence seq;
        try {
            raw = disassemble(*outcome.artifact_path, /*with_source=*/true, options.limits);
            seq = parse_interleaved(raw, fn.entry_name);
        } catch (const NoDebugInfo&) {
            result.skip = SkipRecord{fn.id, cfg.opt_level, "no interleaved source lines"};
            return result;
        } catch (const FunctionNotFound&) {
            result.skip =
                SkipRecord{fn.id, cfg.opt_level, "entry symbol missing from disassembly"};
            return result;
        }
        seq.opt_level = cfg.opt_level;

        std::vector<std::string> asm_lines;
        for (const AlignedBlock& block : seq.blocks)
            asm_lines.insert(asm_lines.end(), block.asm_lines.begin(), block.asm_lines.end());
        std::string listing = join_lines(asm_lines);
        std::string prompt = render_vanilla(listing, TemplateFamily::decompile_style);
        std::string full = source_text(fn);

        if (need_e2e)
            result.examples.push_back(
                {ExampleKind::end_to_end, fn.id, cfg.opt_level, prompt, full});
        if (need_sbs)
            result.examples.push_back({ExampleKind::step_by_step, fn.id, cfg.opt_level, prompt,
                                       serialize_step_by_step(seq, full)});
        return result;
    };

    std::vector<JobResult> outcomes = parallel_map_ordered<JobResult>(
        jobs.size(), options.parallelism, run_job);

    SynthesisResult result;
    for (JobResult& jr : outcomes) {
        for (TrainingExample& ex : jr.examples) result.examples.push_back(std::move(ex));
        if (jr.skip) result.skips.push_back(std::move(*jr.skip));
    }
    return result;
}

}  // namespace sc2dec
