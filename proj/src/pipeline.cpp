#include "sc2dec/pipeline.hpp"

#include "sc2dec/disasm.hpp"
#include "sc2dec/errors.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/subprocess.hpp"

namespace sc2dec {

std::string wrap_translation_unit(const std::string& decompiled) {
    if (decompiled.find("#include") != std::string::npos) return decompiled;
    static constexpr const char* kPrelude =
        "#include <stdio.h>\n"
        "#include <stdlib.h>\n"
        "#include <string.h>\n"
        "#include <math.h>\n"
        "#include <ctype.h>\n"
        "#include <stdbool.h>\n"
        "#include <stdint.h>\n";
    return std::string(kPrelude) + "\n" + decompiled;
}

namespace {

std::string render_initial_prompt(const DecompilationTask& task, const PipelineEnv& env) {
    TemplateFamily family = task.strategy.family;
    switch (task.strategy.kind) {
        case StrategyKind::vanilla:
        case StrategyKind::sc2dec:
            return render_vanilla(task.target_asm, family);
        case StrategyKind::one_shot:
        case StrategyKind::one_shot_then_sc2dec: {
            ContextExample shot =
                fixed_one_shot_example(task.opt_level, task.context_compiler, env.limits);
            return render_with_context(shot, task.target_asm, family);
        }
        case StrategyKind::retrieval: {
            if (!env.retrieval_index)
                throw BackendMisconfigured("retrieval strategy requires an index");
            auto hits = bm25_query(*env.retrieval_index, task.target_asm, 1);
            if (hits.empty())
                throw BackendMisconfigured("retrieval index is empty");
            const IndexedDoc* doc = find_doc(*env.retrieval_index, hits.front().doc_id);
            ContextExample shot;
            shot.asm_text = doc->asm_text;
            shot.source = doc->source;
            shot.opt_level = task.opt_level;
            shot.provenance = Provenance::retrieved;
            return render_with_context(shot, task.target_asm, family);
        }
    }
    return render_vanilla(task.target_asm, family);
}

std::string generate_code(Backend& backend, const std::string& prompt,
                          const DecompilationTask& task, const PipelineEnv& env) {
    GenerationRequest req;
    req.prompt = prompt;
    req.max_new_tokens = env.max_new_tokens;
    req.sample_id = task.sample_id;
    return extract_code(backend.generate(req));
}

}  // namespace

DecompilationRecord run_sc2dec(const DecompilationTask& task, const PipelineEnv& env) {
    if (!env.backend) throw BackendMisconfigured("pipeline has no backend");

    DecompilationRecord rec;
    rec.sample_id = task.sample_id;
    rec.opt_level = task.opt_level;
    rec.strategy = task.strategy.kind;

    // Step 1: initial decompilation. A 1-shot example participates only here.
    rec.initial_prompt = render_initial_prompt(task, env);
    rec.initial_output = generate_code(*env.backend, rec.initial_prompt, task, env);
    rec.final_output = rec.initial_output;
    rec.final_prompt = rec.initial_prompt;
    rec.rounds = 1;

    OptLevel context_level = task.context_opt_level_override.value_or(task.opt_level);
    CompilerConfig context_cfg = task.context_compiler;
    context_cfg.opt_level = context_level;
    context_cfg.debug_info = false;

    bool want_context = uses_self_context(task.strategy.kind) && env.extra_rounds > 0;
    int probe_rounds = want_context ? std::max(1, env.extra_rounds) : 1;
    std::string current = rec.initial_output;

    for (int round = 0; round < probe_rounds; ++round) {
        if (trim_view(current).empty()) {
            if (round == 0) {
                rec.initial_compilable = false;
                rec.diagnostics = "empty decompilation output";
            }
            break;
        }

        // Step 2: recompile the decompiled code and disassemble it.
        TempDir workdir("sc2dec-ctx", env.scratch_root);
        CompileOutcome outcome = compile_source(wrap_translation_unit(current), context_cfg,
                                                OutputKind::shared_library, workdir.path(),
                                                env.limits);
        if (round == 0) rec.initial_compilable = outcome.success;
        if (!outcome.success) {
            if (round == 0) rec.diagnostics = outcome.diagnostics;
            break;
        }
        if (!want_context) break;

        std::string raw = disassemble(*outcome.artifact_path, /*with_source=*/false, env.limits);
        std::string context_asm = clean_user_text_asm(raw);
        if (context_asm.empty()) {
            // Compilable but defines no function; nothing to demonstrate with.
            if (round == 0) rec.diagnostics = "recompiled artifact contains no functions";
            break;
        }

        // Step 3: the (asm, source) pair becomes the in-context example.
        ContextExample context;
        context.asm_text = context_asm;
        context.source = current;
        context.opt_level = context_level;
        context.provenance = Provenance::self_constructed;
        rec.context = context;

        // Step 4: decompile the ORIGINAL assembly again with that context.
        rec.final_prompt = render_with_context(context, task.target_asm, task.strategy.family);
        rec.final_output = generate_code(*env.backend, rec.final_prompt, task, env);
        rec.rounds += 1;
        current = rec.final_output;
    }

    return rec;
}

}  // namespace sc2dec
