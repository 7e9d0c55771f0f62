#include <doctest.h>

#include "sc2dec/backend.hpp"
#include "sc2dec/disasm.hpp"
#include "sc2dec/pipeline.hpp"
#include "sc2dec/strutil.hpp"
#include "test_util.hpp"

using namespace sc2dec;
using namespace sc2dec::testing;

namespace {

// The mismatch-repair scenario: at O1+ the compiler folds abs into branchless
// code; a model that drops the n==0 handling emits compilable-but-flawed code
// and the loop must still build a context from it.
SourceFunction abs_expand_fn() {
    SourceFunction fn;
    fn.id = "abs_expand";
    fn.body =
        "int abs_expand(int n) {\n"
        "    int r = n;\n"
        "    if (n < 0)\n"
        "        r = -n;\n"
        "    if (n == 0)\n"
        "        r = 0;\n"
        "    return r;\n"
        "}\n";
    fn.entry_name = "abs_expand";
    return fn;
}

DecompilationTask make_task(const SourceFunction& fn, OptLevel level, StrategyKind kind) {
    TempDir workdir("pl-task");
    CompilerConfig cfg = gcc_config(level);
    CompileOutcome outcome =
        compile_function(fn, cfg, OutputKind::shared_library, workdir.path());
    REQUIRE_MESSAGE(outcome.success, outcome.diagnostics);
    std::string raw = disassemble(*outcome.artifact_path, false);

    DecompilationTask task;
    task.sample_id = fn.id;
    task.target_asm = extract_function(raw, fn.entry_name).text;
    task.opt_level = level;
    task.strategy = {kind, TemplateFamily::decompile_style};
    task.context_compiler = gcc_config(level);
    return task;
}

}  // namespace

TEST_CASE("wrap_translation_unit") {
    SUBCASE("prepends the standard prelude") {
        std::string unit = wrap_translation_unit("int f(){return 0;}");
        CHECK(unit.find("#include <stdio.h>") != std::string::npos);
        CHECK(unit.find("#include <stdint.h>") != std::string::npos);
        CHECK(unit.find("int f(){return 0;}") != std::string::npos);
    }
    SUBCASE("leaves code with includes unchanged") {
        std::string code = "#include <stdio.h>\nint f(){return 0;}";
        CHECK(wrap_translation_unit(code) == code);
    }
    SUBCASE("sqrt compiles once -lm is in the config") {
        TempDir workdir("pl-wrap");
        std::string unit = wrap_translation_unit("double g(double x){return sqrt(x);}");
        CompileOutcome outcome = compile_source(unit, gcc_config(OptLevel::O0),
                                                OutputKind::shared_library, workdir.path());
        CHECK_MESSAGE(outcome.success, outcome.diagnostics);
    }
}

TEST_CASE("echo oracle reaches the fixed point in two rounds") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O0, StrategyKind::sc2dec);

    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    CHECK(rec.rounds == 2);
    CHECK(rec.initial_compilable);
    CHECK(rec.final_output == rec.initial_output);
    REQUIRE(rec.context.has_value());
    CHECK(rec.context->provenance == Provenance::self_constructed);
    CHECK(rec.context->opt_level == task.opt_level);
    CHECK(rec.context->source == rec.initial_output);
}

TEST_CASE("null backend falls back to a single round") {
    DecompilationTask task = make_task(abs_expand_fn(), OptLevel::O1, StrategyKind::sc2dec);
    NullBackend backend;
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    CHECK(rec.rounds == 1);
    CHECK_FALSE(rec.initial_compilable);
    CHECK(rec.initial_output == "");
    CHECK(rec.final_output == rec.initial_output);
    CHECK_FALSE(rec.diagnostics.empty());
}

TEST_CASE("mutator run builds the context from the flawed code") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O1, StrategyKind::sc2dec);

    // seed 1 deletes "r = -n;": compilable, wrong for negative inputs
    MutatorBackend backend({{fn.id, source_text(fn)}}, 1);
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    REQUIRE(rec.initial_compilable);
    CHECK(rec.rounds == 2);
    CHECK(rec.initial_output.find("r = -n;") == std::string::npos);
    CHECK(rec.initial_output.find("if (n < 0)") != std::string::npos);

    REQUIRE(rec.context.has_value());
    CHECK(rec.context->source == rec.initial_output);

    // round-2 prompt: context asm, then flawed source, then the ORIGINAL asm
    size_t ctx_asm = rec.final_prompt.find(rec.context->asm_text);
    size_t ctx_src = rec.final_prompt.find(rec.context->source);
    size_t target = rec.final_prompt.rfind(task.target_asm);
    REQUIRE(ctx_asm != std::string::npos);
    REQUIRE(ctx_src != std::string::npos);
    REQUIRE(target != std::string::npos);
    CHECK(ctx_asm < ctx_src);
    CHECK(ctx_src < target);
}

TEST_CASE("the context round never rewrites the target asm") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O2, StrategyKind::sc2dec);
    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    REQUIRE(rec.rounds == 2);
    std::string rendered_tail = render_vanilla(task.target_asm, task.strategy.family);
    CHECK(ends_with(rec.final_prompt, rendered_tail));
}

TEST_CASE("context level override wins over the task level") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O0, StrategyKind::sc2dec);
    task.context_opt_level_override = OptLevel::O3;

    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    REQUIRE(rec.rounds == 2);
    REQUIRE(rec.context.has_value());
    CHECK(rec.context->opt_level == OptLevel::O3);

    // deep check: the context asm really is the O3 recompile of the output
    TempDir workdir("pl-ovr");
    CompileOutcome outcome =
        compile_source(wrap_translation_unit(rec.initial_output), gcc_config(OptLevel::O3),
                       OutputKind::shared_library, workdir.path());
    REQUIRE(outcome.success);
    std::string expected = clean_user_text_asm(disassemble(*outcome.artifact_path, false));
    CHECK(rec.context->asm_text == expected);
}

TEST_CASE("one_shot strategies use the fixed example only for round 1") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task =
        make_task(fn, OptLevel::O0, StrategyKind::one_shot_then_sc2dec);

    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    REQUIRE(rec.rounds == 2);

    const std::string shot_source = source_text(fixed_example_function());
    CHECK(rec.initial_prompt.find(shot_source) != std::string::npos);
    CHECK(rec.final_prompt.find(shot_source) == std::string::npos);
    CHECK(rec.final_prompt.find(rec.context->source) != std::string::npos);
}

TEST_CASE("plain one_shot never enters a second round") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O0, StrategyKind::one_shot);
    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;

    DecompilationRecord rec = run_sc2dec(task, env);
    CHECK(rec.rounds == 1);
    CHECK(rec.initial_compilable);  // probed, but no context round for this strategy
    CHECK(rec.final_output == rec.initial_output);
}

TEST_CASE("retrieval strategy pulls its context from the index") {
    SourceFunction fn = abs_expand_fn();
    DecompilationTask task = make_task(fn, OptLevel::O0, StrategyKind::retrieval);

    AsmIndex index = build_index({
        {"doc_same", task.target_asm, "int nearly(void) { return 1; }"},
        {"doc_other", "xor %eax,%eax\nret", "int zero(void) { return 0; }"},
    });

    EchoBackend backend({{fn.id, source_text(fn)}});
    PipelineEnv env;
    env.backend = &backend;
    env.retrieval_index = &index;

    DecompilationRecord rec = run_sc2dec(task, env);
    CHECK(rec.rounds == 1);
    CHECK(rec.initial_prompt.find("int nearly(void) { return 1; }") != std::string::npos);

    env.retrieval_index = nullptr;
    CHECK_THROWS_AS(run_sc2dec(task, env), BackendMisconfigured);
}
