#include <doctest.h>

#include <csignal>
#include <cstdlib>
#include <thread>

#include "sc2dec/errors.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/subprocess.hpp"
#include "sc2dec/toolchain.hpp"
#include "test_util.hpp"

using namespace sc2dec;
using namespace sc2dec::testing;

namespace {

SourceFunction f0() {
    SourceFunction fn;
    fn.id = "f0";
    fn.body = "int f0(int a){return a+1;}\n";
    fn.entry_name = "f0";
    return fn;
}

}  // namespace

TEST_CASE("compile_argv pins the flag order") {
    CompilerConfig cfg = gcc_config(OptLevel::O2, true);
    cfg.extra_flags = {"-lm", "-Wall"};
    CHECK(compile_argv(cfg, OutputKind::shared_library) ==
          std::vector<std::string>{"gcc", "-O2", "-g", "-shared", "-fPIC", "-o", "input.so",
                                   "input.c", "-lm", "-Wall"});
    CHECK(compile_argv(cfg, OutputKind::object_file) ==
          std::vector<std::string>{"gcc", "-O2", "-g", "-c", "-o", "input.o", "input.c", "-lm",
                                   "-Wall"});
    cfg.debug_info = false;
    CHECK(compile_argv(cfg, OutputKind::executable) ==
          std::vector<std::string>{"gcc", "-O2", "-o", "prog", "input.c", "-lm", "-Wall"});
}

TEST_CASE("compile_function builds a shared library") {
    TempDir workdir("tc-test");
    CompileOutcome outcome = compile_function(f0(), gcc_config(OptLevel::O0, true),
                                              OutputKind::shared_library, workdir.path());
    CHECK(outcome.success);
    REQUIRE(outcome.artifact_path.has_value());
    CHECK(std::filesystem::exists(*outcome.artifact_path));
    CHECK(outcome.artifact_path->filename() == "input.so");
}

TEST_CASE("truncated source fails with diagnostics and no artifact") {
    SourceFunction fn;
    fn.id = "broken";
    fn.body = "int f(){return";
    fn.entry_name = "f";
    TempDir workdir("tc-test");
    CompileOutcome outcome = compile_function(fn, gcc_config(OptLevel::O0),
                                              OutputKind::shared_library, workdir.path());
    CHECK_FALSE(outcome.success);
    CHECK_FALSE(outcome.diagnostics.empty());
    CHECK_FALSE(outcome.artifact_path.has_value());
    CHECK_FALSE(std::filesystem::exists(workdir.path() / "input.so"));
}

TEST_CASE("equal configs give byte-identical command lines") {
    TempDir wd1("tc-test");
    TempDir wd2("tc-test");
    CompilerConfig cfg = gcc_config(OptLevel::O1);
    CompileOutcome a = compile_function(f0(), cfg, OutputKind::shared_library, wd1.path());
    CompileOutcome b = compile_function(f0(), cfg, OutputKind::shared_library, wd2.path());
    CHECK(a.command_line == b.command_line);
    CHECK(a.command_line == "gcc -O1 -shared -fPIC -o input.so input.c -lm");
}

TEST_CASE("missing compiler raises ToolNotFound") {
    CompilerConfig cfg;
    cfg.compiler_id = "definitely-not-a-compiler-xyz";
    TempDir workdir("tc-test");
    CHECK_THROWS_AS(compile_function(f0(), cfg, OutputKind::shared_library, workdir.path()),
                    ToolNotFound);
}

TEST_CASE("disassemble interleaves source only for debug builds") {
    TempDir debug_dir("tc-test");
    CompileOutcome debug_build = compile_function(f0(), gcc_config(OptLevel::O0, true),
                                                  OutputKind::shared_library, debug_dir.path());
    REQUIRE(debug_build.success);
    std::string with_source = disassemble(*debug_build.artifact_path, true);
    int comment_lines = 0;
    for (const std::string& line : split_lines(with_source))
        if (!line.empty() && line[0] == ';') ++comment_lines;
    CHECK(comment_lines > 0);

    TempDir plain_dir("tc-test");
    CompileOutcome plain_build = compile_function(f0(), gcc_config(OptLevel::O0, false),
                                                  OutputKind::shared_library, plain_dir.path());
    REQUIRE(plain_build.success);
    std::string no_source = disassemble(*plain_build.artifact_path, true);
    for (const std::string& line : split_lines(no_source))
        CHECK((line.empty() || line[0] != ';'));
}

TEST_CASE("disassemble on a missing artifact never yields empty-string success") {
    CHECK_THROWS_AS(disassemble("/nonexistent/path/to.so", true), DisassemblyFailed);
}

TEST_CASE("run_executable verdicts") {
    auto build_and_run = [](const std::string& body, double timeout) {
        SourceFunction fn;
        fn.id = "main_fn";
        fn.prelude = "#include <stdlib.h>\n";
        fn.body = body;
        fn.entry_name = "main";
        TempDir workdir("tc-run");
        CompileOutcome outcome = compile_function(fn, gcc_config(OptLevel::O0),
                                                  OutputKind::executable, workdir.path());
        REQUIRE_MESSAGE(outcome.success, outcome.diagnostics);
        return run_executable(*outcome.artifact_path, timeout);
    };

    SUBCASE("exit 0 passes") {
        CHECK(build_and_run("int main(void){return 0;}", 5.0).status == RunStatus::Pass);
    }
    SUBCASE("nonzero exit fails with the code") {
        RunResult r = build_and_run("int main(void){return 3;}", 5.0);
        CHECK(r.status == RunStatus::Fail);
        CHECK(r.exit_code == 3);
    }
    SUBCASE("abort crashes with SIGABRT") {
        RunResult r = build_and_run("int main(void){abort();}", 5.0);
        CHECK(r.status == RunStatus::Crash);
        CHECK(r.signal_no == SIGABRT);
    }
    SUBCASE("infinite loop times out") {
        RunResult r = build_and_run("int main(void){for(;;){}return 0;}", 1.0);
        CHECK(r.status == RunStatus::Timeout);
    }
}

TEST_CASE("concurrent compiles in distinct workdirs stay isolated") {
    TempDir wd1("tc-iso");
    TempDir wd2("tc-iso");
    CompileOutcome a, b;
    std::thread t1([&] {
        a = compile_function(f0(), gcc_config(OptLevel::O0), OutputKind::shared_library,
                             wd1.path());
    });
    std::thread t2([&] {
        SourceFunction other = f0();
        other.body = "int f0(int a){return a+2;}\n";
        b = compile_function(other, gcc_config(OptLevel::O3), OutputKind::shared_library,
                             wd2.path());
    });
    t1.join();
    t2.join();
    CHECK(a.success);
    CHECK(b.success);
    CHECK(*a.artifact_path != *b.artifact_path);
}

TEST_CASE("SC2DEC_TOOL_TIMEOUT_S overrides both defaults") {
    ToolLimits defaults;
    CHECK(defaults.compile_timeout_s == doctest::Approx(30.0));
    CHECK(defaults.run_timeout_s == doctest::Approx(10.0));

    setenv("SC2DEC_TOOL_TIMEOUT_S", "7.5", 1);
    ToolLimits overridden = ToolLimits::from_env();
    unsetenv("SC2DEC_TOOL_TIMEOUT_S");
    CHECK(overridden.compile_timeout_s == doctest::Approx(7.5));
    CHECK(overridden.run_timeout_s == doctest::Approx(7.5));
}
