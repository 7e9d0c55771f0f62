#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sc2dec/backend.hpp"
#include "sc2dec/errors.hpp"
#include "sc2dec/strutil.hpp"
#include "sc2dec/toolchain.hpp"
#include "sc2dec/subprocess.hpp"
#include "test_util.hpp"

using namespace sc2dec;
using namespace sc2dec::testing;

TEST_CASE("null backend returns the empty string") {
    NullBackend backend;
    GenerationRequest req;
    req.prompt = "anything";
    CHECK(backend.generate(req) == "");
}

TEST_CASE("echo backend maps sample ids to sources") {
    EchoBackend backend({{"f0", "int f0(int a){return a+1;}"}});
    GenerationRequest req;
    req.prompt = "decompile this";
    req.sample_id = "f0";
    CHECK(backend.generate(req) == "int f0(int a){return a+1;}");

    req.sample_id = "unknown";
    CHECK_THROWS_AS(backend.generate(req), BackendMisconfigured);
}

TEST_CASE("non-remote backends are deterministic") {
    std::map<std::string, std::string> answers = {
        {"s", "int f(void) {\n    int a = 1;\n    int b = 2;\n    return a + b;\n}\n"}};
    GenerationRequest req;
    req.prompt = "p";
    req.sample_id = "s";
    MutatorBackend m1(answers, 3), m2(answers, 3);
    CHECK(m1.generate(req) == m2.generate(req));
    EchoBackend e1(answers), e2(answers);
    CHECK(e1.generate(req) == e2.generate(req));
}

TEST_CASE("mutator deletes exactly one statement and stays compilable") {
    std::string source =
        "int triple(int x) {\n"
        "    int a = x;\n"
        "    a = a + x;\n"
        "    a = a + x;\n"
        "    return a;\n"
        "}\n";
    std::string mutated = MutatorBackend::delete_one_statement(source, 1);

    std::vector<std::string> before = split_lines(source);
    std::vector<std::string> after = split_lines(mutated);
    CHECK(after.size() == before.size() - 1);
    CHECK(mutated.find("a = a + x;") != std::string::npos);  // one copy survives

    // the deleted statement is the seed-chosen one (index 1 of the ';' lines)
    CHECK(mutated ==
          "int triple(int x) {\n"
          "    int a = x;\n"
          "    a = a + x;\n"
          "    return a;\n"
          "}");

    TempDir workdir("mut-test");
    CompileOutcome outcome = compile_source(mutated, gcc_config(OptLevel::O0),
                                            OutputKind::shared_library, workdir.path());
    CHECK_MESSAGE(outcome.success, outcome.diagnostics);
}

TEST_CASE("mutator with no statement lines returns the source unchanged") {
    CHECK(MutatorBackend::delete_one_statement("int f(void) { return 0; }", 5) ==
          "int f(void) { return 0; }");
}

TEST_CASE("extract_code takes the first fence") {
    CHECK(extract_code("```c\nint f(){}\n```") == "int f(){}");
    CHECK(extract_code("int f(){}") == "int f(){}");
    CHECK(extract_code("```c\nfirst\n```\ntext\n```c\nsecond\n```") == "first");
    CHECK(extract_code("prose before\n```\nbody\n```\nprose after") == "body");
    CHECK(extract_code("```c\nunclosed fence\nstill code") == "unclosed fence\nstill code");
    CHECK(extract_code("") == "");
}

TEST_CASE("extract_code is idempotent") {
    std::mt19937 rng(77);
    const std::vector<std::string> fragments = {
        "```c",  "```",  "int f() {", "  return 1;", "}", "",
        "   hello ``` not a fence", "```asm", "text",
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::string input;
        int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) input += fragments[rng() % fragments.size()] + "\n";
        std::string once = extract_code(input);
        CHECK_MESSAGE(extract_code(once) == once, "not idempotent for:\n", input);
    }
}

namespace {

// In-process chat-completions stand-in for the remote backend tests.
struct FakeEndpoint {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> calls{0};
    nlohmann::json last_request;
    int fail_first_n = 0;

    FakeEndpoint() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
            int n = ++calls;
            last_request = nlohmann::json::parse(req.body);
            if (n <= fail_first_n) {
                res.status = 503;
                res.set_content("overloaded", "text/plain");
                return;
            }
            nlohmann::json reply = {
                {"choices",
                 nlohmann::json::array(
                     {{{"message",
                        {{"role", "assistant"},
                         {"content", "```c\nint f0(int a){return a+1;}\n```"}}}}})}};
            res.set_content(reply.dump(), "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~FakeEndpoint() {
        server.stop();
        thread.join();
    }

    RemoteConfig config() const {
        RemoteConfig cfg;
        cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
        cfg.model_name = "test-model";
        cfg.initial_backoff_s = 0.05;
        return cfg;
    }
};

}  // namespace

TEST_CASE("remote backend posts a pinned chat-completions payload") {
    FakeEndpoint endpoint;
    auto backend = make_remote_backend(endpoint.config());

    GenerationRequest req;
    req.prompt = "What is the C source code of the assembly code below:\n```asm\nret\n```\n";
    req.max_new_tokens = 512;
    std::string output = backend->generate(req);
    CHECK(output == "```c\nint f0(int a){return a+1;}\n```");

    const nlohmann::json& sent = endpoint.last_request;
    CHECK(sent.at("model") == "test-model");
    CHECK(sent.at("temperature") == 0);
    CHECK(sent.at("max_tokens") == 512);
    CHECK(sent.at("messages").size() == 1);
    CHECK(sent.at("messages").at(0).at("role") == "user");
    CHECK(sent.at("messages").at(0).at("content") == req.prompt);
}

TEST_CASE("remote backend retries transient failures with backoff") {
    FakeEndpoint endpoint;
    endpoint.fail_first_n = 2;
    auto backend = make_remote_backend(endpoint.config());

    GenerationRequest req;
    req.prompt = "p";
    CHECK(backend->generate(req) == "```c\nint f0(int a){return a+1;}\n```");
    CHECK(endpoint.calls.load() == 3);
}

TEST_CASE("remote backend reports the attempt count when the endpoint stays down") {
    RemoteConfig cfg;
    cfg.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";  // nothing listens here
    cfg.model_name = "test-model";
    cfg.initial_backoff_s = 0.01;
    auto backend = make_remote_backend(cfg);

    GenerationRequest req;
    req.prompt = "p";
    try {
        backend->generate(req);
        FAIL("expected NetworkError");
    } catch (const NetworkError& e) {
        CHECK(e.attempts == 3);
    }
}

TEST_CASE("remote backend rejects unusable configurations") {
    RemoteConfig cfg;
    cfg.endpoint_url = "ftp://example.com/x";
    cfg.model_name = "m";
    CHECK_THROWS_AS(make_remote_backend(cfg), BackendMisconfigured);

    cfg.endpoint_url = "http://example.com/v1/chat/completions";
    cfg.model_name = "";
    CHECK_THROWS_AS(make_remote_backend(cfg), BackendMisconfigured);
}
