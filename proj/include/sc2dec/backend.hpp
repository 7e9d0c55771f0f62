#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sc2dec {

// Greedy decoding only; the experiments use no sampling.
struct GenerationRequest {
    std::string prompt;
    int max_new_tokens = 2048;
    std::vector<std::string> stop_sequences;
    std::string sample_id;  // request metadata, used by the deterministic doubles
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string generate(const GenerationRequest& req) = 0;
    virtual std::string name() const = 0;
};

// Always returns the empty string.
class NullBackend final : public Backend {
  public:
    std::string generate(const GenerationRequest&) override { return {}; }
    std::string name() const override { return "null"; }
};

// Returns the mapped source for the request's sample id.
class EchoBackend final : public Backend {
  public:
    explicit EchoBackend(std::map<std::string, std::string> answers)
        : answers_(std::move(answers)) {}
    std::string generate(const GenerationRequest& req) override;
    std::string name() const override { return "echo"; }

  private:
    std::map<std::string, std::string> answers_;
};

// Returns the mapped source with one statement line removed, chosen by seed.
// Stands in for a model that emits compilable-but-flawed code.
class MutatorBackend final : public Backend {
  public:
    MutatorBackend(std::map<std::string, std::string> answers, long seed)
        : answers_(std::move(answers)), seed_(seed) {}
    std::string generate(const GenerationRequest& req) override;
    std::string name() const override { return "mutator"; }

    static std::string delete_one_statement(const std::string& source, long seed);

  private:
    std::map<std::string, std::string> answers_;
    long seed_;
};

struct RemoteConfig {
    std::string endpoint_url;  // e.g. http://host:port/v1/chat/completions
    std::string model_name;
    std::string api_key_env = "SC2DEC_API_KEY";
    int max_retries = 3;
    double initial_backoff_s = 1.0;
    int max_in_flight = 4;
    double request_timeout_s = 120.0;
};

// One chat-completions call per request, temperature pinned to 0.
std::unique_ptr<Backend> make_remote_backend(const RemoteConfig& cfg);

// First fenced code block's contents if any fence exists, else the whole
// output; trimmed either way. Idempotent.
std::string extract_code(const std::string& model_output);

}  // namespace sc2dec
