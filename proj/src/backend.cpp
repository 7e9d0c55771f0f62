#include "sc2dec/backend.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sc2dec/errors.hpp"
#include "sc2dec/strutil.hpp"

namespace sc2dec {

std::string EchoBackend::generate(const GenerationRequest& req) {
    auto it = answers_.find(req.sample_id);
    if (it == answers_.end())
        throw BackendMisconfigured("echo backend has no answer for sample id '" +
                                   req.sample_id + "'");
    return it->second;
}

std::string MutatorBackend::delete_one_statement(const std::string& source, long seed) {
    std::vector<std::string> lines = split_lines(source);
    std::vector<size_t> candidates;
    for (size_t i = 0; i < lines.size(); ++i) {
        std::string t = trim(lines[i]);
        if (!t.empty() && t.back() == ';') candidates.push_back(i);
    }
    if (candidates.empty()) return source;
    size_t victim = candidates[static_cast<size_t>(seed % static_cast<long>(candidates.size()))];
    lines.erase(lines.begin() + victim);
    return join_lines(lines);
}

std::string MutatorBackend::generate(const GenerationRequest& req) {
    auto it = answers_.find(req.sample_id);
    if (it == answers_.end())
        throw BackendMisconfigured("mutator backend has no answer for sample id '" +
                                   req.sample_id + "'");
    return delete_one_statement(it->second, seed_);
}

std::string extract_code(const std::string& model_output) {
    std::vector<std::string> lines = split_lines(model_output);
    size_t open = lines.size();
    for (size_t i = 0; i < lines.size(); ++i) {
        if (starts_with(trim_view(lines[i]), "```")) {
            open = i;
            break;
        }
    }
    if (open == lines.size()) return trim(model_output);

    size_t close = lines.size();
    for (size_t i = open + 1; i < lines.size(); ++i) {
        if (starts_with(trim_view(lines[i]), "```")) {
            close = i;
            break;
        }
    }
    std::vector<std::string> content(lines.begin() + open + 1,
                                     lines.begin() + (close == lines.size() ? lines.size() : close));
    return trim(join_lines(content));
}

namespace {

struct ParsedUrl {
    bool https = false;
    std::string host_port;  // "host" or "host:port"
    std::string path;       // begins with '/'
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl parsed;
    std::string rest;
    if (starts_with(url, "https://")) {
        parsed.https = true;
        rest = url.substr(8);
    } else if (starts_with(url, "http://")) {
        rest = url.substr(7);
    } else {
        throw BackendMisconfigured("endpoint_url must start with http:// or https://: " + url);
    }
    size_t slash = rest.find('/');
    parsed.host_port = slash == std::string::npos ? rest : rest.substr(0, slash);
    parsed.path = slash == std::string::npos ? "/" : rest.substr(slash);
    if (parsed.host_port.empty())
        throw BackendMisconfigured("endpoint_url has no host: " + url);
    return parsed;
}

class RemoteBackend final : public Backend {
  public:
    explicit RemoteBackend(const RemoteConfig& cfg) : cfg_(cfg), url_(parse_url(cfg.endpoint_url)) {
        if (cfg_.model_name.empty())
            throw BackendMisconfigured("remote backend requires a model name");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
        if (url_.https)
            throw BackendMisconfigured("built without TLS support; use an http:// endpoint");
#endif
    }

    std::string name() const override { return "remote:" + cfg_.model_name; }

    std::string generate(const GenerationRequest& req) override {
        nlohmann::json body = {
            {"model", cfg_.model_name},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
            {"temperature", 0},
            {"max_tokens", req.max_new_tokens},
        };
        if (!req.stop_sequences.empty()) body["stop"] = req.stop_sequences;

        InFlightSlot slot(*this);
        std::string last_error;
        for (int attempt = 1; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 1) {
                auto backoff = std::chrono::duration<double>(
                    cfg_.initial_backoff_s * static_cast<double>(1 << (attempt - 2)));
                std::this_thread::sleep_for(
                    std::chrono::duration_cast<std::chrono::milliseconds>(backoff));
            }
            auto outcome = post_once(body, last_error);
            if (outcome) return *outcome;
        }
        throw NetworkError("chat-completions request failed: " + last_error, cfg_.max_retries);
    }

  private:
    // RAII guard over the max-in-flight limit.
    class InFlightSlot {
      public:
        explicit InFlightSlot(RemoteBackend& owner) : owner_(owner) {
            std::unique_lock lock(owner_.mutex_);
            owner_.slot_free_.wait(lock, [&] { return owner_.in_flight_ < owner_.cfg_.max_in_flight; });
            ++owner_.in_flight_;
        }
        ~InFlightSlot() {
            {
                std::lock_guard lock(owner_.mutex_);
                --owner_.in_flight_;
            }
            owner_.slot_free_.notify_one();
        }

      private:
        RemoteBackend& owner_;
    };

    std::optional<std::string> post_once(const nlohmann::json& body, std::string& last_error) {
        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        auto handle_response = [&](const httplib::Result& res) -> std::optional<std::string> {
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                return std::nullopt;
            }
            if (res->status >= 500) {
                last_error = "server returned " + std::to_string(res->status);
                return std::nullopt;
            }
            if (res->status != 200)
                throw BackendMisconfigured("endpoint returned HTTP " +
                                           std::to_string(res->status) + ": " + res->body);
            try {
                nlohmann::json reply = nlohmann::json::parse(res->body);
                return reply.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                last_error = std::string("malformed completion payload: ") + e.what();
                return std::nullopt;
            }
        };

        std::string payload = body.dump();
        std::string base = (url_.https ? "https://" : "http://") + url_.host_port;
        httplib::Client client(base);
        configure(client);
        return handle_response(client.Post(url_.path, headers, payload, "application/json"));
    }

    void configure(httplib::Client& client) {
        auto secs = static_cast<time_t>(cfg_.request_timeout_s);
        client.set_connection_timeout(secs, 0);
        client.set_read_timeout(secs, 0);
        client.set_write_timeout(secs, 0);
    }

    RemoteConfig cfg_;
    ParsedUrl url_;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

}  // namespace

std::unique_ptr<Backend> make_remote_backend(const RemoteConfig& cfg) {
    return std::make_unique<RemoteBackend>(cfg);
}

}  // namespace sc2dec
