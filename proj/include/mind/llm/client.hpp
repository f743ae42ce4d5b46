#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mind/errors.hpp"
#include "mind/llm/prompts.hpp"

namespace mind::llm {

struct ChatRequest {
    std::string model;
    double temperature = 0.4;
    int max_tokens = 512;
    std::vector<ChatMessage> messages;
};

nlohmann::json request_to_json(const ChatRequest& req);

// Stable hex digest of the canonical request body; fixture lookup key.
std::string request_key(const ChatRequest& req);

enum class LlmErrorKind { Auth, Timeout, RateLimit, Transport, BadResponse };

std::string_view llm_error_kind_name(LlmErrorKind k) noexcept;

class LlmError : public CodedError {
  public:
    LlmError(LlmErrorKind kind, const std::string& detail);
    LlmErrorKind kind() const noexcept { return kind_; }
    // Worth retrying: the same request may succeed later.
    bool transient() const noexcept {
        return kind_ == LlmErrorKind::Timeout || kind_ == LlmErrorKind::RateLimit ||
               kind_ == LlmErrorKind::Transport;
    }

  private:
    LlmErrorKind kind_;
};

class Transport {
  public:
    virtual ~Transport() = default;
    // Returns the assistant's text for one chat completion, or throws LlmError.
    virtual std::string complete(const ChatRequest& req) = 0;
};

// OpenAI-compatible chat completions over HTTP.
class HttpTransport : public Transport {
  public:
    struct Options {
        std::string base_url;  // e.g. "https://api.openai.com"
        std::string api_key;
        std::string path = "/v1/chat/completions";
        int timeout_seconds = 120;
    };
    explicit HttpTransport(Options opts) : opts_(std::move(opts)) {}
    std::string complete(const ChatRequest& req) override;

  private:
    Options opts_;
};

// Replays canned responses from a JSONL file keyed by request digest, or
// records a live transport's traffic into one for later offline replay.
class FixtureTransport : public Transport {
  public:
    static std::shared_ptr<FixtureTransport> replay(const std::string& path);
    static std::shared_ptr<FixtureTransport> record(const std::string& path,
                                                    std::shared_ptr<Transport> inner);

    std::string complete(const ChatRequest& req) override;
    size_t recorded() const;

  private:
    FixtureTransport() = default;
    std::map<std::string, std::deque<std::string>> canned_;
    std::map<std::string, std::string> last_;  // repeated identical calls replay the final answer
    std::shared_ptr<Transport> inner_;
    std::ofstream out_;
    size_t recorded_ = 0;
    mutable std::mutex mu_;
};

// Fixed scripted responses in call order; test double.
class ScriptedTransport : public Transport {
  public:
    explicit ScriptedTransport(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string complete(const ChatRequest& req) override;
    const std::vector<ChatRequest>& requests() const { return requests_; }

  private:
    std::vector<std::string> replies_;
    std::vector<ChatRequest> requests_;
    size_t next_ = 0;
    std::mutex mu_;
};

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds base_delay{200};  // doubles per retry
};

class LlmClient {
  public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;
    explicit LlmClient(std::shared_ptr<Transport> transport, RetryPolicy retry = {},
                       Sleeper sleeper = {});

    // Sends the request, retrying transient failures with exponential backoff.
    std::string complete(const ChatRequest& req);
    size_t request_count() const { return count_.load(); }

  private:
    std::shared_ptr<Transport> transport_;
    RetryPolicy retry_;
    Sleeper sleep_;
    std::atomic<size_t> count_{0};
};

}  // namespace mind::llm
