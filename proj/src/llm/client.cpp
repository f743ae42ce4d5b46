#include "mind/llm/client.hpp"

#include <thread>

#include <httplib.h>

#include "mind/rng.hpp"

namespace mind::llm {

using nlohmann::json;

json request_to_json(const ChatRequest& req) {
    json messages = json::array();
    for (const auto& m : req.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
    return json{{"model", req.model},
                {"temperature", req.temperature},
                {"max_tokens", req.max_tokens},
                {"messages", messages}};
}

std::string request_key(const ChatRequest& req) {
    uint64_t h = fnv1a64(request_to_json(req).dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string_view llm_error_kind_name(LlmErrorKind k) noexcept {
    switch (k) {
        case LlmErrorKind::Auth: return "auth";
        case LlmErrorKind::Timeout: return "timeout";
        case LlmErrorKind::RateLimit: return "rate-limit";
        case LlmErrorKind::Transport: return "transport";
        case LlmErrorKind::BadResponse: return "bad-response";
    }
    return "transport";
}

LlmError::LlmError(LlmErrorKind kind, const std::string& detail)
    : CodedError(std::string("llm-") + std::string(llm_error_kind_name(kind)), detail),
      kind_(kind) {}

std::string HttpTransport::complete(const ChatRequest& req) {
    httplib::Client cli(opts_.base_url);
    cli.set_connection_timeout(opts_.timeout_seconds, 0);
    cli.set_read_timeout(opts_.timeout_seconds, 0);
    cli.set_write_timeout(opts_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!opts_.api_key.empty()) headers.emplace("Authorization", "Bearer " + opts_.api_key);

    auto res = cli.Post(opts_.path, headers, request_to_json(req).dump(), "application/json");
    if (!res) {
        auto err = res.error();
        auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                     err == httplib::Error::Write)
                        ? LlmErrorKind::Timeout
                        : LlmErrorKind::Transport;
        throw LlmError(kind, httplib::to_string(err));
    }
    if (res->status == 401 || res->status == 403)
        throw LlmError(LlmErrorKind::Auth, "status " + std::to_string(res->status));
    if (res->status == 408) throw LlmError(LlmErrorKind::Timeout, "status 408");
    if (res->status == 429) throw LlmError(LlmErrorKind::RateLimit, "status 429");
    if (res->status >= 500)
        throw LlmError(LlmErrorKind::Transport, "status " + std::to_string(res->status));
    if (res->status != 200)
        throw LlmError(LlmErrorKind::BadResponse,
                       "status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));

    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("choices") || !body["choices"].is_array() ||
        body["choices"].empty())
        throw LlmError(LlmErrorKind::BadResponse, "unexpected completion body");
    const json& msg = body["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw LlmError(LlmErrorKind::BadResponse, "completion lacks message content");
    return msg["message"]["content"].get<std::string>();
}

std::shared_ptr<FixtureTransport> FixtureTransport::replay(const std::string& path) {
    auto t = std::shared_ptr<FixtureTransport>(new FixtureTransport());
    std::ifstream in(path);
    if (!in) throw LlmError(LlmErrorKind::Transport, "cannot open fixture " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.contains("key") || !row.contains("response"))
            throw LlmError(LlmErrorKind::BadResponse, "malformed fixture line in " + path);
        std::string key = row["key"].get<std::string>();
        std::string response = row["response"].get<std::string>();
        t->canned_[key].push_back(response);
        t->last_[key] = response;
        ++t->recorded_;
    }
    return t;
}

std::shared_ptr<FixtureTransport> FixtureTransport::record(const std::string& path,
                                                           std::shared_ptr<Transport> inner) {
    auto t = std::shared_ptr<FixtureTransport>(new FixtureTransport());
    t->inner_ = std::move(inner);
    t->out_.open(path, std::ios::app);
    if (!t->out_) throw LlmError(LlmErrorKind::Transport, "cannot open fixture " + path);
    return t;
}

std::string FixtureTransport::complete(const ChatRequest& req) {
    const std::string key = request_key(req);
    if (inner_) {
        std::string response = inner_->complete(req);
        std::lock_guard<std::mutex> lock(mu_);
        out_ << json{{"key", key}, {"request", request_to_json(req)}, {"response", response}}.dump()
             << "\n";
        out_.flush();
        ++recorded_;
        return response;
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto it = canned_.find(key);
    if (it != canned_.end() && !it->second.empty()) {
        std::string response = it->second.front();
        if (it->second.size() > 1) it->second.pop_front();
        return response;
    }
    auto last = last_.find(key);
    if (last != last_.end()) return last->second;
    throw LlmError(LlmErrorKind::BadResponse, "fixture-miss: " + key);
}

size_t FixtureTransport::recorded() const {
    std::lock_guard<std::mutex> lock(mu_);
    return recorded_;
}

std::string ScriptedTransport::complete(const ChatRequest& req) {
    std::lock_guard<std::mutex> lock(mu_);
    requests_.push_back(req);
    if (next_ >= replies_.size())
        throw LlmError(LlmErrorKind::Transport, "script exhausted after " +
                                                    std::to_string(replies_.size()) + " replies");
    return replies_[next_++];
}

LlmClient::LlmClient(std::shared_ptr<Transport> transport, RetryPolicy retry, Sleeper sleeper)
    : transport_(std::move(transport)), retry_(retry), sleep_(std::move(sleeper)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string LlmClient::complete(const ChatRequest& req) {
    auto delay = retry_.base_delay;
    for (int attempt = 1;; ++attempt) {
        try {
            ++count_;
            return transport_->complete(req);
        } catch (const LlmError& e) {
            if (!e.transient() || attempt >= retry_.attempts) throw;
            sleep_(delay);
            delay *= 2;
        }
    }
}

}  // namespace mind::llm
