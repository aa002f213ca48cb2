// Copyright 2026 The descjudge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "descjudge/errors.hpp"
#include "descjudge/hashing.hpp"

namespace descjudge {

/// One chat-completion request as the gateway sees it. `kind` and `sample_id`
/// are harness metadata: they route deterministic test doubles and enter the
/// request digest, but only model/messages/sampling go over the wire.
struct ChatRequest {
    std::string judge_id;
    std::string model_name;
    std::map<std::string, double> sampling;
    std::string system_text;
    std::string user_text;
    std::string kind;      // question_synthesis | question_verdicts | holistic
    std::string sample_id;
};

/// Content hash identifying a request. Pure function of
/// (judge_id, prompt, sampling); editing any prompt template changes it,
/// which is how cassette replay detects prompt drift.
inline std::string request_digest(const ChatRequest& req) {
    std::string buf;
    auto feed = [&buf](const std::string& part) {
        buf += part;
        buf += '\x1f';
    };
    feed(req.judge_id);
    feed(req.model_name);
    feed(req.kind);
    feed(req.sample_id);
    for (const auto& [k, v] : req.sampling) feed(k + "=" + std::to_string(v));
    feed(req.system_text);
    feed(req.user_text);
    return fnv1a64_hex(buf);
}

/// Provider connection. Implementations raise TransportError on failure;
/// `retryable()` steers the retry loop.
class Transport {
  public:
    virtual ~Transport() = default;
    /// Returns the assistant message text.
    virtual std::string send(const ChatRequest& request) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{200};
    double multiplier = 2.0;
    double jitter = 0.5; // +-50% of the computed delay

    std::chrono::milliseconds delay(int attempt, double unit_random) const {
        double d = static_cast<double>(base_delay.count());
        for (int i = 1; i < attempt; ++i) d *= multiplier;
        d *= 1.0 + jitter * (2.0 * unit_random - 1.0);
        return std::chrono::milliseconds(static_cast<long long>(d < 0 ? 0 : d));
    }
};

/// Caps concurrent in-flight requests per judge endpoint.
class TokenBucket {
  public:
    explicit TokenBucket(int capacity) : available_(capacity < 1 ? 1 : capacity) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

    class Guard {
      public:
        explicit Guard(TokenBucket& bucket) : bucket_(bucket) { bucket_.acquire(); }
        ~Guard() { bucket_.release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

      private:
        TokenBucket& bucket_;
    };

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

/// Generic chat-completion client (OpenAI-style wire format). The endpoint is
/// scheme://host[:port][/path]; the bearer token is read from the environment
/// variable named in the judge spec and never stored.
class HttpTransport : public Transport {
  public:
    HttpTransport(std::string endpoint, std::string credentials_env)
        : endpoint_(std::move(endpoint)), credentials_env_(std::move(credentials_env)) {
        split_endpoint();
    }

    std::string send(const ChatRequest& request) override {
        nlohmann::json body{
            {"model", request.model_name},
            {"messages", nlohmann::json::array()},
        };
        if (!request.system_text.empty())
            body["messages"].push_back({{"role", "system"}, {"content", request.system_text}});
        body["messages"].push_back({{"role", "user"}, {"content", request.user_text}});
        for (const auto& [k, v] : request.sampling) body[k] = v;

        httplib::Headers headers;
        if (!credentials_env_.empty()) {
            const char* token = std::getenv(credentials_env_.c_str());
            if (token == nullptr || *token == '\0')
                throw TransportError("credentials env var '" + credentials_env_ + "' is not set", false);
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }

        // One client per call: avoids sharing connection state across workers.
        httplib::Client client((tls_ ? "https://" : "http://") + host_);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        auto result = client.Post(path_, headers, body.dump(), "application/json");
        if (!result)
            throw TransportError("connection to " + host_ + " failed: " + httplib::to_string(result.error()),
                                 true);
        if (result->status == 429 || result->status == 408 || result->status >= 500)
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host_, true);
        if (result->status != 200)
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host_, false);

        nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
        if (reply.is_discarded())
            throw TransportError("non-JSON completion body from " + host_, false);
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw TransportError("completion body missing choices[0].message.content", false);
        }
    }

  private:
    void split_endpoint() {
        std::string rest;
        if (endpoint_.rfind("https://", 0) == 0) {
            tls_ = true;
            rest = endpoint_.substr(8);
        } else if (endpoint_.rfind("http://", 0) == 0) {
            tls_ = false;
            rest = endpoint_.substr(7);
        } else {
            throw FatalConfigError("unsupported endpoint scheme in '" + endpoint_ + "'");
        }
        std::size_t slash = rest.find('/');
        host_ = slash == std::string::npos ? rest : rest.substr(0, slash);
        path_ = slash == std::string::npos ? "/v1/chat/completions" : rest.substr(slash);
    }

    std::string endpoint_;
    std::string credentials_env_;
    std::string host_;
    std::string path_;
    bool tls_ = false;
};

} // namespace descjudge
