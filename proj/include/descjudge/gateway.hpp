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

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "descjudge/cassette.hpp"
#include "descjudge/corpus.hpp"
#include "descjudge/embedding.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/mock.hpp"
#include "descjudge/prompts.hpp"
#include "descjudge/questiongen.hpp"
#include "descjudge/scoring.hpp"
#include "descjudge/transport.hpp"

namespace descjudge {

/// One judge endpoint. `credentials_env` names the environment variable
/// holding the bearer token; the token itself is never serialized anywhere.
/// Endpoint schemes:
///   http(s)://...      chat-completion provider
///   mock:<persona>     built-in deterministic judge; optional
///                      ?seed=<s>&style=<family_a|family_b|divergent>
///   scripted:<path>    fixture-driven judge loaded from a JSON file
struct JudgeSpec {
    std::string judge_id;
    std::string endpoint;
    std::string model_name;
    std::map<std::string, double> sampling{{"temperature", 0.0}};
    std::string credentials_env;
};

/// One completed request/response round trip, as persisted to cassettes.
struct JudgeExchange {
    std::string request_digest;
    PromptBundle prompt;
    std::string response_text;
    std::chrono::milliseconds latency{0};
    int attempt_count = 1;
    std::chrono::system_clock::time_point timestamp;
};

namespace detail {

inline std::map<std::string, std::string> parse_endpoint_params(const std::string& query) {
    std::map<std::string, std::string> params;
    std::size_t pos = 0;
    while (pos < query.size()) {
        std::size_t amp = query.find('&', pos);
        if (amp == std::string::npos) amp = query.size();
        std::string kv = query.substr(pos, amp - pos);
        std::size_t eq = kv.find('=');
        if (eq != std::string::npos) params[kv.substr(0, eq)] = kv.substr(eq + 1);
        pos = amp + 1;
    }
    return params;
}

} // namespace detail

/// Default endpoint-scheme dispatch for judge transports.
inline std::shared_ptr<Transport> make_transport(const JudgeSpec& judge) {
    if (judge.endpoint.rfind("mock:", 0) == 0) {
        std::string rest = judge.endpoint.substr(5);
        std::string persona_name = rest;
        std::map<std::string, std::string> params;
        if (std::size_t q = rest.find('?'); q != std::string::npos) {
            persona_name = rest.substr(0, q);
            params = detail::parse_endpoint_params(rest.substr(q + 1));
        }
        auto persona = mock_persona_from_name(persona_name);
        if (!persona) throw FatalConfigError("unknown mock persona '" + persona_name + "'");
        QuestionStyle style = QuestionStyle::FAMILY_A;
        if (auto it = params.find("style"); it != params.end()) {
            auto s = question_style_from_name(it->second);
            if (!s) throw FatalConfigError("unknown question style '" + it->second + "'");
            style = *s;
        }
        std::string seed;
        if (auto it = params.find("seed"); it != params.end()) seed = it->second;
        return std::make_shared<MockJudgeTransport>(*persona, seed, style);
    }
    if (judge.endpoint.rfind("scripted:", 0) == 0)
        return ScriptedJudgeTransport::from_file(judge.endpoint.substr(9));
    return std::make_shared<HttpTransport>(judge.endpoint, judge.credentials_env);
}

/// Uniform frontend for judge and embedding providers. Wraps every call with
/// the retry budget, per-judge in-flight cap and cassette handling; parses
/// and validates responses into typed results. A single gateway is shared
/// across workers.
class Gateway {
  public:
    struct Options {
        RetryPolicy retry{};
        int max_in_flight_per_judge = 2;
        /// Injectable so tests can skip real backoff waits; null means sleep.
        std::function<void(std::chrono::milliseconds)> sleeper;
    };

    static std::shared_ptr<Gateway> with_cassette(GatewayMode mode,
                                                  const std::filesystem::path& cassette_path,
                                                  Options options) {
        auto gw = std::make_shared<Gateway>(mode, options);
        switch (mode) {
            case GatewayMode::REPLAY: gw->cassette_ = Cassette::open_replay(cassette_path); break;
            case GatewayMode::RECORD: gw->cassette_ = Cassette::open_record(cassette_path); break;
            case GatewayMode::LIVE: break;
        }
        return gw;
    }

    static std::shared_ptr<Gateway> with_cassette(GatewayMode mode,
                                                  const std::filesystem::path& cassette_path) {
        return with_cassette(mode, cassette_path, Options{});
    }

    static std::shared_ptr<Gateway> live(Options options) {
        return std::make_shared<Gateway>(GatewayMode::LIVE, options);
    }

    static std::shared_ptr<Gateway> live() { return live(Options{}); }

    Gateway(GatewayMode mode, Options options) : mode_(mode), options_(std::move(options)) {
        register_embedder(std::make_shared<HashingEmbedder>());
    }

    GatewayMode mode() const { return mode_; }

    /// Pins a transport for one judge_id, overriding endpoint dispatch.
    void register_transport(const std::string& judge_id, std::shared_ptr<Transport> transport) {
        std::lock_guard lock(mutex_);
        transports_[judge_id] = std::move(transport);
    }

    void register_embedder(std::shared_ptr<EmbeddingBackend> backend) {
        std::lock_guard lock(mutex_);
        embedders_[backend->spec().provider_id] = std::move(backend);
    }

    /// Asks a judge to synthesize verification questions for a sample.
    QuestionSet generate_questions(const JudgeSpec& judge, const Sample& sample) {
        PromptBundle prompt = build_question_prompt(sample);
        return run_parsed<QuestionSet>(judge, prompt, "question_synthesis", sample.sample_id,
                                       [&](const std::string& text) {
                                           return parse_question_response(text, sample.sample_id,
                                                                          judge.model_name);
                                       });
    }

    /// Grades every question against the candidate. Returns one verdict per
    /// question, aligned with question order; a count or grade mismatch is a
    /// ContractError and never yields a partial verdict list.
    QuestionVerdicts evaluate_questions(const JudgeSpec& judge, const Sample& sample,
                                        const CandidateDescription& candidate,
                                        const QuestionSet& questions) {
        if (questions.positive.empty() && questions.negative.empty())
            throw EmptyInputError("question set for '" + sample.sample_id + "' is empty on both polarities");
        PromptBundle prompt = build_verdict_prompt(sample, candidate, questions);
        return run_parsed<QuestionVerdicts>(judge, prompt, "question_verdicts", sample.sample_id,
                                            [&](const std::string& text) {
                                                return parse_verdicts(text, questions.positive.size(),
                                                                      questions.negative.size());
                                            });
    }

    /// Asks a judge for the accuracy / completeness / hallucination-penalty
    /// triple plus an explanation.
    HolisticAssessment assess_holistic(const JudgeSpec& judge, const Sample& sample,
                                       const CandidateDescription& candidate) {
        PromptBundle prompt = build_holistic_prompt(sample, candidate);
        return run_parsed<HolisticAssessment>(judge, prompt, "holistic", sample.sample_id,
                                              [&](const std::string& text) { return parse_holistic(text); });
    }

    /// Embeds texts through the backend registered for the spec's provider.
    /// Row i embeds texts[i]; UNIT_NORM rows are L2-normalized. Embedding
    /// calls go through the cassette like judge calls do.
    Matrix embed(const EmbeddingSpec& spec, const std::vector<std::string>& texts) {
        detail_check_inputs(texts);
        ++logical_calls_;

        std::string digest = embedding_digest(spec, texts);
        if (mode_ == GatewayMode::REPLAY) {
            auto hit = replay_cassette().lookup(digest);
            if (!hit)
                throw CassetteMissError("no cassette entry for embedding digest " + digest +
                                        " (inputs changed since recording?)");
            return matrix_from_text(*hit, texts.size());
        }

        auto backend = find_embedder(spec.provider_id);
        Matrix m = backend->encode(texts);
        if (m.rows() != texts.size() || m.cols() != static_cast<std::size_t>(spec.dimension))
            throw ContractError("embedding backend returned wrong shape");
        if (spec.normalization == Normalization::UNIT_NORM) detail::unit_normalize_rows(m);
        if (mode_ == GatewayMode::RECORD)
            cassette_->record(digest, spec.provider_id, matrix_to_text(m), std::chrono::milliseconds(0));
        return m;
    }

    /// Count of physical transport sends. Stays zero for a REPLAY gateway.
    long transport_ops() const { return transport_ops_.load(); }
    /// Count of logical judge/embedding operations requested of the gateway.
    long logical_calls() const { return logical_calls_.load(); }

  private:
    template <typename T>
    T run_parsed(const JudgeSpec& judge, const PromptBundle& prompt, const char* kind,
                 const std::string& sample_id, const std::function<T(const std::string&)>& parse) {
        ++logical_calls_;
        ChatRequest request{judge.judge_id, judge.model_name, judge.sampling,
                            prompt.system_text, prompt.user_text, kind, sample_id};
        std::string digest = request_digest(request);

        if (mode_ == GatewayMode::REPLAY) {
            auto hit = replay_cassette().lookup(digest);
            if (!hit)
                throw CassetteMissError("no cassette entry for digest " + digest + " (" + kind + ", sample " +
                                        sample_id + "); prompt or config drifted since recording");
            return parse(*hit); // deterministic input: retrying cannot change the outcome
        }

        std::exception_ptr last_error;
        for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
            try {
                auto started = std::chrono::steady_clock::now();
                std::string text = send_once(judge, request);
                JudgeExchange exchange{digest, prompt, std::move(text),
                                       std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::steady_clock::now() - started),
                                       attempt, std::chrono::system_clock::now()};
                T parsed = parse(exchange.response_text);
                if (mode_ == GatewayMode::RECORD)
                    cassette_->record(exchange.request_digest, judge.judge_id, exchange.response_text,
                                      exchange.latency, exchange.timestamp);
                return parsed;
            } catch (const TransportError& e) {
                last_error = std::current_exception();
                if (!e.retryable()) break;
            } catch (const ParseError&) {
                last_error = std::current_exception();
            } catch (const ContractError&) {
                last_error = std::current_exception();
            }
            if (attempt < options_.retry.max_attempts) {
                std::chrono::milliseconds delay = options_.retry.delay(attempt, next_jitter());
                if (options_.sleeper) options_.sleeper(delay);
                else std::this_thread::sleep_for(delay);
            }
        }
        std::rethrow_exception(last_error);
    }

    Cassette& replay_cassette() {
        if (!cassette_) throw FatalConfigError("REPLAY gateway constructed without a cassette");
        return *cassette_;
    }

    std::string send_once(const JudgeSpec& judge, const ChatRequest& request) {
        std::shared_ptr<Transport> transport = find_transport(judge);
        TokenBucket::Guard guard(bucket_for(judge.judge_id));
        ++transport_ops_;
        return transport->send(request);
    }

    std::shared_ptr<Transport> find_transport(const JudgeSpec& judge) {
        std::lock_guard lock(mutex_);
        auto it = transports_.find(judge.judge_id);
        if (it != transports_.end()) return it->second;
        auto transport = make_transport(judge);
        transports_[judge.judge_id] = transport;
        return transport;
    }

    std::shared_ptr<EmbeddingBackend> find_embedder(const std::string& provider_id) {
        std::lock_guard lock(mutex_);
        auto it = embedders_.find(provider_id);
        if (it == embedders_.end())
            throw FatalConfigError("no embedding backend registered for '" + provider_id + "'");
        return it->second;
    }

    TokenBucket& bucket_for(const std::string& judge_id) {
        std::lock_guard lock(mutex_);
        auto it = buckets_.find(judge_id);
        if (it == buckets_.end())
            it = buckets_.emplace(judge_id, std::make_unique<TokenBucket>(options_.max_in_flight_per_judge))
                     .first;
        return *it->second;
    }

    double next_jitter() {
        std::lock_guard lock(mutex_);
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    }

    static void detail_check_inputs(const std::vector<std::string>& texts) {
        if (texts.empty()) throw EmptyInputError("no texts to embed");
        for (const auto& t : texts)
            if (t.empty()) throw EmptyInputError("cannot embed an empty string");
    }

    static std::string embedding_digest(const EmbeddingSpec& spec, const std::vector<std::string>& texts) {
        std::string buf = "embedding\x1f" + spec.provider_id + "\x1f" + std::to_string(spec.dimension) +
                          "\x1f" + (spec.normalization == Normalization::UNIT_NORM ? "unit" : "raw");
        for (const auto& t : texts) {
            buf += '\x1f';
            buf += t;
        }
        return fnv1a64_hex(buf);
    }

    static std::string matrix_to_text(const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (double v : m.row(r)) row.push_back(v);
            rows.push_back(std::move(row));
        }
        return rows.dump();
    }

    static Matrix matrix_from_text(const std::string& text, std::size_t expected_rows) {
        nlohmann::json rows = nlohmann::json::parse(text, nullptr, false);
        if (rows.is_discarded() || !rows.is_array() || rows.empty())
            throw ParseError("cassette embedding entry is not a row array");
        if (rows.size() != expected_rows) throw ContractError("cassette embedding row count mismatch");
        Matrix m(rows.size(), rows.at(0).size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& row = rows.at(r);
            if (!row.is_array() || row.size() != m.cols())
                throw ParseError("ragged cassette embedding entry");
            for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = row.at(c).get<double>();
        }
        return m;
    }

    static QuestionVerdicts parse_verdicts(const std::string& text, std::size_t n_positive,
                                           std::size_t n_negative) {
        nlohmann::json obj = detail::extract_json_object(text);
        QuestionVerdicts verdicts;
        verdicts.positive = parse_verdict_list<PositiveVerdict>(obj, "positive", n_positive,
                                                                positive_grade_from_name);
        verdicts.negative = parse_verdict_list<NegativeVerdict>(obj, "negative", n_negative,
                                                                negative_grade_from_name);
        return verdicts;
    }

    template <typename VerdictT, typename GradeParser>
    static std::vector<VerdictT> parse_verdict_list(const nlohmann::json& obj, const char* key,
                                                    std::size_t expected, GradeParser parse_grade) {
        auto it = obj.find(key);
        if (expected == 0) {
            if (it != obj.end() && it->is_array() && !it->empty())
                throw ContractError(std::string("judge returned verdicts for an empty '") + key +
                                    "' question list");
            return {};
        }
        if (it == obj.end() || !it->is_array())
            throw ContractError(std::string("verdict response lacks a '") + key + "' array");
        if (it->size() != expected)
            throw ContractError(std::string("judge returned ") + std::to_string(it->size()) + " '" + key +
                                "' verdicts for " + std::to_string(expected) + " questions");

        std::vector<VerdictT> out(expected);
        std::vector<bool> seen(expected, false);
        for (const auto& entry : *it) {
            if (!entry.is_object() || !entry.contains("index") || !entry.contains("grade"))
                throw ContractError("verdict entry missing index or grade");
            if (!entry.at("index").is_number_integer())
                throw ContractError("verdict index is not an integer");
            long long idx = entry.at("index").get<long long>();
            if (idx < 0 || idx >= static_cast<long long>(expected) || seen[static_cast<std::size_t>(idx)])
                throw ContractError("verdict index " + std::to_string(idx) + " out of range or repeated");
            auto grade = parse_grade(entry.at("grade").get<std::string>());
            if (!grade)
                throw ContractError("grade '" + entry.at("grade").get<std::string>() +
                                    "' is outside the point scheme");
            VerdictT v;
            v.question_index = static_cast<int>(idx);
            v.grade = *grade;
            if (entry.contains("rationale") && entry.at("rationale").is_string())
                v.rationale = entry.at("rationale").get<std::string>();
            out[static_cast<std::size_t>(idx)] = std::move(v);
            seen[static_cast<std::size_t>(idx)] = true;
        }
        return out;
    }

    static HolisticAssessment parse_holistic(const std::string& text) {
        nlohmann::json obj = detail::extract_json_object(text);
        HolisticAssessment h;
        auto read_dim = [&obj](const char* key) {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_number())
                throw ContractError(std::string("holistic response missing '") + key + "'");
            double v = it->get<double>();
            if (v < 0.0 || v > 1.0)
                throw ContractError(std::string("holistic '") + key + "' = " + std::to_string(v) +
                                    " outside [0,1]");
            return v;
        };
        h.accuracy = read_dim("accuracy");
        h.completeness = read_dim("completeness");
        h.hallucination_penalty = read_dim("hallucination_penalty");
        if (obj.contains("explanation") && obj.at("explanation").is_string())
            h.explanation = obj.at("explanation").get<std::string>();
        return h;
    }

    GatewayMode mode_;
    Options options_;
    std::unique_ptr<Cassette> cassette_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Transport>> transports_;
    std::map<std::string, std::shared_ptr<EmbeddingBackend>> embedders_;
    std::map<std::string, std::unique_ptr<TokenBucket>> buckets_;
    std::mt19937 rng_{0x5eed};
    std::atomic<long> transport_ops_{0};
    std::atomic<long> logical_calls_{0};
};

/// OpenAI-style embedding provider client: POST {"model", "input"} to the
/// endpoint, read data[i].embedding. Bearer token from the named env var.
class HttpEmbedder : public EmbeddingBackend {
  public:
    HttpEmbedder(EmbeddingSpec spec, std::string endpoint, std::string model_name,
                 std::string credentials_env)
        : spec_(std::move(spec)), endpoint_(std::move(endpoint)), model_name_(std::move(model_name)),
          credentials_env_(std::move(credentials_env)) {
        std::string rest;
        if (endpoint_.rfind("https://", 0) == 0) {
            tls_ = true;
            rest = endpoint_.substr(8);
        } else if (endpoint_.rfind("http://", 0) == 0) {
            tls_ = false;
            rest = endpoint_.substr(7);
        } else {
            throw FatalConfigError("unsupported embedding endpoint scheme in '" + endpoint_ + "'");
        }
        std::size_t slash = rest.find('/');
        host_ = slash == std::string::npos ? rest : rest.substr(0, slash);
        path_ = slash == std::string::npos ? "/v1/embeddings" : rest.substr(slash);
    }

    const EmbeddingSpec& spec() const override { return spec_; }

    Matrix encode(const std::vector<std::string>& texts) override {
        nlohmann::json body{{"model", model_name_}, {"input", texts}};
        httplib::Headers headers;
        if (!credentials_env_.empty()) {
            const char* token = std::getenv(credentials_env_.c_str());
            if (token == nullptr || *token == '\0')
                throw TransportError("credentials env var '" + credentials_env_ + "' is not set", false);
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        httplib::Client client((tls_ ? "https://" : "http://") + host_);
        client.set_connection_timeout(30);
        client.set_read_timeout(120);
        auto result = client.Post(path_, headers, body.dump(), "application/json");
        if (!result)
            throw TransportError("connection to " + host_ + " failed: " + httplib::to_string(result.error()),
                                 true);
        if (result->status == 429 || result->status >= 500)
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host_, true);
        if (result->status != 200)
            throw TransportError("HTTP " + std::to_string(result->status) + " from " + host_, false);

        nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("data") || !reply.at("data").is_array() ||
            reply.at("data").size() != texts.size())
            throw ContractError("embedding reply malformed or row count mismatch");

        Matrix m(texts.size(), static_cast<std::size_t>(spec_.dimension));
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const auto& row = reply.at("data").at(i).at("embedding");
            if (!row.is_array() || row.size() != m.cols())
                throw ContractError("embedding row " + std::to_string(i) + " has wrong dimension");
            for (std::size_t c = 0; c < m.cols(); ++c) m.at(i, c) = row.at(c).get<double>();
        }
        return m;
    }

  private:
    EmbeddingSpec spec_;
    std::string endpoint_;
    std::string model_name_;
    std::string credentials_env_;
    std::string host_;
    std::string path_;
    bool tls_ = false;
};

/// Presents a gateway-routed embedding provider as a plain backend, so code
/// that takes an EmbeddingBackend& gains cassette record/replay for free.
class GatewayEmbedder : public EmbeddingBackend {
  public:
    GatewayEmbedder(std::shared_ptr<Gateway> gateway, EmbeddingSpec spec)
        : gateway_(std::move(gateway)), spec_(std::move(spec)) {}

    const EmbeddingSpec& spec() const override { return spec_; }
    Matrix encode(const std::vector<std::string>& texts) override { return gateway_->embed(spec_, texts); }

  private:
    std::shared_ptr<Gateway> gateway_;
    EmbeddingSpec spec_;
};

} // namespace descjudge
