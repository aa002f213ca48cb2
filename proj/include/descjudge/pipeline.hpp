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
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "descjudge/corpus.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/gateway.hpp"
#include "descjudge/questiongen.hpp"
#include "descjudge/results.hpp"
#include "descjudge/scoring.hpp"

namespace descjudge {

inline constexpr int kResultSchemaVersion = 1;

enum class QuestionSource { SELF_GENERATED, EXTERNAL };

/// Full description of one evaluation run. The checkpoint is the result file
/// itself: a header line carrying the config, then one record per completed
/// (sample, judge) pair.
struct RunConfig {
    std::filesystem::path corpus_path;
    std::vector<JudgeSpec> judges;
    QuestionSource question_source = QuestionSource::SELF_GENERATED;
    std::filesystem::path external_questions_path;
    Weights weights;
    GatewayMode gateway_mode = GatewayMode::REPLAY;
    std::filesystem::path cassette_path;
    std::filesystem::path checkpoint_path;
    int concurrency = 1;

    void validate() const {
        if (judges.empty()) throw FatalConfigError("config needs at least one judge");
        if (concurrency < 1) throw FatalConfigError("concurrency must be >= 1");
        if (checkpoint_path.empty()) throw FatalConfigError("config needs a result/checkpoint path");
        if (question_source == QuestionSource::EXTERNAL && external_questions_path.empty())
            throw FatalConfigError("external question source needs a path");
        if (gateway_mode != GatewayMode::LIVE && cassette_path.empty())
            throw FatalConfigError("RECORD/REPLAY gateway modes need a cassette path");
        std::set<std::string> ids;
        for (const auto& j : judges)
            if (!ids.insert(j.judge_id).second)
                throw FatalConfigError("duplicate judge_id '" + j.judge_id + "'");
        weights.validate();
    }
};

inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json judges = nlohmann::json::array();
    for (const auto& j : c.judges)
        judges.push_back({{"judge_id", j.judge_id},
                          {"endpoint", j.endpoint},
                          {"model_name", j.model_name},
                          {"sampling", j.sampling},
                          {"credentials_env", j.credentials_env}});
    nlohmann::json source = c.question_source == QuestionSource::SELF_GENERATED
                                ? nlohmann::json{{"mode", "self"}}
                                : nlohmann::json{{"mode", "external"},
                                                 {"path", c.external_questions_path.string()}};
    return {
        {"corpus", c.corpus_path.string()},
        {"judges", judges},
        {"question_source", source},
        {"weights",
         {{"omega_accuracy", c.weights.omega_accuracy},
          {"omega_completeness", c.weights.omega_completeness},
          {"omega_penalty", c.weights.omega_penalty},
          {"alpha", c.weights.alpha},
          {"beta", c.weights.beta}}},
        {"gateway", {{"mode", gateway_mode_name(c.gateway_mode)}, {"cassette", c.cassette_path.string()}}},
        {"results", c.checkpoint_path.string()},
        {"concurrency", c.concurrency},
    };
}

inline RunConfig run_config_from_json(const nlohmann::json& doc) {
    RunConfig c;
    c.corpus_path = doc.at("corpus").get<std::string>();
    for (const auto& j : doc.at("judges")) {
        JudgeSpec spec;
        spec.judge_id = j.at("judge_id").get<std::string>();
        spec.endpoint = j.at("endpoint").get<std::string>();
        spec.model_name = j.value("model_name", spec.judge_id);
        if (j.contains("sampling")) {
            spec.sampling.clear();
            for (auto& [k, v] : j.at("sampling").items()) spec.sampling[k] = v.get<double>();
        }
        spec.credentials_env = j.value("credentials_env", std::string{});
        c.judges.push_back(std::move(spec));
    }
    if (doc.contains("question_source")) {
        const auto& src = doc.at("question_source");
        std::string mode = src.at("mode").get<std::string>();
        if (mode == "self") {
            c.question_source = QuestionSource::SELF_GENERATED;
        } else if (mode == "external") {
            c.question_source = QuestionSource::EXTERNAL;
            c.external_questions_path = src.at("path").get<std::string>();
        } else {
            throw FatalConfigError("unknown question_source mode '" + mode + "'");
        }
    }
    if (doc.contains("weights")) {
        const auto& w = doc.at("weights");
        c.weights.omega_accuracy = w.value("omega_accuracy", c.weights.omega_accuracy);
        c.weights.omega_completeness = w.value("omega_completeness", c.weights.omega_completeness);
        c.weights.omega_penalty = w.value("omega_penalty", c.weights.omega_penalty);
        c.weights.alpha = w.value("alpha", c.weights.alpha);
        c.weights.beta = w.value("beta", c.weights.beta);
    }
    if (doc.contains("gateway")) {
        const auto& g = doc.at("gateway");
        auto mode = gateway_mode_from_name(g.at("mode").get<std::string>());
        if (!mode) throw FatalConfigError("unknown gateway mode");
        c.gateway_mode = *mode;
        c.cassette_path = g.value("cassette", std::string{});
    }
    c.checkpoint_path = doc.at("results").get<std::string>();
    c.concurrency = doc.value("concurrency", 1);
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FatalConfigError("cannot open config file " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw FatalConfigError("config file is not a JSON object: " + path.string());
    return run_config_from_json(doc);
}

/// Hash over everything that affects results. Concurrency only affects
/// scheduling, so changing it between a run and its resume is allowed;
/// changing weights, judges, sources or modes is refused.
inline std::string run_config_hash(const RunConfig& c) {
    nlohmann::json doc = run_config_to_json(c);
    doc.erase("concurrency");
    return fnv1a64_hex(doc.dump());
}

using PairKey = std::pair<std::string, std::string>; // (sample_id, judge_id)

/// What a checkpoint file yields on resume: the persisted config (absent for
/// an empty file), the completed pairs, and the byte length of the intact
/// prefix. A truncated final line is tolerated and dropped; damage anywhere
/// else raises CorruptCheckpointError.
struct ResumeState {
    std::optional<RunConfig> config;
    std::string config_hash;
    std::set<PairKey> completed;
    std::uintmax_t valid_bytes = 0;
};

inline ResumeState resume(const std::filesystem::path& checkpoint_path) {
    ResumeState state;
    if (!std::filesystem::exists(checkpoint_path)) return state;

    std::ifstream in(checkpoint_path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + checkpoint_path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.empty()) return state;

    std::vector<std::pair<std::string, std::uintmax_t>> lines; // text, end offset
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        bool has_newline = eol != std::string::npos;
        std::size_t end = has_newline ? eol : content.size();
        std::string line = content.substr(pos, end - pos);
        std::uintmax_t end_offset = has_newline ? end + 1 : end;
        if (!line.empty()) lines.emplace_back(std::move(line), end_offset);
        pos = end + 1;
    }
    if (lines.empty()) return state;

    bool last_line_complete = content.back() == '\n';

    for (std::size_t i = 0; i < lines.size(); ++i) {
        bool is_last = i + 1 == lines.size();
        nlohmann::json rec = nlohmann::json::parse(lines[i].first, nullptr, false);
        bool usable = !rec.is_discarded() && rec.is_object() && (!is_last || last_line_complete);

        if (i == 0) {
            if (!usable || !rec.contains("schema_version") || !rec.contains("config_hash") ||
                !rec.contains("config"))
                throw CorruptCheckpointError("BAD_HEADER", "checkpoint header is missing or malformed");
            if (rec.at("schema_version").get<int>() != kResultSchemaVersion)
                throw CorruptCheckpointError("BAD_HEADER", "unsupported result schema version");
            state.config = run_config_from_json(rec.at("config"));
            state.config_hash = rec.at("config_hash").get<std::string>();
            if (run_config_hash(*state.config) != state.config_hash)
                throw CorruptCheckpointError("BAD_HEADER", "header config does not match its own hash");
            state.valid_bytes = lines[i].second;
            continue;
        }

        if (!usable) {
            if (is_last) break; // torn tail: dropped, the pair re-runs
            throw CorruptCheckpointError("MALFORMED_RECORD",
                                         "unreadable record before end of checkpoint");
        }
        try {
            SampleResult r = sample_result_from_json(rec);
            state.completed.insert({r.sample_id, r.judge_id});
        } catch (const std::exception& e) {
            if (is_last) break;
            throw CorruptCheckpointError("MALFORMED_RECORD", e.what());
        }
        state.valid_bytes = lines[i].second;
    }
    return state;
}

/// Test/instrumentation hooks for run(). after_record_written fires once per
/// durably written record; returning false stops the run at that point,
/// which is how the crash/resume harness simulates a kill.
struct RunHooks {
    std::function<bool(std::size_t records_written)> after_record_written;
};

struct RunSummary {
    std::size_t ok = 0;
    std::size_t failed = 0;
    std::size_t pairs_evaluated = 0;
    std::size_t pairs_skipped_completed = 0;
    bool stopped_early = false;
    long transport_ops = 0;
    long logical_calls = 0;
};

namespace detail {

struct PairWork {
    std::size_t sample_index;
    std::size_t judge_index;
};

/// Serializes all checkpoint writes and keeps records in canonical pair
/// order regardless of worker scheduling, so equal runs produce equal bytes.
/// A worker whose record is ahead of the write frontier parks it here; the
/// worker that fills the gap flushes everything that became contiguous.
class OrderedResultWriter {
  public:
    OrderedResultWriter(std::ofstream out, const RunHooks& hooks)
        : out_(std::move(out)), hooks_(hooks) {}

    // Position is the pair's rank among this run's pending pairs. Returns
    // false once the run has been stopped by a hook.
    bool submit(std::size_t position, const nlohmann::json& record, bool record_ok) {
        std::lock_guard lock(mutex_);
        pending_.emplace(position, std::make_pair(record.dump(), record_ok));
        while (!stopped_ && !pending_.empty() && pending_.begin()->first == next_) {
            auto& [text, was_ok] = pending_.begin()->second;
            out_ << text << '\n';
            out_.flush();
            if (!out_) throw IoError("checkpoint write failed");
            (was_ok ? ok_ : failed_) += 1;
            pending_.erase(pending_.begin());
            ++next_;
            if (hooks_.after_record_written && !hooks_.after_record_written(ok_ + failed_)) stopped_ = true;
        }
        return !stopped_;
    }

    bool stopped() const {
        std::lock_guard lock(mutex_);
        return stopped_;
    }

    std::size_t ok_count() const {
        std::lock_guard lock(mutex_);
        return ok_;
    }

    std::size_t failed_count() const {
        std::lock_guard lock(mutex_);
        return failed_;
    }

  private:
    std::ofstream out_;
    const RunHooks& hooks_;
    mutable std::mutex mutex_;
    std::map<std::size_t, std::pair<std::string, bool>> pending_;
    std::size_t next_ = 0;
    std::size_t ok_ = 0;
    std::size_t failed_ = 0;
    bool stopped_ = false;
};

} // namespace detail

/// Evaluates one (sample, judge) pair end to end: question synthesis (or the
/// externally attached set), question verdicts, holistic assessment, score
/// combination. Failures come back as a FAILED record, never as a throw.
inline SampleResult evaluate_pair(Gateway& gateway, const Corpus& corpus, const Sample& sample,
                                  const JudgeSpec& judge, const Weights& weights,
                                  const QuestionSet* external_questions) {
    SampleResult result;
    result.sample_id = sample.sample_id;
    result.judge_id = judge.judge_id;
    try {
        if (!corpus.has_candidate(sample.sample_id))
            throw NotFoundError("sample has no candidate description");
        const CandidateDescription& candidate = corpus.candidate(sample.sample_id);

        result.question_set =
            external_questions ? *external_questions : gateway.generate_questions(judge, sample);
        result.verdicts = gateway.evaluate_questions(judge, sample, candidate, result.question_set);
        result.holistic = gateway.assess_holistic(judge, sample, candidate);
        result.bundle = combine(result.verdicts, result.holistic, weights);
        result.status = ResultStatus::OK;
    } catch (const std::exception& e) {
        result = SampleResult{};
        result.sample_id = sample.sample_id;
        result.judge_id = judge.judge_id;
        result.status = ResultStatus::FAILED;
        result.reason = e.what();
    }
    return result;
}

/// Runs the complete evaluation workflow over corpus x judges with atomic
/// per-record checkpointing. With resume_requested, previously completed
/// pairs are skipped; a config change since the checkpoint was written is
/// refused as CONFIG_DRIFT. Workers run pairs concurrently; the writer keeps
/// the record order canonical.
inline RunSummary run(const RunConfig& config, std::shared_ptr<Gateway> gateway,
                      bool resume_requested = false, const RunHooks& hooks = {}) {
    config.validate();
    Corpus corpus = load_corpus(config.corpus_path);

    std::map<std::string, QuestionSet> external;
    if (config.question_source == QuestionSource::EXTERNAL)
        external = attach_external_questions(corpus, config.external_questions_path);

    const std::string config_hash = run_config_hash(config);
    std::set<PairKey> completed;

    bool checkpoint_exists = std::filesystem::exists(config.checkpoint_path) &&
                             std::filesystem::file_size(config.checkpoint_path) > 0;
    bool fresh_file = !(resume_requested && checkpoint_exists);
    if (resume_requested && checkpoint_exists) {
        ResumeState state = resume(config.checkpoint_path);
        if (state.config && state.config_hash != config_hash)
            throw CorruptCheckpointError("CONFIG_DRIFT",
                                         "checkpoint was written under a different configuration");
        if (!state.config) fresh_file = true; // no usable header: start over
        completed = std::move(state.completed);
        std::filesystem::resize_file(config.checkpoint_path, state.valid_bytes); // drop any torn tail
    } else if (checkpoint_exists) {
        throw FatalConfigError("result file " + config.checkpoint_path.string() +
                               " already exists; pass resume or remove it");
    }

    std::ofstream out(config.checkpoint_path, fresh_file ? std::ios::trunc : std::ios::app);
    if (!out) throw IoError("cannot open result file " + config.checkpoint_path.string());
    if (fresh_file) {
        nlohmann::json header{{"schema_version", kResultSchemaVersion},
                              {"config_hash", config_hash},
                              {"config", run_config_to_json(config)}};
        out << header.dump() << '\n';
        out.flush();
    }

    // Canonical pair order: sample-major, judges in config order.
    std::vector<detail::PairWork> to_run;
    std::size_t skipped = 0;
    for (std::size_t s = 0; s < corpus.samples().size(); ++s) {
        for (std::size_t j = 0; j < config.judges.size(); ++j) {
            PairKey key{corpus.samples()[s].sample_id, config.judges[j].judge_id};
            if (completed.count(key)) {
                ++skipped;
                continue;
            }
            to_run.push_back({s, j});
        }
    }

    RunSummary summary;
    summary.pairs_skipped_completed = skipped;

    detail::OrderedResultWriter writer(std::move(out), hooks);
    std::atomic<std::size_t> next_work{0};
    std::mutex failure_mutex;
    std::exception_ptr worker_failure;

    auto worker = [&]() {
        while (true) {
            if (writer.stopped()) break;
            std::size_t index = next_work.fetch_add(1);
            if (index >= to_run.size()) break;
            const detail::PairWork& work = to_run[index];
            const Sample& sample = corpus.samples()[work.sample_index];
            const JudgeSpec& judge = config.judges[work.judge_index];
            const QuestionSet* ext = nullptr;
            if (config.question_source == QuestionSource::EXTERNAL) ext = &external.at(sample.sample_id);

            SampleResult result = evaluate_pair(*gateway, corpus, sample, judge, config.weights, ext);
            try {
                if (!writer.submit(index, sample_result_to_json(result), result.ok())) break;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!worker_failure) worker_failure = std::current_exception();
                break;
            }
        }
    };

    int n_threads = std::min<int>(config.concurrency, static_cast<int>(to_run.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (worker_failure) std::rethrow_exception(worker_failure);

    summary.ok = writer.ok_count();
    summary.failed = writer.failed_count();
    summary.pairs_evaluated = summary.ok + summary.failed;
    summary.stopped_early = writer.stopped();
    summary.transport_ops = gateway->transport_ops();
    summary.logical_calls = gateway->logical_calls();
    return summary;
}

/// Convenience overload: builds the gateway from the config.
inline RunSummary run(const RunConfig& config, bool resume_requested = false, const RunHooks& hooks = {}) {
    std::shared_ptr<Gateway> gateway =
        config.gateway_mode == GatewayMode::LIVE
            ? Gateway::live()
            : Gateway::with_cassette(config.gateway_mode, config.cassette_path);
    return run(config, std::move(gateway), resume_requested, hooks);
}

} // namespace descjudge
