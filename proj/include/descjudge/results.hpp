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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "descjudge/errors.hpp"
#include "descjudge/questiongen.hpp"
#include "descjudge/scoring.hpp"

namespace descjudge {

enum class ResultStatus { OK, FAILED };

/// Everything produced for one (sample, judge) pair. Status OK implies the
/// bundle is present and internally consistent; FAILED carries the error
/// chain in `reason` and nothing else is meaningful.
struct SampleResult {
    std::string sample_id;
    std::string judge_id;
    ResultStatus status = ResultStatus::OK;
    std::string reason;
    QuestionSet question_set;
    QuestionVerdicts verdicts;
    std::optional<HolisticAssessment> holistic;
    ScoreBundle bundle;

    bool ok() const { return status == ResultStatus::OK; }
};

namespace detail {

inline nlohmann::json verdicts_to_json(const QuestionVerdicts& v) {
    nlohmann::json pos = nlohmann::json::array();
    nlohmann::json neg = nlohmann::json::array();
    for (const auto& p : v.positive)
        pos.push_back({{"index", p.question_index}, {"grade", grade_name(p.grade)}, {"rationale", p.rationale}});
    for (const auto& n : v.negative)
        neg.push_back({{"index", n.question_index}, {"grade", grade_name(n.grade)}, {"rationale", n.rationale}});
    return {{"positive", pos}, {"negative", neg}};
}

inline QuestionVerdicts verdicts_from_json(const nlohmann::json& obj) {
    QuestionVerdicts v;
    for (const auto& p : obj.at("positive")) {
        auto grade = positive_grade_from_name(p.at("grade").get<std::string>());
        if (!grade) throw ParseError("bad positive grade in result record");
        v.positive.push_back({p.at("index").get<int>(), *grade, p.value("rationale", std::string{})});
    }
    for (const auto& n : obj.at("negative")) {
        auto grade = negative_grade_from_name(n.at("grade").get<std::string>());
        if (!grade) throw ParseError("bad negative grade in result record");
        v.negative.push_back({n.at("index").get<int>(), *grade, n.value("rationale", std::string{})});
    }
    return v;
}

} // namespace detail

inline nlohmann::json sample_result_to_json(const SampleResult& r) {
    nlohmann::json rec{
        {"sample_id", r.sample_id},
        {"judge_id", r.judge_id},
        {"status", r.ok() ? "OK" : "FAILED"},
    };
    if (!r.ok()) {
        rec["reason"] = r.reason;
        return rec;
    }
    rec["question_set"] = question_set_to_json(r.question_set);
    rec["verdicts"] = detail::verdicts_to_json(r.verdicts);
    if (r.holistic) {
        rec["holistic"] = {{"accuracy", r.holistic->accuracy},
                           {"completeness", r.holistic->completeness},
                           {"hallucination_penalty", r.holistic->hallucination_penalty},
                           {"explanation", r.holistic->explanation}};
    } else {
        rec["holistic"] = nullptr;
    }
    std::vector<std::string> flags;
    for (ScoreFlag f : r.bundle.flags) flags.push_back(flag_name(f));
    rec["bundle"] = {
        {"positive_raw_total", r.bundle.positive_raw_total},
        {"negative_raw_total", r.bundle.negative_raw_total},
        {"positive_mean", r.bundle.positive_mean},
        {"negative_mean", r.bundle.negative_mean},
        {"positive_norm", r.bundle.positive_norm},
        {"negative_norm", r.bundle.negative_norm},
        {"question_reward", r.bundle.question_reward},
        {"holistic_raw", r.bundle.holistic_raw},
        {"holistic_reward", r.bundle.holistic_reward},
        {"final_reward", r.bundle.final_reward},
        {"flags", flags},
    };
    return rec;
}

inline SampleResult sample_result_from_json(const nlohmann::json& rec, std::size_t lineno = 0);

/// Reads a result file: header line, then one record per line. A torn final
/// line (crash artifact) is dropped, matching resume semantics; damage
/// anywhere else is an error.
inline std::vector<SampleResult> load_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open result file " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::size_t end = eol == std::string::npos ? content.size() : eol;
        if (end > pos) lines.push_back(content.substr(pos, end - pos));
        pos = end + 1;
    }
    if (lines.empty()) throw ParseError("result file is empty");
    bool last_complete = !content.empty() && content.back() == '\n';

    nlohmann::json header = nlohmann::json::parse(lines[0], nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("schema_version"))
        throw ParseError("result file lacks a valid header line");

    std::vector<SampleResult> results;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        bool is_last = i + 1 == lines.size();
        nlohmann::json rec = nlohmann::json::parse(lines[i], nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || (is_last && !last_complete)) {
            if (is_last) break;
            throw ParseError("malformed result record", i + 1);
        }
        try {
            results.push_back(sample_result_from_json(rec, i + 1));
        } catch (const std::exception& e) {
            if (is_last) break;
            throw ParseError(std::string("bad result record: ") + e.what(), i + 1);
        }
    }
    return results;
}

inline SampleResult sample_result_from_json(const nlohmann::json& rec, std::size_t lineno) {
    SampleResult r;
    r.sample_id = rec.at("sample_id").get<std::string>();
    r.judge_id = rec.at("judge_id").get<std::string>();
    std::string status = rec.at("status").get<std::string>();
    if (status == "FAILED") {
        r.status = ResultStatus::FAILED;
        r.reason = rec.value("reason", std::string{});
        return r;
    }
    if (status != "OK") throw ParseError("unknown result status '" + status + "'", lineno);

    r.question_set = question_set_from_json(rec.at("question_set"), lineno);
    r.verdicts = detail::verdicts_from_json(rec.at("verdicts"));
    if (rec.contains("holistic") && !rec.at("holistic").is_null()) {
        const auto& h = rec.at("holistic");
        r.holistic = HolisticAssessment{h.at("accuracy").get<double>(), h.at("completeness").get<double>(),
                                        h.at("hallucination_penalty").get<double>(),
                                        h.value("explanation", std::string{})};
    }
    const auto& b = rec.at("bundle");
    r.bundle.positive_raw_total = b.at("positive_raw_total").get<double>();
    r.bundle.negative_raw_total = b.at("negative_raw_total").get<double>();
    r.bundle.positive_mean = b.at("positive_mean").get<double>();
    r.bundle.negative_mean = b.at("negative_mean").get<double>();
    r.bundle.positive_norm = b.at("positive_norm").get<double>();
    r.bundle.negative_norm = b.at("negative_norm").get<double>();
    r.bundle.question_reward = b.at("question_reward").get<double>();
    r.bundle.holistic_raw = b.at("holistic_raw").get<double>();
    r.bundle.holistic_reward = b.at("holistic_reward").get<double>();
    r.bundle.final_reward = b.at("final_reward").get<double>();
    for (const auto& f : b.at("flags")) {
        std::string name = f.get<std::string>();
        if (name == "EMPTY_POSITIVE_SET") r.bundle.flags.insert(ScoreFlag::EMPTY_POSITIVE_SET);
        else if (name == "EMPTY_NEGATIVE_SET") r.bundle.flags.insert(ScoreFlag::EMPTY_NEGATIVE_SET);
        else if (name == "NO_HOLISTIC") r.bundle.flags.insert(ScoreFlag::NO_HOLISTIC);
        else throw ParseError("unknown score flag '" + name + "'", lineno);
    }
    return r;
}

} // namespace descjudge
