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
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "descjudge/embedding.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/hashing.hpp"
#include "descjudge/prompts.hpp"
#include "descjudge/scoring.hpp"
#include "descjudge/transport.hpp"

namespace descjudge {

/// Built-in judge personalities. Each is a caricature of an observed
/// evaluator profile, reproducible without any model access:
///  - CONSISTENT: fixed holistic triple, essentially zero variance.
///  - CRITIC: strong error detector; answers negatives AVOIDED with
///    probability 0.92 and positives CORRECT with probability 0.42.
///  - CONSERVATIVE: harsh and unstable; hallucination penalty centered at
///    0.54 with the widest spread of the three.
enum class MockPersona { CONSISTENT, CRITIC, CONSERVATIVE };

/// Question phrasing families for the built-in generators. FAMILY_A and
/// FAMILY_B share one phrasing template (high mutual similarity); DIVERGENT
/// shares only the content words it asks about.
enum class QuestionStyle { FAMILY_A, FAMILY_B, DIVERGENT };

inline std::optional<MockPersona> mock_persona_from_name(const std::string& name) {
    if (name == "consistent") return MockPersona::CONSISTENT;
    if (name == "critic") return MockPersona::CRITIC;
    if (name == "conservative") return MockPersona::CONSERVATIVE;
    return std::nullopt;
}

inline std::optional<QuestionStyle> question_style_from_name(const std::string& name) {
    if (name == "family_a") return QuestionStyle::FAMILY_A;
    if (name == "family_b") return QuestionStyle::FAMILY_B;
    if (name == "divergent") return QuestionStyle::DIVERGENT;
    return std::nullopt;
}

namespace mockdetail {

struct PersonaParams {
    double p_correct;
    double p_incorrect; // remainder of the positive mass is OMITTED
    double p_avoided;
    double accuracy_center, accuracy_halfwidth;
    double completeness_center, completeness_halfwidth;
    double penalty_center, penalty_halfwidth;
    int base_positive_questions;
    int base_negative_questions;
    int question_count_spread;
    const char* explanation;
};

inline const PersonaParams& persona_params(MockPersona p) {
    static const PersonaParams consistent{0.45, 0.05, 0.96, 0.85, 0.0,  0.70, 0.0,  0.15, 0.0,
                                          10,   10,   0,    "Fixed rubric applied uniformly."};
    static const PersonaParams critic{0.42, 0.08, 0.92, 0.818, 0.10, 0.700, 0.09, 0.185, 0.11,
                                      8,    8,    2,    "Errors weighted heavily against the text."};
    static const PersonaParams conservative{0.39, 0.12, 0.90, 0.61, 0.26, 0.645, 0.26, 0.54, 0.32,
                                            12,   12,   2,
                                            "Unsupported specifics penalized aggressively."};
    switch (p) {
        case MockPersona::CONSISTENT: return consistent;
        case MockPersona::CRITIC: return critic;
        case MockPersona::CONSERVATIVE: return conservative;
    }
    return consistent;
}

inline double unit_draw(std::initializer_list<std::string_view> parts) {
    std::string key;
    for (auto p : parts) {
        key += p;
        key += '\x1f';
    }
    return hash_to_unit(fnv1a64(key));
}

inline double bounded_draw(double center, double halfwidth, double u) {
    double v = center + halfwidth * (2.0 * u - 1.0);
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
}

inline std::string extract_between(const std::string& text, const std::string& after,
                                   const std::string& before) {
    std::size_t start = text.find(after);
    if (start == std::string::npos) return {};
    start += after.size();
    std::size_t end = text.find(before, start);
    if (end == std::string::npos) return {};
    return text.substr(start, end - start);
}

// Content words every built-in generator agrees on for a given sample, drawn
// from the reference descriptions embedded in the synthesis prompt. The
// selection is keyed by sample only, never by generator, so generators differ
// in phrasing rather than in what they ask about.
inline std::vector<std::string> salient_tokens(const std::string& sample_id, const std::string& user_text) {
    std::string image = extract_between(user_text, "Human Image Description: \"",
                                        "\"\n    Human Scene Description: \"");
    std::string scene = extract_between(user_text, "Human Scene Description: \"",
                                        "\"\n    Segmented Objects Present: \"");
    std::vector<std::string> tokens;
    for (const std::string& t : HashingEmbedder::tokenize(image + " " + scene)) {
        if (t.size() < 4) continue;
        bool seen = false;
        for (const auto& existing : tokens)
            if (existing == t) {
                seen = true;
                break;
            }
        if (!seen) tokens.push_back(t);
    }
    if (tokens.empty()) tokens.push_back("subject-" + sample_id);
    return tokens;
}

inline const std::vector<std::string>& confusion_words() {
    static const std::vector<std::string> words{
        "purple",   "seventeen", "underwater", "nighttime", "plastic",  "floating",
        "enormous", "triangular", "metallic",  "crowded",   "frozen",   "sideways"};
    return words;
}

} // namespace mockdetail

/// Offline judge double. Every reply is a pure function of
/// (sample_id, question text, seed), so repeated runs, retries and recorded
/// cassettes all agree byte for byte.
class MockJudgeTransport : public Transport {
  public:
    explicit MockJudgeTransport(MockPersona persona, std::string seed = {},
                                QuestionStyle style = QuestionStyle::FAMILY_A)
        : persona_(persona), style_(style), seed_(std::move(seed)) {
        if (seed_.empty()) {
            switch (persona_) {
                case MockPersona::CONSISTENT: seed_ = "consistent"; break;
                case MockPersona::CRITIC: seed_ = "critic"; break;
                case MockPersona::CONSERVATIVE: seed_ = "conservative"; break;
            }
        }
    }

    std::string send(const ChatRequest& request) override {
        if (request.kind == "question_synthesis") return synthesize_questions(request);
        if (request.kind == "question_verdicts") return grade_questions(request);
        if (request.kind == "holistic") return assess(request);
        throw TransportError("mock judge cannot answer request kind '" + request.kind + "'", false);
    }

  private:
    std::string synthesize_questions(const ChatRequest& request) const {
        using namespace mockdetail;
        const PersonaParams& pp = persona_params(persona_);
        std::vector<std::string> tokens = salient_tokens(request.sample_id, request.user_text);

        auto count = [&](const char* which, int base) {
            if (pp.question_count_spread == 0) return base;
            double u = unit_draw({request.sample_id, which, seed_});
            return base + static_cast<int>(u * (pp.question_count_spread + 1));
        };
        int n_pos = count("npos", pp.base_positive_questions);
        int n_neg = count("nneg", pp.base_negative_questions);

        nlohmann::json positive = nlohmann::json::array();
        nlohmann::json negative = nlohmann::json::array();
        for (int i = 0; i < n_pos; ++i) {
            const std::string& tok =
                tokens[fnv1a64("content\x1f" + request.sample_id + "\x1fpositive\x1f" + std::to_string(i)) %
                       tokens.size()];
            positive.push_back(phrase_positive(tok));
        }
        for (int i = 0; i < n_neg; ++i) {
            const std::string& tok =
                tokens[fnv1a64("content\x1f" + request.sample_id + "\x1fnegative\x1f" + std::to_string(i)) %
                       tokens.size()];
            const std::string& wrong =
                confusion_words()[fnv1a64("wrong\x1f" + request.sample_id + "\x1f" + std::to_string(i)) %
                                  confusion_words().size()];
            negative.push_back(phrase_negative(tok, wrong));
        }
        return nlohmann::json{{"positive", positive}, {"negative", negative}}.dump();
    }

    std::string phrase_positive(const std::string& tok) const {
        switch (style_) {
            case QuestionStyle::FAMILY_A:
                return "Does the description mention the detail '" + tok + "' from the reference?";
            case QuestionStyle::FAMILY_B:
                return "Does the description specifically mention the detail '" + tok +
                       "' from the reference?";
            case QuestionStyle::DIVERGENT:
                return "Is the attribute '" + tok + "' clearly verifiable within the candidate text?";
        }
        return tok;
    }

    std::string phrase_negative(const std::string& tok, const std::string& wrong) const {
        switch (style_) {
            case QuestionStyle::FAMILY_A:
                return "Does the description incorrectly add '" + wrong +
                       "' instead of the reference detail '" + tok + "'?";
            case QuestionStyle::FAMILY_B:
                return "Does the description incorrectly state '" + wrong +
                       "' in place of the reference detail '" + tok + "'?";
            case QuestionStyle::DIVERGENT:
                return "Has the candidate wrongly introduced '" + wrong + "' where the reference gives '" +
                       tok + "'?";
        }
        return tok;
    }

    std::string grade_questions(const ChatRequest& request) const {
        using namespace mockdetail;
        const PersonaParams& pp = persona_params(persona_);
        std::vector<std::string> positive =
            detail::parse_numbered_section(request.user_text, kPositiveSectionMarker);
        std::vector<std::string> negative =
            detail::parse_numbered_section(request.user_text, kNegativeSectionMarker);

        nlohmann::json pos = nlohmann::json::array();
        nlohmann::json neg = nlohmann::json::array();
        for (std::size_t i = 0; i < positive.size(); ++i) {
            double u = unit_draw({request.sample_id, positive[i], seed_});
            PositiveGrade g = u < pp.p_correct
                                  ? PositiveGrade::CORRECT
                                  : (u < pp.p_correct + pp.p_incorrect ? PositiveGrade::INCORRECT
                                                                       : PositiveGrade::OMITTED);
            pos.push_back({{"index", i}, {"grade", grade_name(g)}, {"rationale", positive_rationale(g)}});
        }
        for (std::size_t i = 0; i < negative.size(); ++i) {
            double u = unit_draw({request.sample_id, negative[i], seed_});
            NegativeGrade g = u < pp.p_avoided ? NegativeGrade::AVOIDED : NegativeGrade::INCLUDED;
            neg.push_back({{"index", i}, {"grade", grade_name(g)}, {"rationale", negative_rationale(g)}});
        }
        return nlohmann::json{{"positive", pos}, {"negative", neg}}.dump();
    }

    static const char* positive_rationale(PositiveGrade g) {
        switch (g) {
            case PositiveGrade::CORRECT: return "Detail present as stated.";
            case PositiveGrade::OMITTED: return "Not mentioned.";
            case PositiveGrade::INCORRECT: return "Mentioned with a factual error.";
        }
        return "";
    }

    static const char* negative_rationale(NegativeGrade g) {
        return g == NegativeGrade::AVOIDED ? "Not asserted." : "Asserted despite the references.";
    }

    std::string assess(const ChatRequest& request) const {
        using namespace mockdetail;
        const PersonaParams& pp = persona_params(persona_);
        double a = bounded_draw(pp.accuracy_center, pp.accuracy_halfwidth,
                                unit_draw({request.sample_id, "accuracy", seed_}));
        double c = bounded_draw(pp.completeness_center, pp.completeness_halfwidth,
                                unit_draw({request.sample_id, "completeness", seed_}));
        double p = bounded_draw(pp.penalty_center, pp.penalty_halfwidth,
                                unit_draw({request.sample_id, "penalty", seed_}));
        return nlohmann::json{{"accuracy", a},
                              {"completeness", c},
                              {"hallucination_penalty", p},
                              {"explanation", pp.explanation}}
            .dump();
    }

    MockPersona persona_;
    QuestionStyle style_;
    std::string seed_;
};

/// Fixture-driven judge: every reply is looked up, nothing is derived.
/// Intended for replaying published worked examples exactly.
class ScriptedJudgeTransport : public Transport {
  public:
    void set_questions(const std::string& sample_id, std::vector<std::string> positive,
                       std::vector<std::string> negative) {
        questions_[sample_id] = {std::move(positive), std::move(negative)};
    }

    void set_positive_grade(const std::string& sample_id, const std::string& question, PositiveGrade grade,
                            std::string rationale = {}) {
        positive_grades_[sample_id][question] = {grade, std::move(rationale)};
    }

    void set_negative_grade(const std::string& sample_id, const std::string& question, NegativeGrade grade,
                            std::string rationale = {}) {
        negative_grades_[sample_id][question] = {grade, std::move(rationale)};
    }

    void set_holistic(const std::string& sample_id, double accuracy, double completeness, double penalty,
                      std::string explanation = {}) {
        holistic_[sample_id] = {accuracy, completeness, penalty, std::move(explanation)};
    }

    std::string send(const ChatRequest& request) override {
        if (request.kind == "question_synthesis") {
            auto it = questions_.find(request.sample_id);
            if (it == questions_.end())
                throw NotFoundError("no scripted questions for sample '" + request.sample_id + "'");
            return nlohmann::json{{"positive", it->second.first}, {"negative", it->second.second}}.dump();
        }
        if (request.kind == "question_verdicts") return grade(request);
        if (request.kind == "holistic") {
            auto it = holistic_.find(request.sample_id);
            if (it == holistic_.end())
                throw NotFoundError("no scripted holistic for sample '" + request.sample_id + "'");
            return nlohmann::json{{"accuracy", it->second.accuracy},
                                  {"completeness", it->second.completeness},
                                  {"hallucination_penalty", it->second.hallucination_penalty},
                                  {"explanation", it->second.explanation}}
                .dump();
        }
        throw TransportError("scripted judge cannot answer request kind '" + request.kind + "'", false);
    }

    /// Fixture file form: an object with optional "questions", "holistic",
    /// "positive_grades" and "negative_grades" maps keyed by sample id.
    static std::shared_ptr<ScriptedJudgeTransport> from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open scripted-judge file " + path.string());
        nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.is_object())
            throw ParseError("scripted-judge file is not a JSON object");

        auto judge = std::make_shared<ScriptedJudgeTransport>();
        if (doc.contains("questions")) {
            for (auto& [sid, qs] : doc.at("questions").items())
                judge->set_questions(sid, qs.at("positive").get<std::vector<std::string>>(),
                                     qs.at("negative").get<std::vector<std::string>>());
        }
        if (doc.contains("holistic")) {
            for (auto& [sid, h] : doc.at("holistic").items())
                judge->set_holistic(sid, h.at("accuracy").get<double>(), h.at("completeness").get<double>(),
                                    h.at("hallucination_penalty").get<double>(),
                                    h.value("explanation", std::string{}));
        }
        if (doc.contains("positive_grades")) {
            for (auto& [sid, grades] : doc.at("positive_grades").items())
                for (auto& [question, grade] : grades.items()) {
                    auto g = positive_grade_from_name(grade.get<std::string>());
                    if (!g) throw ParseError("unknown positive grade '" + grade.get<std::string>() + "'");
                    judge->set_positive_grade(sid, question, *g);
                }
        }
        if (doc.contains("negative_grades")) {
            for (auto& [sid, grades] : doc.at("negative_grades").items())
                for (auto& [question, grade] : grades.items()) {
                    auto g = negative_grade_from_name(grade.get<std::string>());
                    if (!g) throw ParseError("unknown negative grade '" + grade.get<std::string>() + "'");
                    judge->set_negative_grade(sid, question, *g);
                }
        }
        return judge;
    }

  private:
    std::string grade(const ChatRequest& request) const {
        std::vector<std::string> positive =
            detail::parse_numbered_section(request.user_text, kPositiveSectionMarker);
        std::vector<std::string> negative =
            detail::parse_numbered_section(request.user_text, kNegativeSectionMarker);

        nlohmann::json pos = nlohmann::json::array();
        nlohmann::json neg = nlohmann::json::array();
        for (std::size_t i = 0; i < positive.size(); ++i) {
            auto sample_it = positive_grades_.find(request.sample_id);
            if (sample_it == positive_grades_.end() || !sample_it->second.count(positive[i]))
                throw NotFoundError("no scripted positive grade for '" + positive[i] + "'");
            const auto& entry = sample_it->second.at(positive[i]);
            pos.push_back(
                {{"index", i}, {"grade", grade_name(entry.first)}, {"rationale", entry.second}});
        }
        for (std::size_t i = 0; i < negative.size(); ++i) {
            auto sample_it = negative_grades_.find(request.sample_id);
            if (sample_it == negative_grades_.end() || !sample_it->second.count(negative[i]))
                throw NotFoundError("no scripted negative grade for '" + negative[i] + "'");
            const auto& entry = sample_it->second.at(negative[i]);
            neg.push_back(
                {{"index", i}, {"grade", grade_name(entry.first)}, {"rationale", entry.second}});
        }
        return nlohmann::json{{"positive", pos}, {"negative", neg}}.dump();
    }

    struct HolisticFixture {
        double accuracy = 0.0;
        double completeness = 0.0;
        double hallucination_penalty = 0.0;
        std::string explanation;
    };

    std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> questions_;
    std::map<std::string, std::map<std::string, std::pair<PositiveGrade, std::string>>> positive_grades_;
    std::map<std::string, std::map<std::string, std::pair<NegativeGrade, std::string>>> negative_grades_;
    std::map<std::string, HolisticFixture> holistic_;
};

} // namespace descjudge
