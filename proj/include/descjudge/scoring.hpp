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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "descjudge/errors.hpp"
#include "descjudge/numeric.hpp"

namespace descjudge {

// Grades are discrete enums rather than free reals so the point scheme
// (+1 / 0 / -0.5 for positives, +1 / -1 for negatives) is type-enforced.

enum class PositiveGrade { CORRECT, OMITTED, INCORRECT };
enum class NegativeGrade { AVOIDED, INCLUDED };

inline double grade_points(PositiveGrade g) {
    switch (g) {
        case PositiveGrade::CORRECT: return 1.0;
        case PositiveGrade::OMITTED: return 0.0;
        case PositiveGrade::INCORRECT: return -0.5;
    }
    return 0.0;
}

inline double grade_points(NegativeGrade g) {
    return g == NegativeGrade::AVOIDED ? 1.0 : -1.0;
}

inline const char* grade_name(PositiveGrade g) {
    switch (g) {
        case PositiveGrade::CORRECT: return "CORRECT";
        case PositiveGrade::OMITTED: return "OMITTED";
        case PositiveGrade::INCORRECT: return "INCORRECT";
    }
    return "?";
}

inline const char* grade_name(NegativeGrade g) {
    return g == NegativeGrade::AVOIDED ? "AVOIDED" : "INCLUDED";
}

inline std::optional<PositiveGrade> positive_grade_from_name(const std::string& name) {
    if (name == "CORRECT") return PositiveGrade::CORRECT;
    if (name == "OMITTED") return PositiveGrade::OMITTED;
    if (name == "INCORRECT") return PositiveGrade::INCORRECT;
    return std::nullopt;
}

inline std::optional<NegativeGrade> negative_grade_from_name(const std::string& name) {
    if (name == "AVOIDED") return NegativeGrade::AVOIDED;
    if (name == "INCLUDED") return NegativeGrade::INCLUDED;
    return std::nullopt;
}

/// Graded answer to one positive verification question: was a detail from the
/// human reference correctly present in the candidate?
struct PositiveVerdict {
    int question_index = 0;
    PositiveGrade grade = PositiveGrade::OMITTED;
    std::string rationale;

    bool operator==(const PositiveVerdict&) const = default;
};

/// Graded answer to one negative exclusion question: was a plausible-but-wrong
/// detail correctly absent from the candidate?
struct NegativeVerdict {
    int question_index = 0;
    NegativeGrade grade = NegativeGrade::AVOIDED;
    std::string rationale;

    bool operator==(const NegativeVerdict&) const = default;
};

struct QuestionVerdicts {
    std::vector<PositiveVerdict> positive;
    std::vector<NegativeVerdict> negative;

    bool operator==(const QuestionVerdicts&) const = default;
};

/// Judge-produced accuracy / completeness / hallucination-penalty triple,
/// each constrained to [0,1].
struct HolisticAssessment {
    double accuracy = 0.0;
    double completeness = 0.0;
    double hallucination_penalty = 0.0;
    std::string explanation;

    bool operator==(const HolisticAssessment&) const = default;
};

/// Score weights. Defaults match the reference configuration: holistic
/// weights 0.6 / 0.4 / 1.0, equal positive/negative blending (alpha 0.5) and
/// a question-favoring final blend (beta 0.6).
struct Weights {
    double omega_accuracy = 0.6;
    double omega_completeness = 0.4;
    double omega_penalty = 1.0;
    double alpha = 0.5;
    double beta = 0.6;

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0) throw DomainError("alpha must lie in [0,1]");
        if (beta < 0.0 || beta > 1.0) throw DomainError("beta must lie in [0,1]");
        if (omega_accuracy < 0.0 || omega_completeness < 0.0 || omega_penalty < 0.0)
            throw DomainError("omega weights must be >= 0");
    }

    bool operator==(const Weights&) const = default;
};

enum class ScoreFlag { EMPTY_POSITIVE_SET, EMPTY_NEGATIVE_SET, NO_HOLISTIC };

inline const char* flag_name(ScoreFlag f) {
    switch (f) {
        case ScoreFlag::EMPTY_POSITIVE_SET: return "EMPTY_POSITIVE_SET";
        case ScoreFlag::EMPTY_NEGATIVE_SET: return "EMPTY_NEGATIVE_SET";
        case ScoreFlag::NO_HOLISTIC: return "NO_HOLISTIC";
    }
    return "?";
}

/// Every derived score for one (sample, judge) evaluation. All *_reward
/// members live in [0,1]; raw totals and means may be negative.
struct ScoreBundle {
    double positive_raw_total = 0.0;
    double negative_raw_total = 0.0;
    double positive_mean = 0.0;
    double negative_mean = 0.0;
    double positive_norm = 0.0;
    double negative_norm = 0.0;
    double question_reward = 0.0;
    double holistic_raw = 0.0;
    double holistic_reward = 0.0;
    double final_reward = 0.0;
    std::set<ScoreFlag> flags;

    bool operator==(const ScoreBundle&) const = default;
};

/// Sum and mean of positive grades. An empty list yields (0, 0); the caller
/// records EMPTY_POSITIVE_SET so one malformed judge response cannot abort a
/// long run by dividing by zero.
inline std::pair<double, double> score_positive(const std::vector<PositiveVerdict>& verdicts) {
    double total = 0.0;
    for (const auto& v : verdicts) total += grade_points(v.grade);
    double mean = verdicts.empty() ? 0.0 : total / static_cast<double>(verdicts.size());
    return {total, mean};
}

/// Sum and mean of negative grades, same empty-list convention.
inline std::pair<double, double> score_negative(const std::vector<NegativeVerdict>& verdicts) {
    double total = 0.0;
    for (const auto& v : verdicts) total += grade_points(v.grade);
    double mean = verdicts.empty() ? 0.0 : total / static_cast<double>(verdicts.size());
    return {total, mean};
}

/// Weighted linear combination with penalty adjustment, plus its clipped
/// form: raw = wA*A + wC*C - wP*P, clipped to [0,1].
inline std::pair<double, double> holistic_score(const HolisticAssessment& h, const Weights& w = {}) {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(h.accuracy) || !in_unit(h.completeness) || !in_unit(h.hallucination_penalty))
        throw DomainError("holistic dimensions must lie in [0,1]");
    double raw = w.omega_accuracy * h.accuracy + w.omega_completeness * h.completeness -
                 w.omega_penalty * h.hallucination_penalty;
    return {raw, clamp01(raw)};
}

/// Full scoring pass: question means, non-negative normalization, the
/// alpha-blended question reward, the clipped holistic reward and the
/// beta-blended final reward, itself clipped to [0,1].
inline ScoreBundle combine(const QuestionVerdicts& verdicts,
                           const std::optional<HolisticAssessment>& holistic,
                           const Weights& w = {}) {
    w.validate();
    ScoreBundle b;
    std::tie(b.positive_raw_total, b.positive_mean) = score_positive(verdicts.positive);
    std::tie(b.negative_raw_total, b.negative_mean) = score_negative(verdicts.negative);
    if (verdicts.positive.empty()) b.flags.insert(ScoreFlag::EMPTY_POSITIVE_SET);
    if (verdicts.negative.empty()) b.flags.insert(ScoreFlag::EMPTY_NEGATIVE_SET);

    b.positive_norm = std::max(0.0, b.positive_mean);
    b.negative_norm = std::max(0.0, b.negative_mean);
    b.question_reward = w.alpha * b.positive_norm + (1.0 - w.alpha) * b.negative_norm;

    if (holistic) {
        std::tie(b.holistic_raw, b.holistic_reward) = holistic_score(*holistic, w);
    } else {
        b.holistic_raw = 0.0;
        b.holistic_reward = 0.0;
        b.flags.insert(ScoreFlag::NO_HOLISTIC);
    }

    b.final_reward = clamp01(w.beta * b.question_reward + (1.0 - w.beta) * b.holistic_reward);
    return b;
}

/// Named access to ScoreBundle fields, shared by the fixture checker and the
/// result serialization.
inline std::optional<double> bundle_field(const ScoreBundle& b, const std::string& name) {
    if (name == "positive_raw_total") return b.positive_raw_total;
    if (name == "negative_raw_total") return b.negative_raw_total;
    if (name == "positive_mean") return b.positive_mean;
    if (name == "negative_mean") return b.negative_mean;
    if (name == "positive_norm") return b.positive_norm;
    if (name == "negative_norm") return b.negative_norm;
    if (name == "question_reward") return b.question_reward;
    if (name == "holistic_raw") return b.holistic_raw;
    if (name == "holistic_reward") return b.holistic_reward;
    if (name == "final_reward") return b.final_reward;
    return std::nullopt;
}

struct FixtureFieldCheck {
    std::string field;
    double expected = 0.0;
    double actual = 0.0;
    double delta = 0.0;
    bool pass = false;
};

struct FixtureReport {
    std::vector<FixtureFieldCheck> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Golden-fixture checker: compares selected bundle fields against expected
/// values at an absolute tolerance and reports per-field deltas. A field name
/// the bundle does not have fails its check rather than throwing.
inline FixtureReport verify_fixture(const ScoreBundle& bundle,
                                    const std::map<std::string, double>& expected,
                                    double tolerance) {
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
    FixtureReport report;
    for (const auto& [field, want] : expected) {
        FixtureFieldCheck check;
        check.field = field;
        check.expected = want;
        if (auto actual = bundle_field(bundle, field)) {
            check.actual = *actual;
            check.delta = *actual - want;
            check.pass = std::fabs(check.delta) <= tolerance;
        } else {
            check.actual = std::numeric_limits<double>::quiet_NaN();
            check.delta = std::numeric_limits<double>::quiet_NaN();
            check.pass = false;
        }
        report.checks.push_back(std::move(check));
    }
    return report;
}

} // namespace descjudge
