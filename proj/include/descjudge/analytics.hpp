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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "descjudge/errors.hpp"
#include "descjudge/hashing.hpp"
#include "descjudge/numeric.hpp"
#include "descjudge/results.hpp"
#include "descjudge/similarity.hpp"

namespace descjudge {

enum class Dimension {
    QUESTION_REWARD,
    HOLISTIC_REWARD,
    FINAL_REWARD,
    ACCURACY,
    COMPLETENESS,
    HALLUCINATION_PENALTY,
    POSITIVE_NORM,
    NEGATIVE_NORM,
};

inline const std::vector<Dimension>& all_dimensions() {
    static const std::vector<Dimension> dims{
        Dimension::QUESTION_REWARD,    Dimension::HOLISTIC_REWARD, Dimension::FINAL_REWARD,
        Dimension::ACCURACY,           Dimension::COMPLETENESS,    Dimension::HALLUCINATION_PENALTY,
        Dimension::POSITIVE_NORM,      Dimension::NEGATIVE_NORM,
    };
    return dims;
}

inline const char* dimension_name(Dimension d) {
    switch (d) {
        case Dimension::QUESTION_REWARD: return "question_reward";
        case Dimension::HOLISTIC_REWARD: return "holistic_reward";
        case Dimension::FINAL_REWARD: return "final_reward";
        case Dimension::ACCURACY: return "accuracy";
        case Dimension::COMPLETENESS: return "completeness";
        case Dimension::HALLUCINATION_PENALTY: return "hallucination_penalty";
        case Dimension::POSITIVE_NORM: return "positive_norm";
        case Dimension::NEGATIVE_NORM: return "negative_norm";
    }
    return "?";
}

/// Value of one dimension for one OK result; absent if this result cannot
/// supply it (holistic dimensions of a NO_HOLISTIC record).
inline std::optional<double> dimension_value(const SampleResult& r, Dimension d) {
    switch (d) {
        case Dimension::QUESTION_REWARD: return r.bundle.question_reward;
        case Dimension::FINAL_REWARD: return r.bundle.final_reward;
        case Dimension::POSITIVE_NORM: return r.bundle.positive_norm;
        case Dimension::NEGATIVE_NORM: return r.bundle.negative_norm;
        case Dimension::HOLISTIC_REWARD:
            if (!r.holistic) return std::nullopt;
            return r.bundle.holistic_reward;
        case Dimension::ACCURACY:
            if (!r.holistic) return std::nullopt;
            return r.holistic->accuracy;
        case Dimension::COMPLETENESS:
            if (!r.holistic) return std::nullopt;
            return r.holistic->completeness;
        case Dimension::HALLUCINATION_PENALTY:
            if (!r.holistic) return std::nullopt;
            return r.holistic->hallucination_penalty;
    }
    return std::nullopt;
}

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

/// Boxplot-style summary of one judge's scores along one dimension.
/// std uses the sample (n-1) convention; quartiles use linear interpolation
/// between closest ranks; outliers lie beyond 1.5*IQR from the quartiles and
/// whiskers span the non-outlier range.
struct DimensionStats {
    std::string judge_id;
    Dimension dimension = Dimension::FINAL_REWARD;
    double mean = 0.0;
    double std_dev = 0.0;
    std::size_t count = 0;
    Quartiles quartiles;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outlier_values;
};

namespace detail {

// Linear interpolation between closest ranks: rank h = (n-1)p.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw NoDataError("quantile of empty data");
    if (sorted.size() == 1) return sorted[0];
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double sample_std(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(values.size()) - 1.0));
}

} // namespace detail

/// Summary statistics computed from raw values (already filtered to one
/// judge/dimension). Exposed separately so synthetic series can be profiled
/// without building SampleResults.
inline DimensionStats describe(std::vector<double> values, std::string judge_id, Dimension dimension) {
    if (values.empty()) throw NoDataError("no values for " + judge_id + "/" + dimension_name(dimension));
    DimensionStats s;
    s.judge_id = std::move(judge_id);
    s.dimension = dimension;
    s.count = values.size();

    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    s.std_dev = detail::sample_std(values, s.mean);

    std::sort(values.begin(), values.end());
    s.quartiles.q1 = detail::quantile_sorted(values, 0.25);
    s.quartiles.median = detail::quantile_sorted(values, 0.5);
    s.quartiles.q3 = detail::quantile_sorted(values, 0.75);

    double iqr = s.quartiles.q3 - s.quartiles.q1;
    double low_fence = s.quartiles.q1 - 1.5 * iqr;
    double high_fence = s.quartiles.q3 + 1.5 * iqr;
    s.whisker_low = s.quartiles.q3;
    s.whisker_high = s.quartiles.q1;
    bool any_inlier = false;
    for (double v : values) {
        if (v < low_fence || v > high_fence) {
            s.outlier_values.push_back(v);
        } else {
            if (!any_inlier) {
                s.whisker_low = v;
                s.whisker_high = v;
                any_inlier = true;
            } else {
                s.whisker_low = std::min(s.whisker_low, v);
                s.whisker_high = std::max(s.whisker_high, v);
            }
        }
    }
    if (!any_inlier) { // degenerate: everything flagged; collapse whiskers to the median
        s.whisker_low = s.quartiles.median;
        s.whisker_high = s.quartiles.median;
    }
    return s;
}

namespace detail {

inline std::vector<double> collect_dimension(const std::vector<SampleResult>& results,
                                             const std::string& judge_id, Dimension dimension) {
    std::vector<double> values;
    for (const auto& r : results) {
        if (!r.ok() || r.judge_id != judge_id) continue;
        if (auto v = dimension_value(r, dimension)) values.push_back(*v);
    }
    return values;
}

} // namespace detail

/// Per-judge, per-dimension stats over OK results. FAILED results are
/// excluded; callers report the exclusion count via failed_counts().
inline DimensionStats dimension_stats(const std::vector<SampleResult>& results,
                                      const std::string& judge_id, Dimension dimension) {
    return describe(detail::collect_dimension(results, judge_id, dimension), judge_id, dimension);
}

/// Ratio of mean negative detection to mean positive confirmation for one
/// judge; the headline negative:positive bias number.
struct BiasReport {
    std::string judge_id;
    double negative_mean = 0.0;
    double positive_mean = 0.0;
    double ratio = 0.0;
};

inline BiasReport bias_report(const std::vector<SampleResult>& results, const std::string& judge_id) {
    std::vector<double> pos = detail::collect_dimension(results, judge_id, Dimension::POSITIVE_NORM);
    std::vector<double> neg = detail::collect_dimension(results, judge_id, Dimension::NEGATIVE_NORM);
    if (pos.empty() || neg.empty()) throw NoDataError("no OK results for judge '" + judge_id + "'");

    BiasReport report;
    report.judge_id = judge_id;
    for (double v : pos) report.positive_mean += v;
    report.positive_mean /= static_cast<double>(pos.size());
    for (double v : neg) report.negative_mean += v;
    report.negative_mean /= static_cast<double>(neg.size());
    if (report.positive_mean <= 0.0)
        throw DegenerateDenominatorError("positive confirmation mean is zero for judge '" + judge_id + "'");
    report.ratio = report.negative_mean / report.positive_mean;
    return report;
}

/// Pearson correlation between question-based and holistic rewards across a
/// judge's samples. When either series has (near-)zero variance the
/// correlation is undefined; that is reported as `degenerate` rather than an
/// error, since a maximally consistent judge produces exactly this case.
struct MethodCorrelation {
    double r = 0.0;
    bool degenerate = false;
    std::size_t count = 0;
};

inline MethodCorrelation method_correlation(const std::vector<SampleResult>& results,
                                            const std::string& judge_id) {
    std::vector<double> xs, ys;
    for (const auto& r : results) {
        if (!r.ok() || r.judge_id != judge_id || !r.holistic) continue;
        xs.push_back(r.bundle.question_reward);
        ys.push_back(r.bundle.holistic_reward);
    }
    if (xs.size() < 2) throw NoDataError("need at least 2 results for a correlation");

    MethodCorrelation out;
    out.count = xs.size();
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx < 1e-24 || syy < 1e-24) {
        out.degenerate = true;
        out.r = 0.0;
        return out;
    }
    out.r = sxy / std::sqrt(sxx * syy);
    return out;
}

/// Count of FAILED records per judge (the exclusion counts reports quote).
inline std::map<std::string, std::size_t> failed_counts(const std::vector<SampleResult>& results) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : results)
        if (!r.ok()) ++counts[r.judge_id];
    return counts;
}

inline std::vector<std::string> judge_ids(const std::vector<SampleResult>& results) {
    std::set<std::string> ids;
    for (const auto& r : results) ids.insert(r.judge_id);
    return {ids.begin(), ids.end()};
}

} // namespace descjudge
