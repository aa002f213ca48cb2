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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "descjudge/embedding.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/matrix.hpp"
#include "descjudge/questiongen.hpp"

namespace descjudge {

enum class Polarity { POSITIVE, NEGATIVE, COMBINED };

inline const char* polarity_name(Polarity p) {
    switch (p) {
        case Polarity::POSITIVE: return "positive";
        case Polarity::NEGATIVE: return "negative";
        case Polarity::COMBINED: return "combined";
    }
    return "?";
}

/// How COMBINED pools the two polarities: concatenate both question lists
/// before matching (default), or average the two per-polarity scores.
enum class CombinedMode { CONCATENATE, MEAN_OF_POLARITIES };

/// Canonical unordered generator pair: first <= second lexicographically.
struct ModelPair {
    std::string first;
    std::string second;

    ModelPair() = default;
    ModelPair(std::string a, std::string b) {
        if (b < a) std::swap(a, b);
        first = std::move(a);
        second = std::move(b);
    }

    std::string label() const { return first + "|" + second; }
    auto operator<=>(const ModelPair&) const = default;
};

/// Cross-set similarity of one sample's question lists for one generator pair.
struct SimilarityRecord {
    std::string sample_id;
    ModelPair model_pair;
    Polarity polarity = Polarity::POSITIVE;
    double symmetric_similarity = 0.0;
};

/// Per-pair aggregate over samples. per_sample_values is retained (in sample
/// order) for distribution plots; skipped_samples counts shared samples where
/// either side had no questions of the polarity.
struct SimilarityAggregate {
    ModelPair model_pair;
    Polarity polarity = Polarity::POSITIVE;
    double mean = 0.0;
    std::size_t sample_count = 0;
    std::size_t skipped_samples = 0;
    std::vector<SimilarityRecord> records;

    std::vector<double> per_sample_values() const {
        std::vector<double> v;
        v.reserve(records.size());
        for (const auto& r : records) v.push_back(r.symmetric_similarity);
        return v;
    }
};

/// Similarity matrix between two embedding row sets: entry (i,j) is the
/// cosine of a's row i with b's row j, each in [-1, 1].
inline Matrix cosine_matrix(const Matrix& a, const Matrix& b) {
    if (a.rows() == 0 || b.rows() == 0) throw EmptyInputError("cosine_matrix needs non-empty inputs");
    if (a.cols() != b.cols())
        throw DimensionMismatchError("embedding dimensions differ: " + std::to_string(a.cols()) + " vs " +
                                     std::to_string(b.cols()));

    auto row_norms = [](const Matrix& m) {
        std::vector<double> norms(m.rows());
        for (std::size_t r = 0; r < m.rows(); ++r) {
            double s = 0.0;
            for (double v : m.row(r)) s += v * v;
            if (s == 0.0) throw ZeroVectorError("zero-norm row at index " + std::to_string(r));
            norms[r] = std::sqrt(s);
        }
        return norms;
    };
    std::vector<double> na = row_norms(a), nb = row_norms(b);

    Matrix sim(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ra = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto rb = b.row(j);
            double dot = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) dot += ra[k] * rb[k];
            double value = dot / (na[i] * nb[j]);
            // Rounding can overshoot |1| by an ulp; hold the [-1,1] bound.
            sim.at(i, j) = value > 1.0 ? 1.0 : (value < -1.0 ? -1.0 : value);
        }
    }
    return sim;
}

/// Symmetric maximum similarity of a cross-set cosine matrix: the mean of
/// row maxima averaged with the mean of column maxima. Captures how well
/// each question on one side is covered by its best match on the other.
inline double symmetric_max_similarity(const Matrix& sim) {
    if (sim.rows() == 0 || sim.cols() == 0)
        throw EmptyInputError("symmetric_max_similarity needs a non-empty matrix");

    double row_sum = 0.0;
    for (std::size_t i = 0; i < sim.rows(); ++i) {
        double best = sim.at(i, 0);
        for (std::size_t j = 1; j < sim.cols(); ++j) best = std::max(best, sim.at(i, j));
        row_sum += best;
    }
    double col_sum = 0.0;
    for (std::size_t j = 0; j < sim.cols(); ++j) {
        double best = sim.at(0, j);
        for (std::size_t i = 1; i < sim.rows(); ++i) best = std::max(best, sim.at(i, j));
        col_sum += best;
    }
    double max_i_to_j = row_sum / static_cast<double>(sim.rows());
    double max_j_to_i = col_sum / static_cast<double>(sim.cols());
    return (max_i_to_j + max_j_to_i) / 2.0;
}

namespace detail {

inline const std::vector<std::string>* polarity_list(const QuestionSet& qs, Polarity polarity,
                                                     std::vector<std::string>& combined_storage,
                                                     CombinedMode mode) {
    switch (polarity) {
        case Polarity::POSITIVE: return &qs.positive;
        case Polarity::NEGATIVE: return &qs.negative;
        case Polarity::COMBINED:
            if (mode == CombinedMode::MEAN_OF_POLARITIES) return nullptr; // handled by caller
            combined_storage.clear();
            combined_storage.insert(combined_storage.end(), qs.positive.begin(), qs.positive.end());
            combined_storage.insert(combined_storage.end(), qs.negative.begin(), qs.negative.end());
            return &combined_storage;
    }
    return nullptr;
}

} // namespace detail

using QuestionMap = std::map<std::string, QuestionSet>;

/// Compares two generators' question sets across all shared samples. For
/// each shared sample where both sides have questions of the polarity, the
/// lists are embedded, cross-compared and folded into one symmetric score;
/// the aggregate averages those scores in sample order. Samples where either
/// side lacks the polarity are skipped and counted, not zero-scored.
/// Symmetric in its arguments by construction.
inline SimilarityAggregate analyze_pair(const QuestionMap& questions_i, const QuestionMap& questions_j,
                                        Polarity polarity, EmbeddingBackend& embedder,
                                        CombinedMode combined_mode = CombinedMode::CONCATENATE) {
    SimilarityAggregate agg;
    agg.polarity = polarity;

    bool pair_named = false;
    double sum = 0.0;
    bool any_shared = false;

    for (const auto& [sample_id, qs_i] : questions_i) {
        auto it_j = questions_j.find(sample_id);
        if (it_j == questions_j.end()) continue;
        any_shared = true;
        const QuestionSet& qs_j = it_j->second;
        if (!pair_named) {
            agg.model_pair = ModelPair(qs_i.generator_model, qs_j.generator_model);
            pair_named = true;
        }

        double value = 0.0;
        if (polarity == Polarity::COMBINED && combined_mode == CombinedMode::MEAN_OF_POLARITIES) {
            if (qs_i.positive.empty() || qs_j.positive.empty() || qs_i.negative.empty() ||
                qs_j.negative.empty()) {
                ++agg.skipped_samples;
                continue;
            }
            double pos = symmetric_max_similarity(
                cosine_matrix(embedder.encode(qs_i.positive), embedder.encode(qs_j.positive)));
            double neg = symmetric_max_similarity(
                cosine_matrix(embedder.encode(qs_i.negative), embedder.encode(qs_j.negative)));
            value = (pos + neg) / 2.0;
        } else {
            std::vector<std::string> storage_i, storage_j;
            const auto* list_i = detail::polarity_list(qs_i, polarity, storage_i, combined_mode);
            const auto* list_j = detail::polarity_list(qs_j, polarity, storage_j, combined_mode);
            if (list_i == nullptr || list_j == nullptr || list_i->empty() || list_j->empty()) {
                ++agg.skipped_samples;
                continue;
            }
            value = symmetric_max_similarity(
                cosine_matrix(embedder.encode(*list_i), embedder.encode(*list_j)));
        }

        agg.records.push_back({sample_id, agg.model_pair, polarity, value});
        sum += value;
    }

    if (!any_shared) throw NoOverlapError("question maps share no sample ids");
    agg.sample_count = agg.records.size();
    agg.mean = agg.records.empty() ? 0.0 : sum / static_cast<double>(agg.records.size());
    return agg;
}

struct AsymmetryRow {
    ModelPair model_pair;
    double positive_mean = 0.0;
    double negative_mean = 0.0;
    double delta = 0.0; // positive_mean - negative_mean
};

/// Tabulates, per generator pair, how much positive-question similarity
/// exceeds negative-question similarity. Reports the direction; never
/// enforces one.
inline std::vector<AsymmetryRow> asymmetry_table(const std::vector<SimilarityAggregate>& aggregates) {
    std::map<ModelPair, AsymmetryRow> rows;
    std::map<ModelPair, std::pair<bool, bool>> seen;
    for (const auto& agg : aggregates) {
        if (agg.polarity == Polarity::COMBINED) continue;
        auto& row = rows[agg.model_pair];
        row.model_pair = agg.model_pair;
        if (agg.polarity == Polarity::POSITIVE) {
            row.positive_mean = agg.mean;
            seen[agg.model_pair].first = true;
        } else {
            row.negative_mean = agg.mean;
            seen[agg.model_pair].second = true;
        }
    }

    std::vector<AsymmetryRow> out;
    for (auto& [pair, row] : rows) {
        const auto& [has_pos, has_neg] = seen[pair];
        if (!has_pos || !has_neg)
            throw MissingPolarityError("pair " + pair.label() + " lacks a " +
                                       (has_pos ? "negative" : "positive") + " aggregate");
        row.delta = row.positive_mean - row.negative_mean;
        out.push_back(row);
    }
    return out; // std::map iteration keeps rows sorted by pair
}

} // namespace descjudge
