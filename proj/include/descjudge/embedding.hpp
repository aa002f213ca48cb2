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

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "descjudge/errors.hpp"
#include "descjudge/hashing.hpp"
#include "descjudge/matrix.hpp"

namespace descjudge {

enum class Normalization { UNIT_NORM, RAW };

/// Describes an embedding provider. The dimension is fixed for the lifetime
/// of a run; mixing dimensions across a similarity analysis is a bug.
struct EmbeddingSpec {
    std::string provider_id;
    int dimension = 0;
    Normalization normalization = Normalization::UNIT_NORM;
};

/// Pluggable sentence-embedding backend. Implementations must be
/// deterministic for identical inputs within one process configuration.
class EmbeddingBackend {
  public:
    virtual ~EmbeddingBackend() = default;
    virtual const EmbeddingSpec& spec() const = 0;
    /// Row i embeds texts[i]. Inputs must be non-empty, with no empty strings.
    virtual Matrix encode(const std::vector<std::string>& texts) = 0;
};

namespace detail {

inline void check_embed_inputs(const std::vector<std::string>& texts) {
    if (texts.empty()) throw EmptyInputError("no texts to embed");
    for (const auto& t : texts)
        if (t.empty()) throw EmptyInputError("cannot embed an empty string");
}

inline void unit_normalize_rows(Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double norm_sq = 0.0;
        for (double v : m.row(r)) norm_sq += v * v;
        if (norm_sq == 0.0) throw ZeroVectorError("embedding row has zero norm");
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : m.row(r)) v *= inv;
    }
}

} // namespace detail

/// Deterministic hashing bag-of-words embedder. Lowercased alphanumeric
/// tokens are hashed into a fixed number of buckets (token counts as
/// weights), then each row is unit-normalized. Ships in-tree so the entire
/// similarity path runs offline with zero model downloads. Not a semantic
/// model: distinct tokens land in (almost surely) distinct buckets, so
/// "two" and "2" do not match.
class HashingEmbedder : public EmbeddingBackend {
  public:
    explicit HashingEmbedder(int dimension = 256)
        : spec_{"hashing-bow-" + std::to_string(dimension), dimension, Normalization::UNIT_NORM} {
        if (dimension <= 0) throw DomainError("embedding dimension must be > 0");
    }

    const EmbeddingSpec& spec() const override { return spec_; }

    Matrix encode(const std::vector<std::string>& texts) override {
        detail::check_embed_inputs(texts);
        Matrix m(texts.size(), static_cast<std::size_t>(spec_.dimension));
        for (std::size_t i = 0; i < texts.size(); ++i) {
            bool any_token = false;
            for (const std::string& token : tokenize(texts[i])) {
                std::size_t bucket = fnv1a64(token) % static_cast<std::uint64_t>(spec_.dimension);
                m.at(i, bucket) += 1.0;
                any_token = true;
            }
            // A text with no alphanumeric content still needs a nonzero row.
            if (!any_token) m.at(i, fnv1a64(texts[i]) % static_cast<std::uint64_t>(spec_.dimension)) = 1.0;
        }
        detail::unit_normalize_rows(m);
        return m;
    }

    static std::vector<std::string> tokenize(const std::string& text) {
        std::vector<std::string> tokens;
        std::string current;
        for (unsigned char c : text) {
            if (std::isalnum(c)) {
                current.push_back(static_cast<char>(std::tolower(c)));
            } else if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) tokens.push_back(std::move(current));
        return tokens;
    }

  private:
    EmbeddingSpec spec_;
};

} // namespace descjudge
