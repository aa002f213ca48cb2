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
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "descjudge/errors.hpp"
#include "descjudge/jsonl.hpp"

namespace descjudge {

/// One corpus item: the human reference side of an evaluation.
///
/// Only text is modeled. Segmentation masks and image bytes belong to the
/// upstream description-generation stage and never reach the judges.
struct Sample {
    std::string sample_id;
    std::string title;
    std::string human_image_description;
    std::string human_scene_description;
    std::vector<std::string> segmented_object_names;

    bool operator==(const Sample&) const = default;
};

/// Candidate description under evaluation, scene-level plus per-object texts.
/// generator_metadata records how it was produced (model name, sampling
/// settings); it is provenance only and never influences scoring.
struct CandidateDescription {
    std::string sample_id;
    std::string full_image_description;
    std::map<std::string, std::string> object_descriptions;
    std::map<std::string, std::string> generator_metadata;

    bool operator==(const CandidateDescription&) const = default;
};

/// Immutable after load; sample order equals file order and defines
/// checkpoint indexing. Safe to share across workers.
class Corpus {
  public:
    Corpus() = default;
    Corpus(std::vector<Sample> samples, std::unordered_map<std::string, CandidateDescription> candidates)
        : samples_(std::move(samples)), candidates_(std::move(candidates)) {
        for (std::size_t i = 0; i < samples_.size(); ++i) index_[samples_[i].sample_id] = i;
        for (const auto& [sample_id, candidate] : candidates_) {
            if (!index_.count(sample_id))
                throw ValidationError("candidate for unknown sample '" + sample_id + "'");
            if (candidate.sample_id != sample_id)
                throw ValidationError("candidate key '" + sample_id + "' disagrees with its sample_id");
        }
    }

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    bool has_sample(const std::string& sample_id) const { return index_.count(sample_id) > 0; }
    bool has_candidate(const std::string& sample_id) const { return candidates_.count(sample_id) > 0; }

    const Sample& sample(const std::string& sample_id) const {
        auto it = index_.find(sample_id);
        if (it == index_.end()) throw NotFoundError("no sample with id '" + sample_id + "'");
        return samples_[it->second];
    }

    const CandidateDescription& candidate(const std::string& sample_id) const {
        auto it = candidates_.find(sample_id);
        if (it == candidates_.end()) throw NotFoundError("no candidate for sample '" + sample_id + "'");
        return it->second;
    }

    bool operator==(const Corpus& other) const {
        return samples_ == other.samples_ && candidates_ == other.candidates_;
    }

  private:
    std::vector<Sample> samples_;
    std::unordered_map<std::string, CandidateDescription> candidates_;
    std::unordered_map<std::string, std::size_t> index_;
};

namespace detail {

inline std::string get_string(const nlohmann::json& rec, const char* key, std::size_t lineno,
                              bool required) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) {
        if (required) throw ParseError(std::string("missing key '") + key + "'", lineno);
        return {};
    }
    if (!it->is_string()) throw ParseError(std::string("key '") + key + "' must be a string", lineno);
    return it->get<std::string>();
}

inline std::map<std::string, std::string> get_string_map(const nlohmann::json& rec, const char* key,
                                                         std::size_t lineno) {
    std::map<std::string, std::string> out;
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return out;
    if (!it->is_object()) throw ParseError(std::string("key '") + key + "' must be an object", lineno);
    for (auto& [k, v] : it->items()) {
        if (!v.is_string()) throw ParseError(std::string("value under '") + key + "' must be a string", lineno);
        out[k] = v.get<std::string>();
    }
    return out;
}

} // namespace detail

/// Loads a line-delimited corpus file. Each line is one JSON object with keys
/// `sample_id`, `title`, `human_image_description`, `human_scene_description`,
/// `segmented_objects` and an optional `candidate` object. Unknown keys are
/// ignored. A record without a candidate loads fine; the pipeline flags such
/// samples at evaluation time instead.
inline Corpus load_corpus(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("corpus file not found: " + path.string());

    std::vector<Sample> samples;
    std::unordered_map<std::string, CandidateDescription> candidates;
    std::unordered_set<std::string> seen;

    jsonl::for_each_record(path, [&](const nlohmann::json& rec, std::size_t lineno) {
        Sample s;
        s.sample_id = detail::get_string(rec, "sample_id", lineno, true);
        if (s.sample_id.empty()) throw ValidationError("empty sample_id at line " + std::to_string(lineno));
        if (!seen.insert(s.sample_id).second)
            throw ValidationError("duplicate sample_id '" + s.sample_id + "'");
        s.title = detail::get_string(rec, "title", lineno, false);
        s.human_image_description = detail::get_string(rec, "human_image_description", lineno, false);
        s.human_scene_description = detail::get_string(rec, "human_scene_description", lineno, false);
        if (s.human_image_description.empty() && s.human_scene_description.empty())
            throw ValidationError("sample '" + s.sample_id + "' has no human description");

        if (auto it = rec.find("segmented_objects"); it != rec.end() && !it->is_null()) {
            if (!it->is_array()) throw ParseError("'segmented_objects' must be an array", lineno);
            for (const auto& name : *it) {
                if (!name.is_string()) throw ParseError("'segmented_objects' entries must be strings", lineno);
                s.segmented_object_names.push_back(name.get<std::string>());
            }
        }

        if (auto it = rec.find("candidate"); it != rec.end() && !it->is_null()) {
            if (!it->is_object()) throw ParseError("'candidate' must be an object", lineno);
            CandidateDescription cd;
            cd.sample_id = s.sample_id;
            cd.full_image_description = detail::get_string(*it, "full_image_description", lineno, true);
            if (cd.full_image_description.empty())
                throw ValidationError("candidate for '" + s.sample_id + "' has empty full_image_description");
            cd.object_descriptions = detail::get_string_map(*it, "object_descriptions", lineno);
            cd.generator_metadata = detail::get_string_map(*it, "generator_metadata", lineno);
            candidates.emplace(s.sample_id, std::move(cd));
        }

        samples.push_back(std::move(s));
    });

    return Corpus(std::move(samples), std::move(candidates));
}

/// Inverse of load_corpus for the in-memory representation: save then load
/// yields an equal Corpus. Unknown keys from the original file are not kept.
inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    jsonl::Writer out(path);
    for (const Sample& s : corpus.samples()) {
        nlohmann::json rec{
            {"sample_id", s.sample_id},
            {"title", s.title},
            {"human_image_description", s.human_image_description},
            {"human_scene_description", s.human_scene_description},
            {"segmented_objects", s.segmented_object_names},
        };
        if (corpus.has_candidate(s.sample_id)) {
            const CandidateDescription& cd = corpus.candidate(s.sample_id);
            rec["candidate"] = {
                {"full_image_description", cd.full_image_description},
                {"object_descriptions", cd.object_descriptions},
                {"generator_metadata", cd.generator_metadata},
            };
        }
        out.write(rec);
    }
}

/// Matched (reference, candidate) pair for one sample.
inline std::pair<const Sample&, const CandidateDescription&> join_sample(const Corpus& corpus,
                                                                         const std::string& sample_id) {
    return {corpus.sample(sample_id), corpus.candidate(sample_id)};
}

} // namespace descjudge
