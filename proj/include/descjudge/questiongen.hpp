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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "descjudge/corpus.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/jsonl.hpp"

namespace descjudge {

/// A generator's positive and negative verification questions for one sample.
/// raw_response keeps the generator's reply verbatim for auditing.
struct QuestionSet {
    std::string sample_id;
    std::string generator_model;
    std::vector<std::string> positive;
    std::vector<std::string> negative;
    std::string raw_response;

    bool operator==(const QuestionSet&) const = default;
};

/// Rendered prompt plus the bindings that produced it.
struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::string template_id;
    std::map<std::string, std::string> variable_bindings;
};

// Sanity rails on parsed question counts. Real generators emit 5-14 per
// polarity; anything outside 1-30 means the response was not a question list.
inline constexpr std::size_t kMinQuestionsPerPolarity = 1;
inline constexpr std::size_t kMaxQuestionsPerPolarity = 30;

/// The question-synthesis instruction text. Placeholders in braces are bound
/// per sample by build_question_prompt; keep the body byte-stable, prompt
/// changes invalidate recorded cassettes.
inline const char* question_prompt_template() {
    return
        "Generate highly specific evaluation questions based on these human descriptions:\n"
        "    Human Image Description: \"{human_image_desc}\"\n"
        "    Human Scene Description: \"{human_scene_desc}\"\n"
        "    Segmented Objects Present: \"{segmented_objects}\"\n"
        "\n"
        "Create very specific questions that check for exact details mentioned in\n"
        "the human descriptions.\n"
        "Each question should test ONE specific factual detail that can be\n"
        "objectively verified.\n"
        "\n"
        "POSITIVE QUESTIONS - Check if AI mentions these SPECIFIC details\n"
        "that SHOULD be present:\n"
        "1. Extract exact numbers (how many objects? specific quantities?)\n"
        "2. Extract specific object types/names (exact species, object categories)\n"
        "3. Extract specific colors mentioned (exact color names, combinations)\n"
        "4. Extract specific poses/actions/states (flying, sitting, moving, etc.)\n"
        "5. Extract specific spatial relationships (above, below, center, background)\n"
        "6. Extract specific technical details (camera angle, lighting conditions,\n"
        "   perspective)\n"
        "7. Extract specific mood/atmosphere descriptors (peaceful, dramatic, calm)\n"
        "8. Extract specific visual elements (background type, composition, patterns)\n"
        "9. Extract specific features mentioned (logos, text, decorative elements)\n"
        "10. Extract specific environmental context (settings, time of day, weather)\n"
        "\n"
        "NEGATIVE QUESTIONS - Check if AI incorrectly adds these\n"
        "SPECIFIC wrong details:\n"
        "1. Wrong quantities (different numbers than stated: 1 vs 2, few vs many)\n"
        "2. Wrong object identification (common misidentifications for these\n"
        "   specific objects)\n"
        "3. Wrong colors (opposite or commonly confused colors for these objects)\n"
        "4. Wrong actions/poses (static vs dynamic, different specific activities)\n"
        "5. Wrong spatial arrangements (different positioning than described)\n"
        "6. Wrong technical aspects (different angles, lighting,\n"
        "   styles than mentioned)\n"
        "7. Wrong mood/atmosphere (opposite emotional tones: calm vs aggressive)\n"
        "8. Wrong/additional elements not mentioned\n"
        "   (extra objects, backgrounds, features)\n"
        "9. Wrong environmental details (different settings, weather, time)\n"
        "10. Impossible or contradictory details (physically impossible combinations)\n"
        "\n"
        "Make questions very specific and testable. Use exact words/phrases\n"
        "from human descriptions.";
}

/// Machine-readable output contract appended as the system message. Kept
/// apart from the instruction template above so the template can be audited
/// for fidelity independently of transport formatting.
inline const char* question_format_clause() {
    return
        "You emit machine-readable output only. Respond with a single JSON object\n"
        "{\"positive\": [...], \"negative\": [...]} whose arrays hold the question\n"
        "strings in order. No prose outside the JSON object.";
}

inline std::string join_object_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += ", ";
        out += names[i];
    }
    return out;
}

namespace detail {

inline std::string substitute_placeholders(const std::string& templ,
                                           const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(templ.size());
    std::size_t pos = 0;
    while (pos < templ.size()) {
        std::size_t open = templ.find('{', pos);
        if (open == std::string::npos) {
            out.append(templ, pos, std::string::npos);
            break;
        }
        std::size_t close = templ.find('}', open);
        if (close == std::string::npos) {
            out.append(templ, pos, std::string::npos);
            break;
        }
        out.append(templ, pos, open - pos);
        std::string name = templ.substr(open + 1, close - open - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) throw TemplateError("no binding for placeholder '" + name + "'");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

} // namespace detail

/// Renders the question-synthesis prompt for one sample. Deterministic:
/// identical samples produce byte-identical bundles. Description text is
/// inserted untouched, quotes and all.
inline PromptBundle build_question_prompt(const Sample& sample) {
    PromptBundle bundle;
    bundle.template_id = "question-synthesis-v1";
    bundle.variable_bindings = {
        {"human_image_desc", sample.human_image_description},
        {"human_scene_desc", sample.human_scene_description},
        {"segmented_objects", join_object_names(sample.segmented_object_names)},
    };
    bundle.user_text = detail::substitute_placeholders(question_prompt_template(), bundle.variable_bindings);
    bundle.system_text = "Sample: \"" + sample.sample_id + "\"\n\n" + question_format_clause();
    return bundle;
}

namespace detail {

// Accepts a bare JSON object or one wrapped in a markdown code fence /
// surrounding prose; anything beyond that is the generator's problem, not
// ours to guess at.
inline nlohmann::json extract_json_object(const std::string& raw) {
    std::size_t open = raw.find('{');
    std::size_t close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("no JSON object in response");
    nlohmann::json obj = nlohmann::json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError("response JSON is malformed");
    return obj;
}

inline std::vector<std::string> read_question_array(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array())
        throw ParseError(std::string("response lacks a '") + key + "' array");
    std::vector<std::string> out;
    for (const auto& q : *it) {
        if (!q.is_string()) throw ParseError(std::string("non-string entry in '") + key + "'");
        std::string text = q.get<std::string>();
        if (text.find_first_not_of(" \t\r\n") == std::string::npos)
            throw ParseError(std::string("blank question in '") + key + "'");
        out.push_back(std::move(text));
    }
    if (out.size() < kMinQuestionsPerPolarity || out.size() > kMaxQuestionsPerPolarity)
        throw ParseError(std::string("'") + key + "' has " + std::to_string(out.size()) +
                         " questions, outside 1..30");
    return out;
}

} // namespace detail

/// Parses a generator response into a QuestionSet. Strict on purpose: a
/// response we cannot fully account for is retried upstream rather than
/// partially salvaged, since dropped questions would bias the score
/// denominators.
inline QuestionSet parse_question_response(const std::string& raw, const std::string& sample_id = {},
                                           const std::string& generator_model = {}) {
    if (raw.empty()) throw ParseError("empty response");
    nlohmann::json obj = detail::extract_json_object(raw);
    QuestionSet qs;
    qs.sample_id = sample_id;
    qs.generator_model = generator_model;
    qs.positive = detail::read_question_array(obj, "positive");
    qs.negative = detail::read_question_array(obj, "negative");
    qs.raw_response = raw;
    return qs;
}

inline nlohmann::json question_set_to_json(const QuestionSet& qs) {
    nlohmann::json rec{
        {"sample_id", qs.sample_id},
        {"generator_model", qs.generator_model},
        {"positive", qs.positive},
        {"negative", qs.negative},
    };
    if (!qs.raw_response.empty()) rec["raw_response"] = qs.raw_response;
    return rec;
}

inline QuestionSet question_set_from_json(const nlohmann::json& rec, std::size_t lineno = 0) {
    QuestionSet qs;
    qs.sample_id = detail::get_string(rec, "sample_id", lineno, true);
    qs.generator_model = detail::get_string(rec, "generator_model", lineno, false);
    auto read_list = [&](const char* key, std::vector<std::string>& out) {
        auto it = rec.find(key);
        if (it == rec.end() || !it->is_array()) throw ParseError(std::string("missing '") + key + "' array", lineno);
        for (const auto& q : *it) {
            if (!q.is_string()) throw ParseError(std::string("non-string question under '") + key + "'", lineno);
            out.push_back(q.get<std::string>());
        }
    };
    read_list("positive", qs.positive);
    read_list("negative", qs.negative);
    qs.raw_response = detail::get_string(rec, "raw_response", lineno, false);
    return qs;
}

/// Writes question sets in the line-delimited schema shared by generated and
/// externally supplied sets.
inline void save_question_sets(const std::vector<QuestionSet>& sets, const std::filesystem::path& path) {
    jsonl::Writer out(path);
    for (const auto& qs : sets) out.write(question_set_to_json(qs));
}

inline std::vector<QuestionSet> load_question_sets(const std::filesystem::path& path) {
    std::vector<QuestionSet> sets;
    jsonl::for_each_record(path, [&](const nlohmann::json& rec, std::size_t lineno) {
        sets.push_back(question_set_from_json(rec, lineno));
    });
    return sets;
}

/// Binds an externally generated question file to a corpus, so every judge
/// evaluates against one shared set. Requires total coverage: a dangling
/// sample_id in the file or a corpus sample without questions is an error,
/// as is an empty polarity list.
inline std::map<std::string, QuestionSet> attach_external_questions(const Corpus& corpus,
                                                                    const std::filesystem::path& question_file) {
    std::map<std::string, QuestionSet> attached;
    for (QuestionSet& qs : load_question_sets(question_file)) {
        if (!corpus.has_sample(qs.sample_id))
            throw ValidationError("question set for unknown sample '" + qs.sample_id + "'");
        if (qs.positive.empty() || qs.negative.empty())
            throw ValidationError("question set for '" + qs.sample_id + "' has an empty polarity list");
        attached[qs.sample_id] = std::move(qs);
    }
    for (const Sample& s : corpus.samples()) {
        if (!attached.count(s.sample_id))
            throw ValidationError("no question set for sample '" + s.sample_id + "'");
    }
    return attached;
}

} // namespace descjudge
