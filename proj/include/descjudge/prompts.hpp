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
#include <string>
#include <vector>

#include "descjudge/corpus.hpp"
#include "descjudge/questiongen.hpp"

namespace descjudge {

// Section markers in the verdict prompt. The deterministic test judges parse
// the prompt back by these anchors, so they must stay in sync with
// build_verdict_prompt below.
inline constexpr const char* kPositiveSectionMarker = "POSITIVE QUESTIONS";
inline constexpr const char* kNegativeSectionMarker = "NEGATIVE QUESTIONS";
inline constexpr const char* kResponseMarker = "Respond with";

/// Candidate text as judges see it: the scene-level description followed by
/// a labeled object-level section, matching the layout the description
/// generator itself emits. Labels come out in lexicographic order.
inline std::string render_candidate(const CandidateDescription& candidate) {
    std::string out = candidate.full_image_description;
    if (!candidate.object_descriptions.empty()) {
        out += "\n\nObject-Level Details:\n";
        bool first = true;
        for (const auto& [label, text] : candidate.object_descriptions) {
            if (!first) out += '\n';
            out += label + ": " + text;
            first = false;
        }
    }
    return out;
}

/// Prompt asking a judge to grade every question against the candidate.
/// A polarity with no questions drops its section entirely.
inline PromptBundle build_verdict_prompt(const Sample& sample, const CandidateDescription& candidate,
                                         const QuestionSet& questions) {
    PromptBundle bundle;
    bundle.template_id = "question-verdicts-v1";
    bundle.system_text =
        "You are a meticulous evaluation judge. Grade strictly from the texts you are given.";

    std::string u;
    u += "Sample: \"" + sample.sample_id + "\"\n\n";
    u += "You are verifying an AI-generated image description against targeted questions derived "
         "from human reference descriptions.\n\n";
    u += "AI Description:\n" + render_candidate(candidate) + "\n\n";

    if (!questions.positive.empty()) {
        u += std::string(kPositiveSectionMarker) +
             " - for each, answer CORRECT if the detail is correctly and clearly mentioned, OMITTED "
             "if it is absent, or INCORRECT if it is mentioned but factually wrong:\n";
        for (std::size_t i = 0; i < questions.positive.size(); ++i)
            u += std::to_string(i + 1) + ". " + questions.positive[i] + "\n";
        u += "\n";
    }
    if (!questions.negative.empty()) {
        u += std::string(kNegativeSectionMarker) +
             " - for each, answer AVOIDED if the wrong detail is absent, or INCLUDED if the "
             "description contains it:\n";
        for (std::size_t i = 0; i < questions.negative.size(); ++i)
            u += std::to_string(i + 1) + ". " + questions.negative[i] + "\n";
        u += "\n";
    }

    u += std::string(kResponseMarker) + " a single JSON object:\n"
         "{\"positive\": [{\"index\": 0, \"grade\": \"CORRECT\", \"rationale\": \"...\"}, ...],\n"
         " \"negative\": [{\"index\": 0, \"grade\": \"AVOIDED\", \"rationale\": \"...\"}, ...]}\n"
         "One entry per question, index = list number minus one. No prose outside the JSON object.";

    bundle.user_text = std::move(u);
    bundle.variable_bindings = {{"sample_id", sample.sample_id}};
    return bundle;
}

/// Prompt asking a judge for the three-dimensional assessment of a candidate
/// against the human references, each dimension a value in [0,1].
inline PromptBundle build_holistic_prompt(const Sample& sample, const CandidateDescription& candidate) {
    PromptBundle bundle;
    bundle.template_id = "holistic-v1";
    bundle.system_text =
        "You are a meticulous evaluation judge. Grade strictly from the texts you are given.";

    std::string u;
    u += "Sample: \"" + sample.sample_id + "\"\n\n";
    u += "You are judging an AI-generated description of an image against human reference "
         "descriptions.\n\n";
    u += "Human Image Description: \"" + sample.human_image_description + "\"\n";
    u += "Human Scene Description: \"" + sample.human_scene_description + "\"\n\n";
    u += "AI Description:\n" + render_candidate(candidate) + "\n\n";
    u += "Evaluate three dimensions, each as a continuous value in [0,1]:\n"
         "- accuracy: factual correctness of stated details. Are colors, quantities, object types, "
         "and spatial relationships correct? Are there factual errors or misidentifications?\n"
         "- completeness: coverage of key reference attributes. Are the main subjects and key "
         "details mentioned? Are important technical aspects (camera angle, mood, setting) "
         "captured?\n"
         "- hallucination_penalty: incorrect or unsupported information. Are details added that the "
         "human descriptions do not mention? Are there claims that contradict the human "
         "references?\n\n";
    u += std::string(kResponseMarker) + " a single JSON object:\n"
         "{\"accuracy\": 0.0, \"completeness\": 0.0, \"hallucination_penalty\": 0.0, "
         "\"explanation\": \"...\"}\n"
         "No prose outside the JSON object.";

    bundle.user_text = std::move(u);
    bundle.variable_bindings = {
        {"sample_id", sample.sample_id},
        {"human_image_desc", sample.human_image_description},
        {"human_scene_desc", sample.human_scene_description},
    };
    return bundle;
}

namespace detail {

/// Recovers the numbered items of one verdict-prompt section. Continuation
/// lines attach to the previous item; the next section or the response
/// instructions end the scan.
inline std::vector<std::string> parse_numbered_section(const std::string& text, const std::string& marker) {
    std::vector<std::string> items;
    std::size_t pos = text.find(marker);
    if (pos == std::string::npos) return items;
    pos = text.find('\n', pos);
    if (pos == std::string::npos) return items;
    ++pos;

    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;

        if (line.rfind(kPositiveSectionMarker, 0) == 0 || line.rfind(kNegativeSectionMarker, 0) == 0 ||
            line.rfind(kResponseMarker, 0) == 0)
            break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::size_t digits = 0;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
        if (digits > 0 && digits + 1 < line.size() && line[digits] == '.' && line[digits + 1] == ' ') {
            items.push_back(line.substr(digits + 2));
        } else if (!items.empty()) {
            items.back() += "\n" + line;
        }
    }
    return items;
}

} // namespace detail

} // namespace descjudge
