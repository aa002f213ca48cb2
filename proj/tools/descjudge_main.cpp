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

#include <iostream>
#include <map>
#include <set>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "descjudge/descjudge.hpp"

namespace {

using namespace descjudge;

/// --embedder forms:
///   hashing            in-tree bag-of-words embedder, 256 dimensions
///   hashing:<dim>      same with an explicit dimension
///   openai:<endpoint>;model=<name>;dim=<n>[;key_env=<VAR>]
std::shared_ptr<EmbeddingBackend> make_embedder(const std::string& id) {
    if (id == "hashing") return std::make_shared<HashingEmbedder>();
    if (id.rfind("hashing:", 0) == 0) return std::make_shared<HashingEmbedder>(std::stoi(id.substr(8)));
    if (id.rfind("openai:", 0) == 0) {
        std::string rest = id.substr(7);
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            std::size_t semi = rest.find(';', pos);
            if (semi == std::string::npos) semi = rest.size();
            parts.push_back(rest.substr(pos, semi - pos));
            pos = semi + 1;
        }
        if (parts.empty() || parts[0].empty())
            throw FatalConfigError("openai embedder needs an endpoint");
        std::string endpoint = parts[0], model, key_env;
        int dim = 0;
        for (std::size_t i = 1; i < parts.size(); ++i) {
            if (parts[i].rfind("model=", 0) == 0) model = parts[i].substr(6);
            else if (parts[i].rfind("dim=", 0) == 0) dim = std::stoi(parts[i].substr(4));
            else if (parts[i].rfind("key_env=", 0) == 0) key_env = parts[i].substr(8);
            else throw FatalConfigError("unknown embedder option '" + parts[i] + "'");
        }
        if (model.empty() || dim <= 0)
            throw FatalConfigError("openai embedder needs model=<name> and dim=<n>");
        EmbeddingSpec spec{"openai:" + model, dim, Normalization::UNIT_NORM};
        return std::make_shared<HttpEmbedder>(spec, endpoint, model, key_env);
    }
    throw FatalConfigError("unknown embedder '" + id + "' (expected hashing[:dim] or openai:...)");
}

int cmd_evaluate(const std::string& config_path, bool resume_requested) {
    RunConfig config = load_run_config(config_path);
    RunSummary summary = run(config, resume_requested);
    std::cout << "evaluated " << summary.pairs_evaluated << " pair(s): " << summary.ok << " OK, "
              << summary.failed << " FAILED";
    if (summary.pairs_skipped_completed > 0)
        std::cout << " (" << summary.pairs_skipped_completed << " already complete, skipped)";
    std::cout << "\nresults: " << config.checkpoint_path.string() << "\n";
    return summary.failed == 0 ? 0 : 2;
}

int cmd_similarity(const std::vector<std::string>& question_files, const std::string& embedder_id,
                   const std::string& out_dir, const std::string& combined_mode_name,
                   const std::string& cassette_path, const std::string& mode_name) {
    // Group question sets by generator across all input files.
    std::map<std::string, QuestionMap> by_generator;
    for (const auto& file : question_files) {
        for (QuestionSet& qs : load_question_sets(file)) {
            if (qs.generator_model.empty())
                throw ValidationError("question set for '" + qs.sample_id + "' in " + file +
                                      " lacks generator_model");
            by_generator[qs.generator_model][qs.sample_id] = std::move(qs);
        }
    }
    if (by_generator.size() < 2)
        throw ValidationError("similarity analysis needs question sets from at least two generators");

    std::shared_ptr<EmbeddingBackend> backend = make_embedder(embedder_id);
    if (!cassette_path.empty()) {
        auto mode = gateway_mode_from_name(mode_name);
        if (!mode || *mode == GatewayMode::LIVE)
            throw FatalConfigError("--cassette needs --mode record or --mode replay");
        auto gateway = Gateway::with_cassette(*mode, cassette_path);
        gateway->register_embedder(backend);
        backend = std::make_shared<GatewayEmbedder>(gateway, backend->spec());
    }

    CombinedMode combined = CombinedMode::CONCATENATE;
    if (combined_mode_name == "mean") combined = CombinedMode::MEAN_OF_POLARITIES;
    else if (combined_mode_name != "concat")
        throw FatalConfigError("--combined-mode must be concat or mean");

    std::vector<std::string> generators;
    for (const auto& [gen, _] : by_generator) generators.push_back(gen);

    std::vector<SimilarityAggregate> aggregates;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            for (Polarity polarity : {Polarity::POSITIVE, Polarity::NEGATIVE, Polarity::COMBINED}) {
                aggregates.push_back(analyze_pair(by_generator[generators[i]], by_generator[generators[j]],
                                                  polarity, *backend, combined));
            }
        }
    }

    ArtifactManifest manifest = write_similarity_artifacts(aggregates, out_dir);
    std::cout << "wrote " << manifest.artifacts.size() << " similarity artifact(s) to " << out_dir << "\n";
    for (const auto& a : manifest.artifacts) std::cout << "  " << a.path << "\n";
    return 0;
}

// Pulls the question sets out of a result file, one file per generator, in
// the same schema the similarity command and external attachment consume.
int cmd_questions(const std::string& results_path, const std::string& out_dir) {
    std::vector<SampleResult> results = load_results(results_path);
    std::map<std::string, std::vector<QuestionSet>> by_generator;
    std::map<std::string, std::set<std::string>> seen; // generator -> sample ids
    for (const auto& r : results) {
        if (!r.ok()) continue;
        const QuestionSet& qs = r.question_set;
        if (qs.generator_model.empty()) continue;
        if (!seen[qs.generator_model].insert(qs.sample_id).second) continue; // shared external set
        QuestionSet copy = qs;
        copy.raw_response.clear(); // question files carry questions, not transcripts
        by_generator[qs.generator_model].push_back(std::move(copy));
    }
    if (by_generator.empty()) throw NoDataError("no question sets in " + results_path);

    std::filesystem::create_directories(out_dir);
    for (const auto& [generator, sets] : by_generator) {
        std::string name;
        for (char c : generator) name += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '-';
        std::filesystem::path path = std::filesystem::path(out_dir) / (name + ".jsonl");
        save_question_sets(sets, path);
        std::cout << path.string() << " (" << sets.size() << " sample(s))\n";
    }
    return 0;
}

int cmd_score(const std::string& results_path, const std::string& out_dir) {
    std::vector<SampleResult> results = load_results(results_path);
    ArtifactManifest manifest = write_score_tables(results, out_dir);
    std::cout << "wrote " << manifest.artifacts.size() << " table(s) to " << out_dir << "\n";
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& similarity_dir,
               const std::string& out_dir) {
    std::vector<SampleResult> results = load_results(results_path);
    std::vector<SimilarityAggregate> similarity;
    if (!similarity_dir.empty()) similarity = load_similarity_artifacts(similarity_dir);
    ArtifactManifest manifest = emit_report(results, similarity, out_dir);
    std::cout << "wrote " << manifest.artifacts.size() << " artifact(s) to " << out_dir << "\n";
    for (const auto& note : manifest.notes) std::cout << "  note: " << note << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-assessment judge harness for vision-language descriptions"};
    app.require_subcommand(1);

    auto* evaluate = app.add_subcommand("evaluate", "Run the evaluation pipeline from a config file");
    std::string config_path;
    bool resume_flag = false;
    evaluate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    evaluate->add_flag("--resume", resume_flag, "Resume an interrupted run from its result file");

    auto* similarity = app.add_subcommand("similarity", "Cross-generator question similarity analysis");
    std::vector<std::string> question_files;
    std::string embedder_id = "hashing";
    std::string sim_out;
    std::string combined_mode = "concat";
    std::string sim_cassette;
    std::string sim_mode = "live";
    similarity->add_option("--questions", question_files, "Question-set files (one or more)")
        ->required()
        ->expected(-1);
    similarity->add_option("--embedder", embedder_id, "hashing[:dim] or openai:<endpoint>;model=..;dim=..");
    similarity->add_option("--out", sim_out, "Output directory")->required();
    similarity->add_option("--combined-mode", combined_mode, "combined polarity: concat or mean");
    similarity->add_option("--cassette", sim_cassette, "Cassette for embedding record/replay");
    similarity->add_option("--mode", sim_mode, "Cassette mode: record or replay");

    auto* questions = app.add_subcommand("questions", "Extract per-generator question files from results");
    std::string questions_results, questions_out;
    questions->add_option("--results", questions_results, "Result file from evaluate")->required();
    questions->add_option("--out", questions_out, "Output directory")->required();

    auto* score = app.add_subcommand("score", "Aggregate a result file into numeric tables");
    std::string score_results, score_out;
    score->add_option("--results", score_results, "Result file from evaluate")->required();
    score->add_option("--out", score_out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "Emit the full plot-ready report");
    std::string report_results, report_similarity, report_out;
    report->add_option("--results", report_results, "Result file from evaluate")->required();
    report->add_option("--similarity", report_similarity, "Directory written by the similarity command");
    report->add_option("--out", report_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evaluate->parsed()) return cmd_evaluate(config_path, resume_flag);
        if (similarity->parsed())
            return cmd_similarity(question_files, embedder_id, sim_out, combined_mode, sim_cassette,
                                  sim_mode);
        if (questions->parsed()) return cmd_questions(questions_results, questions_out);
        if (score->parsed()) return cmd_score(score_results, score_out);
        if (report->parsed()) return cmd_report(report_results, report_similarity, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
