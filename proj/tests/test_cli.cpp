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

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "descjudge/pipeline.hpp"
#include "support/pipeline_helpers.hpp"

using namespace descjudge;
using namespace descjudge::testsupport;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string command = std::string(DESCJUDGE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("the CLI drives the whole workflow") {
    fs::path dir = fs::temp_directory_path() / "descjudge_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    write_synthetic_corpus(dir / "corpus.jsonl", 4);
    {
        nlohmann::json config{
            {"corpus", (dir / "corpus.jsonl").string()},
            {"judges",
             nlohmann::json::array(
                 {{{"judge_id", "critic"}, {"endpoint", "mock:critic"}, {"model_name", "critic-model"}},
                  {{"judge_id", "lenient"},
                   {"endpoint", "mock:consistent"},
                   {"model_name", "lenient-model"}}})},
            {"question_source", {{"mode", "self"}}},
            {"gateway", {{"mode", "record"}, {"cassette", (dir / "cassette.jsonl").string()}}},
            {"results", (dir / "results.jsonl").string()},
            {"concurrency", 2},
        };
        std::ofstream out(dir / "run.json");
        out << config.dump(2);
    }

    CHECK(run_cli("evaluate --config " + (dir / "run.json").string()) == 0);
    CHECK(load_results(dir / "results.jsonl").size() == 8);

    // A rerun without --resume must refuse; with --resume it is a no-op.
    CHECK(run_cli("evaluate --config " + (dir / "run.json").string()) != 0);
    CHECK(run_cli("evaluate --config " + (dir / "run.json").string() + " --resume") == 0);
    CHECK(load_results(dir / "results.jsonl").size() == 8);

    CHECK(run_cli("questions --results " + (dir / "results.jsonl").string() + " --out " +
                  (dir / "qsets").string()) == 0);
    CHECK(fs::exists(dir / "qsets" / "critic-model.jsonl"));
    CHECK(fs::exists(dir / "qsets" / "lenient-model.jsonl"));

    CHECK(run_cli("similarity --questions " + (dir / "qsets" / "critic-model.jsonl").string() + " " +
                  (dir / "qsets" / "lenient-model.jsonl").string() + " --embedder hashing --out " +
                  (dir / "sim").string()) == 0);
    CHECK(fs::exists(dir / "sim" / "similarity_heatmap.csv"));
    CHECK(fs::exists(dir / "sim" / "similarity_asymmetry.csv"));

    CHECK(run_cli("score --results " + (dir / "results.jsonl").string() + " --out " +
                  (dir / "tables").string()) == 0);
    CHECK(fs::exists(dir / "tables" / "bias.csv"));

    CHECK(run_cli("report --results " + (dir / "results.jsonl").string() + " --similarity " +
                  (dir / "sim").string() + " --out " + (dir / "report").string()) == 0);
    CHECK(fs::exists(dir / "report" / "manifest.json"));
    CHECK(fs::exists(dir / "report" / "similarity_violin.csv"));
    CHECK(fs::exists(dir / "report" / "report.svg"));
}

TEST_CASE("the CLI exits nonzero on unusable inputs") {
    CHECK(run_cli("report --results /nonexistent/results.jsonl --out /tmp/never") != 0);
    CHECK(run_cli("score --results /nonexistent/results.jsonl --out /tmp/never") != 0);
    CHECK(run_cli("evaluate --config /nonexistent/config.json") != 0);
    CHECK(run_cli("similarity --questions /nonexistent/q.jsonl --out /tmp/never") != 0);
}
