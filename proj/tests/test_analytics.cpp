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

#include <filesystem>
#include <fstream>
#include <random>

#include "descjudge/analytics.hpp"
#include "descjudge/mock.hpp"
#include "descjudge/report.hpp"
#include "support/result_builders.hpp"

using namespace descjudge;
using namespace descjudge::testsupport;
namespace fs = std::filesystem;

TEST_CASE("constant values have zero spread") {
    DimensionStats s = describe({0.5, 0.5, 0.5}, "j", Dimension::FINAL_REWARD);
    CHECK(s.mean == doctest::Approx(0.5));
    CHECK(s.std_dev == 0.0);
    CHECK(s.quartiles.median == doctest::Approx(0.5));
}

TEST_CASE("two-point sample std uses the n-1 denominator") {
    DimensionStats s = describe({0.0, 1.0}, "j", Dimension::FINAL_REWARD);
    CHECK(s.mean == doctest::Approx(0.5));
    CHECK(s.std_dev == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12)); // ~0.7071
}

TEST_CASE("quartiles interpolate linearly between closest ranks") {
    DimensionStats s = describe({1.0, 2.0, 3.0, 4.0}, "j", Dimension::FINAL_REWARD);
    CHECK(s.quartiles.q1 == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(s.quartiles.median == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(s.quartiles.q3 == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(s.quartiles.q1 <= s.quartiles.median);
    CHECK(s.quartiles.median <= s.quartiles.q3);
}

TEST_CASE("outliers lie beyond 1.5 IQR and whiskers span the rest") {
    std::vector<double> values{0.48, 0.50, 0.51, 0.52, 0.53, 0.55, 0.95};
    DimensionStats s = describe(values, "j", Dimension::FINAL_REWARD);
    REQUIRE(s.outlier_values.size() == 1);
    CHECK(s.outlier_values[0] == doctest::Approx(0.95));
    CHECK(s.whisker_high == doctest::Approx(0.55));
    CHECK(s.whisker_low == doctest::Approx(0.48));
}

TEST_CASE("the fixed-rubric persona yields near-zero holistic spread over 100 samples") {
    MockJudgeTransport persona(MockPersona::CONSISTENT);
    std::vector<double> values;
    for (int i = 0; i < 100; ++i) {
        ChatRequest request{"j", "m", {}, "", "", "holistic", "sample-" + std::to_string(i)};
        nlohmann::json reply = nlohmann::json::parse(persona.send(request));
        double raw = 0.6 * reply.at("accuracy").get<double>() +
                     0.4 * reply.at("completeness").get<double>() -
                     reply.at("hallucination_penalty").get<double>();
        values.push_back(clamp01(raw));
    }
    DimensionStats s = describe(values, "consistent", Dimension::HOLISTIC_REWARD);
    CHECK(s.std_dev < 0.01);
}

TEST_CASE("dimension_stats excludes FAILED results and missing-holistic dimensions") {
    std::vector<SampleResult> results{
        planted_result("s1", "j", 0.6, 0.5, 0.4, 0.9),
        planted_result("s2", "j", 0.8, 0.7, 0.5, 0.8),
        failed_result("s3", "j"),
    };
    results.push_back([] {
        SampleResult r = planted_result("s4", "j", 0.4, 0.0, 0.3, 0.7);
        r.holistic.reset(); // question-only record
        return r;
    }());

    DimensionStats q = dimension_stats(results, "j", Dimension::QUESTION_REWARD);
    CHECK(q.count == 3); // failed excluded, question-only included
    DimensionStats acc = dimension_stats(results, "j", Dimension::ACCURACY);
    CHECK(acc.count == 2); // holistic-less record also excluded here
    CHECK(failed_counts(results)["j"] == 1);

    CHECK_THROWS_AS(dimension_stats(results, "nobody", Dimension::ACCURACY), NoDataError);
}

TEST_CASE("bias ratios reproduce the published aggregate arithmetic") {
    auto constant_results = [](double neg, double pos) {
        std::vector<SampleResult> results;
        for (int i = 0; i < 10; ++i)
            results.push_back(planted_result("s" + std::to_string(i), "j", 0.5, 0.5, pos, neg));
        return results;
    };

    CHECK(bias_report(constant_results(0.9221, 0.4198), "j").ratio ==
          doctest::Approx(2.20).epsilon(0.005));
    CHECK(bias_report(constant_results(0.9212, 0.4547), "j").ratio ==
          doctest::Approx(2.03).epsilon(0.005));
    CHECK(bias_report(constant_results(0.7917, 0.3882), "j").ratio ==
          doctest::Approx(2.04).epsilon(0.005));
    CHECK(bias_report(constant_results(0.5, 0.5), "j").ratio == doctest::Approx(1.0));
}

TEST_CASE("bias ratio is scale-equivariant and guards its denominator") {
    std::mt19937 rng(211);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::vector<SampleResult> results;
    for (int i = 0; i < 20; ++i)
        results.push_back(planted_result("s" + std::to_string(i), "j", 0.5, 0.5, unit(rng), unit(rng)));
    double base = bias_report(results, "j").ratio;

    const double c = 0.37;
    std::vector<SampleResult> scaled = results;
    for (auto& r : scaled) {
        r.bundle.positive_norm *= c;
        r.bundle.negative_norm *= c;
    }
    CHECK(bias_report(scaled, "j").ratio == doctest::Approx(base).epsilon(1e-12));

    std::vector<SampleResult> zero{planted_result("s1", "j", 0.5, 0.5, 0.0, 0.9)};
    CHECK_THROWS_AS(bias_report(zero, "j"), DegenerateDenominatorError);
}

TEST_CASE("Pearson correlation hits the exact poles") {
    std::vector<SampleResult> linear, anti;
    for (int i = 0; i < 6; ++i) {
        double x = 0.1 * i;
        linear.push_back(planted_result("s" + std::to_string(i), "j", x, 0.2 + 0.5 * x, 0.5, 0.5));
        anti.push_back(planted_result("s" + std::to_string(i), "j", x, 0.9 - 0.5 * x, 0.5, 0.5));
    }
    CHECK(method_correlation(linear, "j").r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(method_correlation(anti, "j").r == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("Pearson matches a textbook sum-formula oracle on random pairs") {
    std::mt19937 rng(223);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SampleResult> results;
        std::vector<double> xs, ys;
        for (int i = 0; i < 5; ++i) {
            double x = unit(rng), y = unit(rng);
            xs.push_back(x);
            ys.push_back(y);
            results.push_back(planted_result("s" + std::to_string(i), "j", x, y, 0.5, 0.5));
        }
        // Independent oracle: r = (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2)(n*Syy - Sy^2)).
        double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
        double n = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxy += xs[i] * ys[i];
            sxx += xs[i] * xs[i];
            syy += ys[i] * ys[i];
        }
        double want = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
        CHECK(method_correlation(results, "j").r == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("Pearson is invariant under positive-slope affine transforms") {
    std::mt19937 rng(227);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SampleResult> results;
    for (int i = 0; i < 12; ++i)
        results.push_back(planted_result("s" + std::to_string(i), "j", unit(rng), unit(rng), 0.5, 0.5));
    double base = method_correlation(results, "j").r;

    std::vector<SampleResult> transformed = results;
    for (auto& r : transformed) r.bundle.question_reward = 0.25 * r.bundle.question_reward + 0.1;
    CHECK(method_correlation(transformed, "j").r == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("zero-variance holistic reports a degenerate flag, not an error") {
    std::vector<SampleResult> results;
    for (int i = 0; i < 10; ++i)
        results.push_back(planted_result("s" + std::to_string(i), "j", 0.1 * i, 0.64, 0.5, 0.5));
    MethodCorrelation c = method_correlation(results, "j");
    CHECK(c.degenerate);
    CHECK(c.r == 0.0);

    std::vector<SampleResult> one{planted_result("s1", "j", 0.5, 0.5, 0.5, 0.5)};
    CHECK_THROWS_AS(method_correlation(one, "j"), NoDataError);
}

TEST_CASE("percent presentation rounds half-even to two decimals") {
    CHECK(format_percent(0.1499) == "14.99");
    CHECK(format_percent(0.9221) == "92.21");
    CHECK(format_percent(0.12345) == "12.34"); // tie to even
    CHECK(format_percent(0.12355) == "12.36");
}

namespace {

std::vector<SampleResult> report_fixture() {
    std::vector<SampleResult> results;
    std::mt19937 rng(229);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        double q = unit(rng);
        results.push_back(planted_result("s" + std::to_string(i), "balanced", q,
                                         clamp01(0.3 + 0.4 * q), 0.3 + 0.2 * unit(rng),
                                         0.7 + 0.2 * unit(rng), 0.8, 0.7, 0.15,
                                         clamp01(0.6 * q + 0.25)));
        results.push_back(planted_result("s" + std::to_string(i), "harsh", 0.8 * q,
                                         clamp01(0.1 + 0.2 * q), 0.2 + 0.2 * unit(rng),
                                         0.5 + 0.3 * unit(rng), 0.6, 0.6, 0.54,
                                         clamp01(0.4 * q + 0.1)));
    }
    results.push_back(failed_result("s-broken", "harsh"));
    return results;
}

} // namespace

TEST_CASE("emit_report writes deterministic artifacts with a hashed manifest") {
    auto results = report_fixture();
    fs::path dir1 = fs::temp_directory_path() / "report_run1";
    fs::path dir2 = fs::temp_directory_path() / "report_run2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    ArtifactManifest m1 = emit_report(results, {}, dir1);
    ArtifactManifest m2 = emit_report(results, {}, dir2);

    REQUIRE(m1.artifacts.size() == m2.artifacts.size());
    for (std::size_t i = 0; i < m1.artifacts.size(); ++i) {
        CHECK(m1.artifacts[i].path == m2.artifacts[i].path);
        CHECK(m1.artifacts[i].content_hash == m2.artifacts[i].content_hash);
        CHECK(m1.artifacts[i].bytes == m2.artifacts[i].bytes);
    }
    bool noted_omission = false;
    for (const auto& note : m1.notes)
        if (note.find("similarity") != std::string::npos) noted_omission = true;
    CHECK(noted_omission);

    for (const char* name : {"boxplot.csv", "radar.csv", "scatter_question_vs_holistic.csv",
                             "scatter_means.csv", "scatter_penalty_vs_final.csv", "summary.txt",
                             "report.svg", "manifest.json"})
        CHECK(fs::exists(dir1 / name));
}

TEST_CASE("radar flips the hallucination axis") {
    std::vector<SampleResult> results;
    for (int i = 0; i < 5; ++i)
        results.push_back(planted_result("s" + std::to_string(i), "j", 0.6, 0.6, 0.4, 0.9, 0.8, 0.7, 0.15));
    fs::path dir = fs::temp_directory_path() / "report_radar";
    fs::remove_all(dir);
    emit_report(results, {}, dir);

    std::ifstream in(dir / "radar.csv");
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
        if (line.find("low_hallucination") != std::string::npos) {
            found = true;
            double value = std::stod(line.substr(line.rfind(',') + 1));
            CHECK(value == doctest::Approx(0.85).epsilon(1e-9)); // 1 - 0.15
        }
        CHECK(line.find("hallucination_penalty") == std::string::npos);
    }
    CHECK(found);
}

TEST_CASE("summary quotes exclusion counts and the raw holistic mean") {
    auto results = report_fixture();
    fs::path dir = fs::temp_directory_path() / "report_summary";
    fs::remove_all(dir);
    emit_report(results, {}, dir);

    std::ifstream in(dir / "summary.txt");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("FAILED (excluded): 1") != std::string::npos);
    CHECK(text.find("holistic_raw mean (unclipped):") != std::string::npos);
    CHECK(text.find("sample (n-1) convention") != std::string::npos);
    CHECK(text.find("bias ratio") != std::string::npos);
}

TEST_CASE("reporting with no results is NoData") {
    CHECK_THROWS_AS(emit_report({}, {}, fs::temp_directory_path() / "report_empty"), NoDataError);
    CHECK_THROWS_AS(write_score_tables({}, fs::temp_directory_path() / "report_empty"), NoDataError);
}
