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
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "descjudge/analytics.hpp"
#include "descjudge/errors.hpp"
#include "descjudge/hashing.hpp"
#include "descjudge/numeric.hpp"
#include "descjudge/similarity.hpp"

namespace descjudge {

struct ArtifactEntry {
    std::string path; // relative to the report directory
    std::uintmax_t bytes = 0;
    std::string content_hash;
};

struct ArtifactManifest {
    std::vector<ArtifactEntry> artifacts;
    std::vector<std::string> notes;
};

namespace detail {

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

// Shortest round-trip representation; deterministic across runs.
inline std::string csv_number(double v) { return nlohmann::json(v).dump(); }

class ArtifactWriter {
  public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    void write_file(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw IoError("cannot write " + (dir_ / name).string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for " + (dir_ / name).string());
        manifest_.artifacts.push_back({name, content.size(), fnv1a64_hex(content)});
    }

    void note(std::string text) { manifest_.notes.push_back(std::move(text)); }

    ArtifactManifest finish() {
        std::sort(manifest_.artifacts.begin(), manifest_.artifacts.end(),
                  [](const ArtifactEntry& a, const ArtifactEntry& b) { return a.path < b.path; });
        nlohmann::json doc{{"artifacts", nlohmann::json::array()}, {"notes", manifest_.notes}};
        for (const auto& a : manifest_.artifacts)
            doc["artifacts"].push_back(
                {{"path", a.path}, {"bytes", a.bytes}, {"fnv1a64", a.content_hash}});
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        if (!out) throw IoError("cannot write manifest");
        out << doc.dump(2) << '\n';
        return manifest_;
    }

  private:
    std::filesystem::path dir_;
    ArtifactManifest manifest_;
};

} // namespace detail

/// Similarity outputs in plot-ready form: the pair x polarity mean matrix
/// (heatmap), per-sample long-format records (violin/scatter), and the
/// positive-vs-negative asymmetry table.
inline ArtifactManifest write_similarity_artifacts(const std::vector<SimilarityAggregate>& aggregates,
                                                   const std::filesystem::path& out_dir) {
    detail::ArtifactWriter writer(out_dir);

    std::string heatmap = "pair,polarity,mean,sample_count,skipped_samples\n";
    for (const auto& agg : aggregates) {
        heatmap += detail::csv_escape(agg.model_pair.label()) + "," + polarity_name(agg.polarity) + "," +
                   detail::csv_number(agg.mean) + "," + std::to_string(agg.sample_count) + "," +
                   std::to_string(agg.skipped_samples) + "\n";
    }
    writer.write_file("similarity_heatmap.csv", heatmap);

    std::string longform = "pair,polarity,sample_id,similarity\n";
    for (const auto& agg : aggregates)
        for (const auto& rec : agg.records)
            longform += detail::csv_escape(agg.model_pair.label()) + "," + polarity_name(agg.polarity) +
                        "," + detail::csv_escape(rec.sample_id) + "," +
                        detail::csv_number(rec.symmetric_similarity) + "\n";
    writer.write_file("similarity_per_sample.csv", longform);

    bool has_both_polarities = false;
    {
        std::map<ModelPair, std::pair<bool, bool>> seen;
        for (const auto& agg : aggregates) {
            if (agg.polarity == Polarity::POSITIVE) seen[agg.model_pair].first = true;
            if (agg.polarity == Polarity::NEGATIVE) seen[agg.model_pair].second = true;
        }
        has_both_polarities = !seen.empty();
        for (const auto& [pair, flags] : seen)
            if (!flags.first || !flags.second) has_both_polarities = false;
    }
    if (has_both_polarities) {
        std::string asym = "pair,positive_mean,negative_mean,delta\n";
        for (const auto& row : asymmetry_table(aggregates))
            asym += detail::csv_escape(row.model_pair.label()) + "," + detail::csv_number(row.positive_mean) +
                    "," + detail::csv_number(row.negative_mean) + "," + detail::csv_number(row.delta) + "\n";
        writer.write_file("similarity_asymmetry.csv", asym);
    } else {
        writer.note("asymmetry table omitted: need positive and negative aggregates per pair");
    }

    return writer.finish();
}

/// Reads back the long-format similarity records written by
/// write_similarity_artifacts (enough to rebuild the aggregates).
inline std::vector<SimilarityAggregate> load_similarity_artifacts(const std::filesystem::path& dir) {
    std::filesystem::path file = dir / "similarity_per_sample.csv";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());

    std::map<std::pair<std::string, std::string>, SimilarityAggregate> groups;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        // Fields are written unquoted unless they contain separators; pair
        // labels and sample ids in practice never do.
        std::vector<std::string> cols;
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.size() != 4) throw ParseError("bad similarity record: " + line);

        std::size_t bar = cols[0].find('|');
        if (bar == std::string::npos) throw ParseError("bad pair label: " + cols[0]);
        ModelPair pair(cols[0].substr(0, bar), cols[0].substr(bar + 1));
        Polarity polarity = cols[1] == "positive" ? Polarity::POSITIVE
                            : cols[1] == "negative" ? Polarity::NEGATIVE
                                                     : Polarity::COMBINED;
        auto& agg = groups[{cols[0], cols[1]}];
        agg.model_pair = pair;
        agg.polarity = polarity;
        agg.records.push_back({cols[2], pair, polarity, std::stod(cols[3])});
    }

    std::vector<SimilarityAggregate> out;
    for (auto& [key, agg] : groups) {
        double sum = 0.0;
        for (const auto& r : agg.records) sum += r.symmetric_similarity;
        agg.sample_count = agg.records.size();
        agg.mean = agg.records.empty() ? 0.0 : sum / static_cast<double>(agg.records.size());
        out.push_back(std::move(agg));
    }
    return out;
}

/// Numeric tables for the `score` subcommand: per-dimension stats, bias
/// ratios and method correlations, one CSV each.
inline ArtifactManifest write_score_tables(const std::vector<SampleResult>& results,
                                           const std::filesystem::path& out_dir) {
    if (results.empty()) throw NoDataError("no results to score");
    detail::ArtifactWriter writer(out_dir);
    std::vector<std::string> judges = judge_ids(results);

    std::string stats_csv =
        "judge,dimension,count,mean,std,q1,median,q3,whisker_low,whisker_high,outlier_count\n";
    for (const auto& judge : judges) {
        for (Dimension dim : all_dimensions()) {
            std::vector<double> values = detail::collect_dimension(results, judge, dim);
            if (values.empty()) continue;
            DimensionStats s = describe(std::move(values), judge, dim);
            stats_csv += detail::csv_escape(judge) + "," + dimension_name(dim) + "," +
                         std::to_string(s.count) + "," + detail::csv_number(s.mean) + "," +
                         detail::csv_number(s.std_dev) + "," + detail::csv_number(s.quartiles.q1) + "," +
                         detail::csv_number(s.quartiles.median) + "," + detail::csv_number(s.quartiles.q3) +
                         "," + detail::csv_number(s.whisker_low) + "," + detail::csv_number(s.whisker_high) +
                         "," + std::to_string(s.outlier_values.size()) + "\n";
        }
    }
    writer.write_file("dimension_stats.csv", stats_csv);

    std::string bias_csv = "judge,negative_mean,positive_mean,ratio\n";
    for (const auto& judge : judges) {
        try {
            BiasReport b = bias_report(results, judge);
            bias_csv += detail::csv_escape(judge) + "," + detail::csv_number(b.negative_mean) + "," +
                        detail::csv_number(b.positive_mean) + "," + detail::csv_number(b.ratio) + "\n";
        } catch (const DegenerateDenominatorError&) {
            writer.note("bias ratio undefined for judge " + judge + " (zero positive mean)");
        } catch (const NoDataError&) {
            writer.note("bias ratio unavailable for judge " + judge + " (no OK results)");
        }
    }
    writer.write_file("bias.csv", bias_csv);

    std::string corr_csv = "judge,pearson_r,degenerate,count\n";
    for (const auto& judge : judges) {
        try {
            MethodCorrelation c = method_correlation(results, judge);
            corr_csv += detail::csv_escape(judge) + "," + detail::csv_number(c.r) + "," +
                        (c.degenerate ? "true" : "false") + "," + std::to_string(c.count) + "\n";
        } catch (const NoDataError&) {
            writer.note("correlation unavailable for judge " + judge);
        }
    }
    writer.write_file("correlations.csv", corr_csv);

    return writer.finish();
}

namespace detail {

inline const std::vector<std::string>& judge_palette() {
    static const std::vector<std::string> colors{"#d62728", "#ff7f0e", "#7f7f7f",
                                                 "#1f77b4", "#2ca02c", "#9467bd"};
    return colors;
}

inline std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// One-page SVG of grouped boxplots: eight dimension groups, one box per
/// judge, whiskers and outlier dots included. Pure text generation, byte
/// deterministic.
inline std::string render_boxplot_svg(const std::vector<std::string>& judges,
                                      const std::map<std::string, std::vector<DimensionStats>>& stats) {
    const double width = 1160, height = 560;
    const double left = 70, right = 40, top = 50, bottom = 110;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const auto& dims = all_dimensions();
    const double group_w = plot_w / static_cast<double>(dims.size());

    auto y_of = [&](double v) { return top + (1.0 - clamp01(v)) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_coord(width) + "\" height=\"" +
           svg_coord(height) + "\" viewBox=\"0 0 " + svg_coord(width) + " " + svg_coord(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + svg_coord(width / 2) +
           "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           "Score distributions by judge and dimension</text>\n";

    for (int tick = 0; tick <= 4; ++tick) {
        double v = tick / 4.0;
        double y = y_of(v);
        svg += "<line x1=\"" + svg_coord(left) + "\" y1=\"" + svg_coord(y) + "\" x2=\"" +
               svg_coord(width - right) + "\" y2=\"" + svg_coord(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + svg_coord(left - 8) + "\" y=\"" + svg_coord(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + format_fixed(v, 2) +
               "</text>\n";
    }

    for (std::size_t d = 0; d < dims.size(); ++d) {
        double gx = left + group_w * static_cast<double>(d);
        svg += "<text x=\"" + svg_coord(gx + group_w / 2) + "\" y=\"" + svg_coord(height - bottom + 48) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" transform=\"rotate(-25 " +
               svg_coord(gx + group_w / 2) + " " + svg_coord(height - bottom + 48) + ")\">" +
               dimension_name(dims[d]) + "</text>\n";

        double slot_w = group_w / static_cast<double>(judges.size() + 1);
        for (std::size_t j = 0; j < judges.size(); ++j) {
            auto it = stats.find(judges[j]);
            if (it == stats.end() || d >= it->second.size() || it->second[d].count == 0) continue;
            const DimensionStats& s = it->second[d];
            const std::string& color = judge_palette()[j % judge_palette().size()];
            double cx = gx + slot_w * (static_cast<double>(j) + 1.0);
            double box_w = slot_w * 0.6;

            svg += "<line x1=\"" + svg_coord(cx) + "\" y1=\"" + svg_coord(y_of(s.whisker_low)) +
                   "\" x2=\"" + svg_coord(cx) + "\" y2=\"" + svg_coord(y_of(s.whisker_high)) +
                   "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
            double box_top = y_of(s.quartiles.q3);
            double box_h = y_of(s.quartiles.q1) - box_top;
            if (box_h < 0.5) box_h = 0.5; // keep collapsed boxes visible
            svg += "<rect x=\"" + svg_coord(cx - box_w / 2) + "\" y=\"" + svg_coord(box_top) +
                   "\" width=\"" + svg_coord(box_w) + "\" height=\"" + svg_coord(box_h) + "\" fill=\"" +
                   color + "\" fill-opacity=\"0.35\" stroke=\"" + color + "\"/>\n";
            svg += "<line x1=\"" + svg_coord(cx - box_w / 2) + "\" y1=\"" +
                   svg_coord(y_of(s.quartiles.median)) + "\" x2=\"" + svg_coord(cx + box_w / 2) +
                   "\" y2=\"" + svg_coord(y_of(s.quartiles.median)) + "\" stroke=\"" + color +
                   "\" stroke-width=\"2\"/>\n";
            for (double v : s.outlier_values)
                svg += "<circle cx=\"" + svg_coord(cx) + "\" cy=\"" + svg_coord(y_of(v)) +
                       "\" r=\"2\" fill=\"none\" stroke=\"" + color + "\"/>\n";
        }
    }

    double legend_y = height - 28;
    double legend_x = left;
    for (std::size_t j = 0; j < judges.size(); ++j) {
        const std::string& color = judge_palette()[j % judge_palette().size()];
        svg += "<rect x=\"" + svg_coord(legend_x) + "\" y=\"" + svg_coord(legend_y - 10) +
               "\" width=\"12\" height=\"12\" fill=\"" + color + "\" fill-opacity=\"0.6\"/>\n";
        svg += "<text x=\"" + svg_coord(legend_x + 18) + "\" y=\"" + svg_coord(legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + judges[j] + "</text>\n";
        legend_x += 24 + 8.0 * static_cast<double>(judges[j].size()) + 24;
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace detail

/// Full report: boxplot series, radar vertices (with the low-hallucination
/// transform), the two scatter series, similarity artifacts when provided,
/// a human-readable summary and an SVG overview, all listed in a hashed
/// manifest. Deterministic: identical inputs give byte-identical artifacts.
inline ArtifactManifest emit_report(const std::vector<SampleResult>& results,
                                    const std::vector<SimilarityAggregate>& similarity,
                                    const std::filesystem::path& out_dir) {
    if (results.empty()) throw NoDataError("no results to report on");
    detail::ArtifactWriter writer(out_dir);
    std::vector<std::string> judges = judge_ids(results);
    std::map<std::string, std::size_t> failures = failed_counts(results);

    // Stats per judge in dimension order (entries with no data get count 0).
    std::map<std::string, std::vector<DimensionStats>> stats;
    for (const auto& judge : judges) {
        std::vector<DimensionStats> per_dim;
        for (Dimension dim : all_dimensions()) {
            std::vector<double> values = detail::collect_dimension(results, judge, dim);
            if (values.empty()) {
                DimensionStats empty;
                empty.judge_id = judge;
                empty.dimension = dim;
                per_dim.push_back(std::move(empty));
            } else {
                per_dim.push_back(describe(std::move(values), judge, dim));
            }
        }
        stats[judge] = std::move(per_dim);
    }

    // (a) boxplot series
    std::string boxplot =
        "judge,dimension,count,mean,std,q1,median,q3,whisker_low,whisker_high,outliers\n";
    for (const auto& judge : judges) {
        for (const DimensionStats& s : stats[judge]) {
            if (s.count == 0) continue;
            std::string outliers;
            for (std::size_t i = 0; i < s.outlier_values.size(); ++i) {
                if (i > 0) outliers += ';';
                outliers += detail::csv_number(s.outlier_values[i]);
            }
            boxplot += detail::csv_escape(judge) + "," + dimension_name(s.dimension) + "," +
                       std::to_string(s.count) + "," + detail::csv_number(s.mean) + "," +
                       detail::csv_number(s.std_dev) + "," + detail::csv_number(s.quartiles.q1) + "," +
                       detail::csv_number(s.quartiles.median) + "," + detail::csv_number(s.quartiles.q3) +
                       "," + detail::csv_number(s.whisker_low) + "," + detail::csv_number(s.whisker_high) +
                       "," + detail::csv_escape(outliers) + "\n";
        }
    }
    writer.write_file("boxplot.csv", boxplot);

    // (b) radar vertices; the hallucination axis is flipped so that larger
    // is better everywhere on the chart.
    std::string radar = "judge,axis,value\n";
    for (const auto& judge : judges) {
        for (const DimensionStats& s : stats[judge]) {
            if (s.count == 0) continue;
            if (s.dimension == Dimension::HALLUCINATION_PENALTY) {
                radar += detail::csv_escape(judge) + ",low_hallucination," +
                         detail::csv_number(1.0 - s.mean) + "\n";
            } else {
                radar += detail::csv_escape(judge) + "," + dimension_name(s.dimension) + "," +
                         detail::csv_number(s.mean) + "\n";
            }
        }
    }
    writer.write_file("radar.csv", radar);

    // (c) question vs holistic scatter, with per-judge mean positions
    std::string scatter = "judge,sample_id,question_reward,holistic_reward\n";
    for (const auto& r : results) {
        if (!r.ok() || !r.holistic) continue;
        scatter += detail::csv_escape(r.judge_id) + "," + detail::csv_escape(r.sample_id) + "," +
                   detail::csv_number(r.bundle.question_reward) + "," +
                   detail::csv_number(r.bundle.holistic_reward) + "\n";
    }
    writer.write_file("scatter_question_vs_holistic.csv", scatter);

    std::string scatter_means = "judge,question_reward_mean,holistic_reward_mean\n";
    for (const auto& judge : judges) {
        const DimensionStats& q = stats[judge][0]; // QUESTION_REWARD
        const DimensionStats& h = stats[judge][1]; // HOLISTIC_REWARD
        if (q.count == 0 || h.count == 0) continue;
        scatter_means += detail::csv_escape(judge) + "," + detail::csv_number(q.mean) + "," +
                         detail::csv_number(h.mean) + "\n";
    }
    writer.write_file("scatter_means.csv", scatter_means);

    // (d) hallucination penalty vs final reward scatter
    std::string halluc = "judge,sample_id,hallucination_penalty,final_reward\n";
    for (const auto& r : results) {
        if (!r.ok() || !r.holistic) continue;
        halluc += detail::csv_escape(r.judge_id) + "," + detail::csv_escape(r.sample_id) + "," +
                  detail::csv_number(r.holistic->hallucination_penalty) + "," +
                  detail::csv_number(r.bundle.final_reward) + "\n";
    }
    writer.write_file("scatter_penalty_vs_final.csv", halluc);

    // (e) similarity artifacts when available
    if (!similarity.empty()) {
        std::string heatmap = "pair,polarity,mean,sample_count,skipped_samples\n";
        for (const auto& agg : similarity)
            heatmap += detail::csv_escape(agg.model_pair.label()) + "," + polarity_name(agg.polarity) +
                       "," + detail::csv_number(agg.mean) + "," + std::to_string(agg.sample_count) + "," +
                       std::to_string(agg.skipped_samples) + "\n";
        writer.write_file("similarity_heatmap.csv", heatmap);

        std::string violin = "pair,polarity,sample_id,similarity\n";
        for (const auto& agg : similarity)
            for (const auto& rec : agg.records)
                violin += detail::csv_escape(agg.model_pair.label()) + "," + polarity_name(agg.polarity) +
                          "," + detail::csv_escape(rec.sample_id) + "," +
                          detail::csv_number(rec.symmetric_similarity) + "\n";
        writer.write_file("similarity_violin.csv", violin);
    } else {
        writer.note("similarity artifacts omitted: no similarity input supplied");
    }

    // (f) human-readable summary
    std::string summary;
    summary += "Evaluation summary\n";
    summary += "==================\n";
    summary += "Standard deviations use the sample (n-1) convention.\n";
    summary += "Percentages are fraction*100, rounded half-even to 2 decimals.\n\n";
    for (const auto& judge : judges) {
        std::size_t failed = failures.count(judge) ? failures[judge] : 0;
        std::size_t ok = 0;
        for (const auto& r : results)
            if (r.ok() && r.judge_id == judge) ++ok;
        summary += "Judge: " + judge + "\n";
        summary += "  OK results: " + std::to_string(ok) + "   FAILED (excluded): " +
                   std::to_string(failed) + "\n";
        for (const DimensionStats& s : stats[judge]) {
            if (s.count == 0) continue;
            summary += "  " + std::string(dimension_name(s.dimension)) + ": " + format_percent(s.mean) +
                       "% (+- " + format_percent(s.std_dev) + "%)\n";
        }
        // Clipped holistic means are reported above; the raw (unclipped) mean
        // is given alongside for comparison.
        double raw_sum = 0.0;
        std::size_t raw_n = 0;
        for (const auto& r : results) {
            if (!r.ok() || r.judge_id != judge || !r.holistic) continue;
            raw_sum += r.bundle.holistic_raw;
            ++raw_n;
        }
        if (raw_n > 0)
            summary += "  holistic_raw mean (unclipped): " + format_score(raw_sum / raw_n) + "\n";
        try {
            BiasReport b = bias_report(results, judge);
            summary += "  negative:positive bias ratio: " + format_fixed(b.ratio, 2) + " (negative " +
                       format_percent(b.negative_mean) + "%, positive " + format_percent(b.positive_mean) +
                       "%)\n";
        } catch (const std::exception&) {
            summary += "  negative:positive bias ratio: undefined\n";
        }
        try {
            MethodCorrelation c = method_correlation(results, judge);
            summary += "  question vs holistic Pearson r: " +
                       (c.degenerate ? std::string("undefined (degenerate variance)")
                                     : format_fixed(c.r, 3)) +
                       "\n";
        } catch (const std::exception&) {
            summary += "  question vs holistic Pearson r: unavailable\n";
        }
        summary += "\n";
    }
    writer.write_file("summary.txt", summary);

    // (g) SVG overview
    writer.write_file("report.svg", detail::render_boxplot_svg(judges, stats));

    return writer.finish();
}

} // namespace descjudge
