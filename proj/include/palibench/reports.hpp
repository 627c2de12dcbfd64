// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "palibench/bench.hpp"
#include "palibench/curation.hpp"
#include "palibench/errors.hpp"
#include "palibench/verifier.hpp"

namespace palibench {

namespace detail {

inline std::string fmt(const char* spec, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, value);
    return buf;
}

// Fixed-width text table with left-aligned first column and right-aligned
// numeric columns; output is byte-deterministic for fixed inputs.
class TextTable {
  public:
    explicit TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}

    void add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string render() const {
        std::vector<std::size_t> widths(headers_.size());
        for (std::size_t c = 0; c < headers_.size(); ++c) widths[c] = headers_[c].size();
        for (const auto& row : rows_)
            for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c)
                widths[c] = std::max(widths[c], row[c].size());
        std::string out;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < widths.size(); ++c) {
                std::string cell = c < row.size() ? row[c] : "";
                if (c == 0) {
                    out += cell;
                    out.append(widths[c] - cell.size(), ' ');
                } else {
                    out.append(widths[c] - cell.size(), ' ');
                    out += cell;
                }
                out += c + 1 == widths.size() ? "" : "  ";
            }
            out += '\n';
        };
        emit(headers_);
        std::size_t total = 0;
        for (std::size_t c = 0; c < widths.size(); ++c)
            total += widths[c] + (c + 1 == widths.size() ? 0 : 2);
        out.append(total, '-');
        out += '\n';
        for (const auto& row : rows_) emit(row);
        return out;
    }

  private:
    std::vector<std::string> headers_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("io-error: cannot write " + path);
    out << content;
    if (!out) throw IoError("io-error: write failed: " + path);
}

} // namespace detail

struct TranslatorPairStats {
    std::string a;
    std::string b;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Pairwise per-passage cosine similarity between reference translators,
// aggregated corpus-wide. Rows sort by mean descending.
inline std::vector<TranslatorPairStats> reference_similarity_stats(const AlignedCorpus& benchmark,
                                                                   Embedder& embedder) {
    std::vector<std::string> names;
    for (const auto& t : benchmark.translators) names.push_back(t.name);
    std::sort(names.begin(), names.end());
    std::map<std::pair<std::string, std::string>, std::vector<double>> sims;
    for (const auto& passage : benchmark.passages) {
        std::map<std::string, EmbeddingVector> vecs;
        for (const auto& name : names)
            vecs[name] = embedder.embed_one(passage_translation_text(passage, name));
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j)
                sims[{names[i], names[j]}].push_back(cosine(vecs[names[i]], vecs[names[j]]));
    }
    std::vector<TranslatorPairStats> out;
    for (const auto& [pair, values] : sims) {
        TranslatorPairStats stats;
        stats.a = pair.first;
        stats.b = pair.second;
        double sum = 0;
        stats.min = values.front();
        stats.max = values.front();
        for (double v : values) {
            sum += v;
            stats.min = std::min(stats.min, v);
            stats.max = std::max(stats.max, v);
        }
        stats.mean = sum / static_cast<double>(values.size());
        double var = 0;
        for (double v : values) var += (v - stats.mean) * (v - stats.mean);
        stats.stddev = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1))
                                         : 0.0;
        out.push_back(stats);
    }
    std::sort(out.begin(), out.end(), [](const TranslatorPairStats& x, const TranslatorPairStats& y) {
        if (x.mean != y.mean) return x.mean > y.mean;
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

struct ReportBundle {
    std::vector<SystemRow> ranked_rows; // from rank_systems (ordered by sim_best)
    std::map<std::string, std::vector<PassageScores>> per_passage; // system -> scores
    std::vector<TranslatorPairStats> reference_similarity;
    std::vector<std::string> translators; // alphabetical
};

inline void emit_reports(const ReportBundle& bundle, const std::string& dir) {
    using detail::fmt;

    { // inter-translator similarity
        detail::TextTable table({"Translator pair", "Mean", "Std", "Min", "Max"});
        std::string tsv = "translator_a\ttranslator_b\tmean\tstd\tmin\tmax\n";
        for (const auto& s : bundle.reference_similarity) {
            table.add_row({s.a + " <-> " + s.b, fmt("%.3f", s.mean), fmt("%.3f", s.stddev),
                           fmt("%.3f", s.min), fmt("%.3f", s.max)});
            tsv += s.a + "\t" + s.b + "\t" + fmt("%.6f", s.mean) + "\t" + fmt("%.6f", s.stddev) +
                   "\t" + fmt("%.6f", s.min) + "\t" + fmt("%.6f", s.max) + "\n";
        }
        detail::write_file(dir + "/reference_similarity.txt", table.render());
        detail::write_file(dir + "/reference_similarity.tsv", tsv);
    }

    { // primary results, ranked by sim_best
        detail::TextTable table({"Rank", "System", "sim_best", "chrF++", "BLEU", "COMET_avg",
                                 "Length", "Outliers"});
        std::string tsv =
            "rank\tsystem\tsim_best\tchrfpp_mean\tchrfpp_pooled\tbleu\texternal_avg\t"
            "external_best\tlength_ratio\toutlier_pct\tcoverage\n";
        int rank = 1;
        for (const auto& row : bundle.ranked_rows) {
            table.add_row({std::to_string(rank), row.system, fmt("%.3f", row.sim_best),
                           fmt("%.1f", row.chrfpp), fmt("%.1f", row.bleu),
                           row.external_valid ? fmt("%.3f", row.external_avg) : "-",
                           fmt("%.3f", row.length_ratio), fmt("%.1f", row.outlier_pct) + "%"});
            tsv += std::to_string(rank) + "\t" + row.system + "\t" + fmt("%.6f", row.sim_best) +
                   "\t" + fmt("%.4f", row.chrfpp) + "\t" + fmt("%.4f", row.chrfpp_pooled) + "\t" +
                   fmt("%.4f", row.bleu) + "\t" +
                   (row.external_valid ? fmt("%.6f", row.external_avg) : "-") + "\t" +
                   (row.external_valid ? fmt("%.6f", row.external_best) : "-") + "\t" +
                   fmt("%.6f", row.length_ratio) + "\t" + fmt("%.4f", row.outlier_pct) + "\t" +
                   fmt("%.4f", row.coverage) + "\n";
            ++rank;
        }
        detail::write_file(dir + "/results.txt", table.render());
        detail::write_file(dir + "/results.tsv", tsv);

        nlohmann::ordered_json doc;
        nlohmann::ordered_json meta;
        meta["bleu_tokenizer"] = std::string(kBleuTokenizerId);
        doc["meta"] = meta;
        nlohmann::ordered_json systems = nlohmann::ordered_json::array();
        for (const auto& row : bundle.ranked_rows) {
            nlohmann::ordered_json r;
            r["system"] = row.system;
            r["sim_best"] = row.sim_best;
            r["chrfpp_mean"] = row.chrfpp;
            r["chrfpp_pooled"] = row.chrfpp_pooled;
            r["bleu"] = row.bleu;
            if (row.external_valid) {
                r["external_avg"] = row.external_avg;
                r["external_best"] = row.external_best;
            } else {
                r["external_avg"] = nullptr;
                r["external_best"] = nullptr;
            }
            r["length_ratio"] = row.length_ratio;
            r["outlier_pct"] = row.outlier_pct;
            r["coverage"] = row.coverage;
            nlohmann::ordered_json ranks;
            for (const auto& [dim, rk] : row.ranks) ranks[dim] = rk;
            r["ranks"] = ranks;
            r["mean_rank"] = row.mean_rank;
            nlohmann::ordered_json closest;
            for (const auto& [name, pct] : row.closest_pct) closest[name] = pct;
            r["closest_pct"] = closest;
            systems.push_back(std::move(r));
        }
        doc["systems"] = std::move(systems);
        detail::write_file(dir + "/results.json", doc.dump(2) + "\n");
    }

    { // closest-translator distribution, sorted by the first column descending
        std::vector<std::string> headers = {"System"};
        for (const auto& t : bundle.translators) headers.push_back(t);
        detail::TextTable table(headers);
        auto rows = bundle.ranked_rows;
        if (!bundle.translators.empty()) {
            const std::string& first = bundle.translators.front();
            std::sort(rows.begin(), rows.end(), [&](const SystemRow& a, const SystemRow& b) {
                double pa = a.closest_pct.count(first) ? a.closest_pct.at(first) : 0.0;
                double pb = b.closest_pct.count(first) ? b.closest_pct.at(first) : 0.0;
                if (pa != pb) return pa > pb;
                return a.system < b.system;
            });
        }
        std::string tsv = "system";
        for (const auto& t : bundle.translators) tsv += "\t" + t;
        tsv += "\n";
        for (const auto& row : rows) {
            std::vector<std::string> cells = {row.system};
            tsv += row.system;
            for (const auto& t : bundle.translators) {
                double pct = row.closest_pct.count(t) ? row.closest_pct.at(t) : 0.0;
                cells.push_back(fmt("%.1f", pct) + "%");
                tsv += "\t" + fmt("%.4f", pct);
            }
            tsv += "\n";
            table.add_row(std::move(cells));
        }
        detail::write_file(dir + "/closest_translators.txt", table.render());
        detail::write_file(dir + "/closest_translators.tsv", tsv);
    }

    { // cross-metric rankings, sorted by mean rank
        detail::TextTable table({"System", "sim_best", "chrF++", "BLEU", "COMET_avg", "Length",
                                 "Outliers", "Mean"});
        auto rows = bundle.ranked_rows;
        std::sort(rows.begin(), rows.end(), [](const SystemRow& a, const SystemRow& b) {
            if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
            int ra = a.ranks.count("sim_best") ? a.ranks.at("sim_best") : 0;
            int rb = b.ranks.count("sim_best") ? b.ranks.at("sim_best") : 0;
            return ra < rb;
        });
        std::string tsv = "system\tsim_best\tchrfpp\tbleu\texternal\tlength\toutliers\tmean_rank\n";
        for (const auto& row : rows) {
            auto rank_cell = [&](const char* dim) -> std::string {
                auto it = row.ranks.find(dim);
                return it == row.ranks.end() ? "-" : std::to_string(it->second);
            };
            std::string mean_txt = row.ranks.empty() ? "-" : fmt("%.1f", row.mean_rank);
            std::string mean_tsv = row.ranks.empty() ? "-" : fmt("%.2f", row.mean_rank);
            table.add_row({row.system, rank_cell("sim_best"), rank_cell("chrfpp"),
                           rank_cell("bleu"), rank_cell("external"), rank_cell("length"),
                           rank_cell("outliers"), mean_txt});
            tsv += row.system + "\t" + rank_cell("sim_best") + "\t" + rank_cell("chrfpp") + "\t" +
                   rank_cell("bleu") + "\t" + rank_cell("external") + "\t" + rank_cell("length") +
                   "\t" + rank_cell("outliers") + "\t" + mean_tsv + "\n";
        }
        detail::write_file(dir + "/rankings.txt", table.render());
        detail::write_file(dir + "/rankings.tsv", tsv);
    }

    // per-passage dumps
    for (const auto& [system, passages] : bundle.per_passage) {
        std::string tsv =
            "passage\tsim_best\tsim_centroid\tnormalized_drift\toutlier\tclosest\t"
            "length_ratio\tchrfpp\texternal_avg\texternal_best\n";
        for (const auto& ps : passages) {
            tsv += ps.passage + "\t" + fmt("%.6f", ps.sim_best) + "\t" +
                   fmt("%.6f", ps.sim_centroid) + "\t" + fmt("%.6f", ps.normalized_drift) + "\t" +
                   (ps.outlier ? "1" : "0") + "\t" + ps.closest + "\t" +
                   fmt("%.6f", ps.length_ratio) + "\t" + fmt("%.4f", ps.chrfpp) + "\t" +
                   (ps.external ? fmt("%.6f", ps.external->avg) : "-") + "\t" +
                   (ps.external ? fmt("%.6f", ps.external->best) : "-") + "\n";
        }
        detail::write_file(dir + "/passages_" + system + ".tsv", tsv);
    }
}

// Verification report writers: one JSONL record per (segment, translator)
// plus an aligned stats table over non-null segments.
inline void write_verification_report(const std::vector<VerificationRecord>& records,
                                      const VerificationStats& stats, const std::string& dir) {
    std::string jsonl;
    for (const auto& rec : records) {
        nlohmann::ordered_json r;
        r["segment"] = rec.segment.raw();
        r["translator"] = rec.translator;
        r["category"] = to_string(rec.category);
        if (rec.evidence.has_value())
            r["evidence"] = rec.evidence->to_text();
        else
            r["evidence"] = nullptr;
        jsonl += r.dump() + "\n";
    }
    detail::write_file(dir + "/verification.jsonl", jsonl);

    std::vector<std::string> names;
    for (const auto& [name, s] : stats.per_translator) names.push_back(name);
    std::vector<std::string> headers = {"Category"};
    for (const auto& n : names) headers.push_back(n);
    detail::TextTable table(headers);
    std::string tsv = "category";
    for (const auto& n : names) tsv += "\t" + n;
    tsv += "\n";
    const VerificationCategory cats[] = {
        VerificationCategory::Verbatim, VerificationCategory::Normalized,
        VerificationCategory::Expanded, VerificationCategory::CrossReference,
        VerificationCategory::Suspicious};
    for (auto c : cats) {
        std::vector<std::string> cells = {to_string(c)};
        tsv += to_string(c);
        for (const auto& n : names) {
            double pct = stats.per_translator.at(n).percent(c);
            cells.push_back(detail::fmt("%.1f", pct) + "%");
            tsv += "\t" + detail::fmt("%.4f", pct);
        }
        tsv += "\n";
        table.add_row(std::move(cells));
    }
    detail::write_file(dir + "/verification_stats.txt", table.render());
    detail::write_file(dir + "/verification_stats.tsv", tsv);
}

// Curation report writers: machine-readable rows plus a staged table in the
// shape of the published filtering/dedup summary, thresholds echoed on top.
inline void write_curation_report(const CurationReport& report, const std::string& dir) {
    {
        nlohmann::ordered_json doc;
        doc["starting_passages"] = report.starting_passages;
        nlohmann::ordered_json thresholds;
        thresholds["min_chars"] = report.thresholds.min_chars;
        thresholds["max_pair_jaccard"] = report.thresholds.max_pair_jaccard;
        thresholds["max_length_ratio"] = report.thresholds.max_length_ratio;
        thresholds["dedup_jaccard"] = report.thresholds.dedup_jaccard;
        thresholds["ngram_order"] = report.thresholds.ngram_order;
        thresholds["min_dup_chars"] = report.thresholds.min_dup_chars;
        doc["thresholds"] = thresholds;
        nlohmann::ordered_json prov;
        for (const auto& [k, v] : report.provenance) prov[k] = v;
        doc["provenance"] = prov;
        nlohmann::ordered_json counts;
        for (const auto& [criterion, count] : report.criterion_counts)
            counts[to_string(criterion)] = count;
        doc["criterion_counts"] = counts;
        doc["retained_after_filter"] = report.retained_after_filter.size();
        nlohmann::ordered_json removals = nlohmann::ordered_json::array();
        for (const auto& r : report.removed_by_dedup) {
            nlohmann::ordered_json rec;
            rec["removed"] = r.removed.raw;
            rec["kept"] = r.kept.raw;
            rec["similarity"] = r.similarity;
            removals.push_back(std::move(rec));
        }
        doc["removed_by_dedup"] = removals;
        nlohmann::ordered_json finals = nlohmann::ordered_json::array();
        for (const auto& p : report.final_passages) finals.push_back(p.raw);
        doc["final_passages"] = finals;
        detail::write_file(dir + "/curation.json", doc.dump(2) + "\n");
    }
    {
        char header[256];
        std::snprintf(header, sizeof(header),
                      "thresholds: min_chars=%zu max_pair_jaccard=%.2f max_length_ratio=%.2f "
                      "dedup_jaccard=%.2f ngram_order=%d min_dup_chars=%zu\n\n",
                      report.thresholds.min_chars, report.thresholds.max_pair_jaccard,
                      report.thresholds.max_length_ratio, report.thresholds.dedup_jaccard,
                      report.thresholds.ngram_order, report.thresholds.min_dup_chars);
        detail::TextTable table({"Stage", "Passages affected", "Passages remaining"});
        table.add_row({"Starting corpus", "-", std::to_string(report.starting_passages)});
        for (auto c : all_filter_criteria()) {
            auto it = report.criterion_counts.find(c);
            std::size_t count = it == report.criterion_counts.end() ? 0 : it->second;
            table.add_row({to_string(c), std::to_string(count), "-"});
        }
        table.add_row({"After filtering", "-", std::to_string(report.retained_after_filter.size())});
        table.add_row({"Near-duplicate passages", std::to_string(report.removed_by_dedup.size()),
                       "-"});
        table.add_row({"Final benchmark dataset", "-", std::to_string(report.final_passages.size())});
        detail::write_file(dir + "/curation.txt", std::string(header) + table.render());
    }
}

} // namespace palibench
