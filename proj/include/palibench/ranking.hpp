// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "palibench/errors.hpp"

namespace palibench {

// One row of the cross-system comparison: the six ranked dimensions plus
// closest-translator shares. external_valid marks whether the neural-scorer
// column may enter the ranks.
struct SystemRow {
    std::string system;
    double sim_best = 0.0;
    double chrfpp = 0.0;        // mean of per-passage scores; the ranked value
    double chrfpp_pooled = 0.0; // corpus-pooled statistics variant, reported alongside
    double bleu = 0.0;
    double external_avg = 0.0;
    bool external_valid = false;
    double external_best = 0.0;
    double length_ratio = 0.0;
    double outlier_pct = 0.0;
    double coverage = 1.0;
    std::map<std::string, double> closest_pct;

    // filled by rank_systems
    std::map<std::string, int> ranks;
    double mean_rank = 0.0;
};

inline const std::vector<std::string>& rank_dimensions() {
    static const std::vector<std::string> dims = {"sim_best", "chrfpp",  "bleu",
                                                  "external", "length",  "outliers"};
    return dims;
}

// Ranks every valid dimension (1 = best) and averages each system's ranks
// over its valid dimensions. Directions: sim_best/chrF++/BLEU/external
// higher is better, length by |ratio - 1| smaller is better, outliers lower
// is better. Ties order by sim_best rank, then system id. Returned rows are
// ordered by sim_best.
inline std::vector<SystemRow> rank_systems(std::vector<SystemRow> rows) {
    if (rows.size() < 2) throw ValidationError("rank_systems needs at least 2 systems");
    for (const auto& row : rows) {
        if (!std::isfinite(row.sim_best) || !std::isfinite(row.chrfpp) ||
            !std::isfinite(row.bleu) || !std::isfinite(row.length_ratio) ||
            !std::isfinite(row.outlier_pct))
            throw ValidationError("no-valid-dimensions: non-finite metric for " + row.system);
    }

    // sim_best ranks first; they break ties everywhere else
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a].sim_best != rows[b].sim_best) return rows[a].sim_best > rows[b].sim_best;
        return rows[a].system < rows[b].system;
    });
    std::vector<int> sim_rank(rows.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        sim_rank[order[pos]] = static_cast<int>(pos) + 1;
        rows[order[pos]].ranks["sim_best"] = static_cast<int>(pos) + 1;
    }

    auto rank_dimension = [&](const std::string& dim, auto key, bool lower_better) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (dim != "external" || rows[i].external_valid) idx.push_back(i);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            double ka = key(rows[a]), kb = key(rows[b]);
            if (ka != kb) return lower_better ? ka < kb : ka > kb;
            if (sim_rank[a] != sim_rank[b]) return sim_rank[a] < sim_rank[b];
            return rows[a].system < rows[b].system;
        });
        for (std::size_t pos = 0; pos < idx.size(); ++pos)
            rows[idx[pos]].ranks[dim] = static_cast<int>(pos) + 1;
    };

    rank_dimension("chrfpp", [](const SystemRow& r) { return r.chrfpp; }, false);
    rank_dimension("bleu", [](const SystemRow& r) { return r.bleu; }, false);
    rank_dimension("external", [](const SystemRow& r) { return r.external_avg; }, false);
    rank_dimension("length", [](const SystemRow& r) { return std::abs(r.length_ratio - 1.0); },
                   true);
    rank_dimension("outliers", [](const SystemRow& r) { return r.outlier_pct; }, true);

    for (auto& row : rows) {
        if (row.ranks.empty()) throw ValidationError("no-valid-dimensions for " + row.system);
        double sum = 0;
        for (const auto& [dim, rank] : row.ranks) sum += rank;
        row.mean_rank = sum / static_cast<double>(row.ranks.size());
    }

    std::sort(rows.begin(), rows.end(), [](const SystemRow& a, const SystemRow& b) {
        if (a.sim_best != b.sim_best) return a.sim_best > b.sim_best;
        return a.system < b.system;
    });
    return rows;
}

} // namespace palibench
