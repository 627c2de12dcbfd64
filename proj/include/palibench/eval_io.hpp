// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "palibench/bench.hpp"
#include "palibench/errors.hpp"

namespace palibench {

// Evaluation results persist as one JSON document per system so that
// `report` is a pure post-pass over files.

inline void save_evaluation(const SystemEvaluation& eval, const std::string& path) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json row;
    row["system"] = eval.row.system;
    row["sim_best"] = eval.row.sim_best;
    row["chrfpp"] = eval.row.chrfpp;
    row["chrfpp_pooled"] = eval.row.chrfpp_pooled;
    row["bleu"] = eval.row.bleu;
    row["external_valid"] = eval.row.external_valid;
    row["external_avg"] = eval.row.external_avg;
    row["external_best"] = eval.row.external_best;
    row["length_ratio"] = eval.row.length_ratio;
    row["outlier_pct"] = eval.row.outlier_pct;
    row["coverage"] = eval.row.coverage;
    nlohmann::ordered_json closest;
    for (const auto& [name, pct] : eval.row.closest_pct) closest[name] = pct;
    row["closest_pct"] = closest;
    doc["row"] = row;

    nlohmann::ordered_json passages = nlohmann::ordered_json::array();
    for (const auto& ps : eval.passages) {
        nlohmann::ordered_json p;
        p["passage"] = ps.passage;
        p["sim_best"] = ps.sim_best;
        p["sim_centroid"] = ps.sim_centroid;
        p["normalized_drift"] = std::isfinite(ps.normalized_drift)
                                    ? nlohmann::ordered_json(ps.normalized_drift)
                                    : nlohmann::ordered_json("inf");
        p["outlier"] = ps.outlier;
        p["closest"] = ps.closest;
        p["degenerate_geometry"] = ps.degenerate_geometry;
        p["length_ratio"] = ps.length_ratio;
        p["chrfpp"] = ps.chrfpp;
        if (ps.external.has_value()) {
            nlohmann::ordered_json ext;
            nlohmann::ordered_json per;
            for (const auto& [name, v] : ps.external->per_reference) per[name] = v;
            ext["per_reference"] = per;
            ext["avg"] = ps.external->avg;
            ext["best"] = ps.external->best;
            p["external"] = ext;
        } else {
            p["external"] = nullptr;
        }
        passages.push_back(std::move(p));
    }
    doc["passages"] = passages;

    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("io-error: cannot write evaluation: " + path);
    out << doc.dump(2) << '\n';
}

inline SystemEvaluation load_evaluation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("io-error: cannot open evaluation: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("evaluation file " + path + ": " + e.what());
    }
    SystemEvaluation eval;
    const auto& row = doc.at("row");
    eval.row.system = row.at("system").get<std::string>();
    eval.row.sim_best = row.at("sim_best").get<double>();
    eval.row.chrfpp = row.at("chrfpp").get<double>();
    eval.row.chrfpp_pooled = row.at("chrfpp_pooled").get<double>();
    eval.row.bleu = row.at("bleu").get<double>();
    eval.row.external_valid = row.at("external_valid").get<bool>();
    eval.row.external_avg = row.at("external_avg").get<double>();
    eval.row.external_best = row.at("external_best").get<double>();
    eval.row.length_ratio = row.at("length_ratio").get<double>();
    eval.row.outlier_pct = row.at("outlier_pct").get<double>();
    eval.row.coverage = row.at("coverage").get<double>();
    for (auto it = row.at("closest_pct").begin(); it != row.at("closest_pct").end(); ++it)
        eval.row.closest_pct[it.key()] = it.value().get<double>();

    for (const auto& p : doc.at("passages")) {
        PassageScores ps;
        ps.passage = p.at("passage").get<std::string>();
        ps.sim_best = p.at("sim_best").get<double>();
        ps.sim_centroid = p.at("sim_centroid").get<double>();
        if (p.at("normalized_drift").is_string())
            ps.normalized_drift = std::numeric_limits<double>::infinity();
        else
            ps.normalized_drift = p.at("normalized_drift").get<double>();
        ps.outlier = p.at("outlier").get<bool>();
        ps.closest = p.at("closest").get<std::string>();
        ps.degenerate_geometry = p.at("degenerate_geometry").get<bool>();
        ps.length_ratio = p.at("length_ratio").get<double>();
        ps.chrfpp = p.at("chrfpp").get<double>();
        if (!p.at("external").is_null()) {
            ExternalScores ext;
            for (auto it = p.at("external").at("per_reference").begin();
                 it != p.at("external").at("per_reference").end(); ++it)
                ext.per_reference[it.key()] = it.value().get<double>();
            ext.avg = p.at("external").at("avg").get<double>();
            ext.best = p.at("external").at("best").get<double>();
            ps.external = std::move(ext);
        }
        eval.passages.push_back(std::move(ps));
    }
    return eval;
}

inline std::string sanitize_for_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '.' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

} // namespace palibench
