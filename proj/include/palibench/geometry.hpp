// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "palibench/embedding.hpp"
#include "palibench/errors.hpp"

namespace palibench {

inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim())
        throw ValidationError("dimension-mismatch: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) throw ValidationError("zero-vector in cosine");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct OutlierThreshold {
    double value = 2.0;

    void validate() const {
        if (!(value > 1.0)) throw ValidationError("outlier threshold must exceed 1.0");
    }
};

// Per-passage geometry of the human references: unit-normalized reference
// vectors, their arithmetic-mean centroid, each translator's drift from it
// (1 - cosine), and the mean drift that normalizes machine drift. Reference
// vectors are scaled to unit length up front so the geometry depends only on
// directions, never on provider scaling.
struct ReferenceGeometry {
    std::vector<std::string> translators; // sorted by name
    std::vector<EmbeddingVector> references;
    EmbeddingVector centroid;
    std::vector<double> drifts;
    double mean_drift = 0.0;
    bool degenerate = false; // mean drift below epsilon: references coincide

    static constexpr double kDegenerateEps = 1e-9;
};

inline EmbeddingVector unit_normalized(const EmbeddingVector& v) {
    v.validate();
    double n = v.norm();
    EmbeddingVector out;
    out.values.reserve(v.dim());
    for (double x : v.values) out.values.push_back(x / n);
    return out;
}

inline ReferenceGeometry reference_geometry(
    const std::map<std::string, EmbeddingVector>& references) {
    if (references.size() < 2)
        throw ValidationError("reference geometry needs at least 2 references");
    ReferenceGeometry geo;
    std::size_t dim = references.begin()->second.dim();
    for (const auto& [name, vec] : references) {
        if (vec.dim() != dim) throw ValidationError("dimension-mismatch among references");
        geo.translators.push_back(name);
        geo.references.push_back(unit_normalized(vec));
    }
    geo.centroid.values.assign(dim, 0.0);
    for (const auto& ref : geo.references)
        for (std::size_t i = 0; i < dim; ++i) geo.centroid.values[i] += ref.values[i];
    for (double& v : geo.centroid.values) v /= static_cast<double>(geo.references.size());
    if (geo.centroid.norm() == 0.0)
        throw ValidationError("degenerate-centroid: reference vectors cancel out");

    double sum = 0;
    for (const auto& ref : geo.references) {
        double d = 1.0 - cosine(ref, geo.centroid);
        geo.drifts.push_back(d);
        sum += d;
    }
    geo.mean_drift = sum / static_cast<double>(geo.drifts.size());
    geo.degenerate = geo.mean_drift < ReferenceGeometry::kDegenerateEps;
    return geo;
}

struct EmbeddingScores {
    double sim_best = 0.0;
    double sim_centroid = 0.0;
    double normalized_drift = 0.0;
    bool outlier = false;
    std::string closest;
    bool degenerate_geometry = false;
};

// With degenerate geometry (all references identical) the drift denominator
// vanishes; a machine translation sitting on the shared direction scores
// drift 0, anything else gets the +infinity sentinel and the flag.
inline EmbeddingScores passage_embedding_scores(const EmbeddingVector& machine,
                                                const ReferenceGeometry& geo,
                                                const OutlierThreshold& threshold = {}) {
    threshold.validate();
    EmbeddingScores scores;
    EmbeddingVector mt = unit_normalized(machine);
    if (mt.dim() != geo.centroid.dim())
        throw ValidationError("dimension-mismatch between machine vector and geometry");

    double best = -2.0;
    for (std::size_t i = 0; i < geo.references.size(); ++i) {
        double sim = cosine(mt, geo.references[i]);
        if (sim > best) {
            best = sim;
            scores.closest = geo.translators[i]; // ties keep the alphabetically first
        }
    }
    scores.sim_best = best;
    scores.sim_centroid = cosine(mt, geo.centroid);

    if (geo.degenerate) {
        scores.degenerate_geometry = true;
        double dist = 1.0 - scores.sim_centroid;
        if (dist <= ReferenceGeometry::kDegenerateEps) {
            scores.normalized_drift = 0.0;
            scores.outlier = false;
        } else {
            scores.normalized_drift = std::numeric_limits<double>::infinity();
            scores.outlier = true;
        }
        return scores;
    }
    scores.normalized_drift = (1.0 - scores.sim_centroid) / geo.mean_drift;
    scores.outlier = scores.normalized_drift > threshold.value;
    return scores;
}

} // namespace palibench
