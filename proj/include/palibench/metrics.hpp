// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "palibench/bleu.hpp"
#include "palibench/digest.hpp"
#include "palibench/errors.hpp"
#include "palibench/geometry.hpp"
#include "palibench/utf8.hpp"

namespace palibench {

/// Machine length divided by mean reference length, in characters.
inline double length_ratio(std::string_view machine, const std::vector<std::string>& references) {
    if (references.empty()) throw ValidationError("length_ratio needs references");
    double sum = 0;
    for (const auto& ref : references) sum += static_cast<double>(utf8::char_count(ref));
    double mean = sum / static_cast<double>(references.size());
    if (mean <= 0.0) throw ValidationError("zero-mean-reference-length");
    return static_cast<double>(utf8::char_count(machine)) / mean;
}

// Source-aware quality scorer, one (source, hypothesis, reference) triple at
// a time, scores in [0,1]. The neural model behind it is out of process; an
// HTTP client and test mocks implement this interface.
class ExternalScorer {
  public:
    virtual ~ExternalScorer() = default;
    virtual std::string id() const = 0;

    struct Triple {
        std::string source;
        std::string hypothesis;
        std::string reference;
    };
    virtual std::vector<double> score_batch(const std::vector<Triple>& triples) = 0;
};

class ConstantScorer : public ExternalScorer {
  public:
    explicit ConstantScorer(double value) : value_(value) {}
    std::string id() const override { return "constant"; }
    std::vector<double> score_batch(const std::vector<Triple>& triples) override {
        return std::vector<double>(triples.size(), value_);
    }

  private:
    double value_;
};

// Append-only disk cache keyed by the content digest of (scorer id, source,
// hypothesis, reference).
class ScoreCache {
  public:
    explicit ScoreCache(const std::string& path) : path_(path) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::string digest;
            double value;
            if (ss >> digest >> value) entries_[digest] = value;
        }
    }

    static std::string key(const std::string& scorer_id, const ExternalScorer::Triple& t) {
        std::string blob = scorer_id;
        blob.push_back('\x1e');
        blob += t.source;
        blob.push_back('\x1e');
        blob += t.hypothesis;
        blob.push_back('\x1e');
        blob += t.reference;
        return sha256_hex(blob);
    }

    std::optional<double> find(const std::string& digest) const {
        auto it = entries_.find(digest);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const std::string& digest, double value) {
        entries_[digest] = value;
        std::ofstream out(path_, std::ios::app);
        out.precision(17);
        out << digest << ' ' << value << '\n';
    }

  private:
    std::string path_;
    std::map<std::string, double> entries_;
};

struct ExternalScores {
    std::map<std::string, double> per_reference; // translator -> score
    double avg = 0.0;
    double best = 0.0;
};

/// One score per reference translator, plus their mean and max. Cached
/// lookups never touch the scorer.
inline ExternalScores external_quality_scores(const std::string& source,
                                              const std::string& hypothesis,
                                              const std::map<std::string, std::string>& references,
                                              ExternalScorer& scorer,
                                              ScoreCache* cache = nullptr) {
    if (references.empty()) throw ValidationError("external scoring needs references");
    ExternalScores out;
    std::vector<ExternalScorer::Triple> missing;
    std::vector<std::string> missing_names;
    for (const auto& [name, ref] : references) {
        ExternalScorer::Triple triple{source, hypothesis, ref};
        if (cache != nullptr) {
            if (auto hit = cache->find(ScoreCache::key(scorer.id(), triple))) {
                out.per_reference[name] = *hit;
                continue;
            }
        }
        missing_names.push_back(name);
        missing.push_back(std::move(triple));
    }
    if (!missing.empty()) {
        std::vector<double> scores = scorer.score_batch(missing);
        if (scores.size() != missing.size())
            throw ClientError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                              std::to_string(missing.size()) + " triples");
        for (std::size_t i = 0; i < missing.size(); ++i) {
            if (scores[i] < 0.0 || scores[i] > 1.0)
                throw ClientError("scorer value out of [0,1]: " + std::to_string(scores[i]));
            out.per_reference[missing_names[i]] = scores[i];
            if (cache != nullptr) cache->put(ScoreCache::key(scorer.id(), missing[i]), scores[i]);
        }
    }
    bool first = true;
    double sum = 0;
    for (const auto& [name, v] : out.per_reference) {
        sum += v;
        out.best = first ? v : std::max(out.best, v);
        first = false;
    }
    out.avg = sum / static_cast<double>(out.per_reference.size());
    return out;
}

// Everything measured for one (system, passage) pair.
struct PassageScores {
    std::string passage;
    double sim_best = 0.0;
    double sim_centroid = 0.0;
    double normalized_drift = 0.0;
    bool outlier = false;
    std::string closest;
    bool degenerate_geometry = false;
    double length_ratio = 0.0;
    double chrfpp = 0.0;
    BleuStats bleu;
    std::optional<ExternalScores> external;
};

} // namespace palibench
