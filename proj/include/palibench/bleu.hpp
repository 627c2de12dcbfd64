// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "palibench/errors.hpp"
#include "palibench/normalize.hpp"

namespace palibench {

inline constexpr int kBleuMaxOrder = 4;

// Sufficient statistics for corpus BLEU: per-order clipped matches and
// candidate counts plus hypothesis/effective-reference lengths. Adding two
// stats composes pairs into a corpus.
struct BleuStats {
    std::array<std::int64_t, kBleuMaxOrder> matched{};
    std::array<std::int64_t, kBleuMaxOrder> candidates{};
    std::int64_t hyp_len = 0;
    std::int64_t ref_len = 0;

    BleuStats& operator+=(const BleuStats& o) {
        for (int i = 0; i < kBleuMaxOrder; ++i) {
            matched[i] += o.matched[i];
            candidates[i] += o.candidates[i];
        }
        hyp_len += o.hyp_len;
        ref_len += o.ref_len;
        return *this;
    }
};

namespace detail {

inline std::map<std::string, std::int64_t> ngram_counts(const std::vector<std::string>& tokens,
                                                        int n) {
    std::map<std::string, std::int64_t> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int j = 1; j < n; ++j) {
            gram.push_back('\x1f');
            gram += tokens[i + j];
        }
        ++counts[gram];
    }
    return counts;
}

} // namespace detail

inline BleuStats bleu_pair_stats(const std::vector<std::string>& hyp_tokens,
                                 const std::vector<std::vector<std::string>>& refs_tokens) {
    if (refs_tokens.empty()) throw ValidationError("bleu pair needs at least one reference");
    BleuStats stats;
    stats.hyp_len = static_cast<std::int64_t>(hyp_tokens.size());

    // effective reference length: closest to the hypothesis, ties -> shorter
    std::int64_t best_ref = static_cast<std::int64_t>(refs_tokens.front().size());
    for (const auto& ref : refs_tokens) {
        auto len = static_cast<std::int64_t>(ref.size());
        auto diff = std::llabs(len - stats.hyp_len);
        auto best_diff = std::llabs(best_ref - stats.hyp_len);
        if (diff < best_diff || (diff == best_diff && len < best_ref)) best_ref = len;
    }
    stats.ref_len = best_ref;

    for (int n = 1; n <= kBleuMaxOrder; ++n) {
        auto hyp_counts = detail::ngram_counts(hyp_tokens, n);
        std::map<std::string, std::int64_t> clip;
        for (const auto& ref : refs_tokens) {
            for (const auto& [gram, count] : detail::ngram_counts(ref, n)) {
                auto& c = clip[gram];
                if (count > c) c = count;
            }
        }
        std::int64_t cand = 0, match = 0;
        for (const auto& [gram, count] : hyp_counts) {
            cand += count;
            auto it = clip.find(gram);
            if (it != clip.end()) match += std::min(count, it->second);
        }
        stats.candidates[n - 1] = cand;
        stats.matched[n - 1] = match;
    }
    return stats;
}

// Corpus BLEU in [0,100]: geometric mean of clipped precisions over orders
// 1-4 with a brevity penalty, no smoothing. Orders with zero candidates
// corpus-wide are dropped so that very short identical texts still score
// exactly 100.
inline double bleu_score_from_stats(const BleuStats& stats) {
    if (stats.hyp_len == 0) return 0.0;
    double log_sum = 0.0;
    int used = 0;
    for (int i = 0; i < kBleuMaxOrder; ++i) {
        if (stats.candidates[i] == 0) continue;
        ++used;
        if (stats.matched[i] == 0) return 0.0;
        log_sum += std::log(static_cast<double>(stats.matched[i]) /
                            static_cast<double>(stats.candidates[i]));
    }
    if (used == 0) return 0.0;
    double precision = std::exp(log_sum / used);
    double bp = 1.0;
    if (stats.hyp_len < stats.ref_len)
        bp = std::exp(1.0 - static_cast<double>(stats.ref_len) / static_cast<double>(stats.hyp_len));
    if (log_sum == 0.0 && bp == 1.0) return 100.0; // exact for identity hypotheses
    return 100.0 * bp * precision;
}

struct BleuPair {
    std::string hypothesis;
    std::vector<std::string> references;
};

inline double bleu_corpus(const std::vector<BleuPair>& pairs,
                          const NormalizationProfile& profile = {}) {
    if (pairs.empty()) throw ValidationError("empty-hypothesis-set");
    BleuStats total;
    for (const auto& pair : pairs) {
        if (pair.references.empty()) throw ValidationError("bleu pair needs a reference");
        std::vector<std::vector<std::string>> refs;
        refs.reserve(pair.references.size());
        for (const auto& r : pair.references) refs.push_back(bleu_tokenize(r, profile));
        total += bleu_pair_stats(bleu_tokenize(pair.hypothesis, profile), refs);
    }
    return bleu_score_from_stats(total);
}

} // namespace palibench
