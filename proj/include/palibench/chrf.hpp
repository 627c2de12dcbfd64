// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "palibench/errors.hpp"
#include "palibench/normalize.hpp"
#include "palibench/utf8.hpp"

namespace palibench {

// chrF++: character n-grams of orders 1-6 (whitespace removed) plus word
// n-grams of orders 1-2, F-beta with beta=2, averaged over orders. Operates
// on raw surface text, case-sensitive. Multi-reference score is the max of
// the single-reference scores.

inline constexpr int kChrfCharOrder = 6;
inline constexpr int kChrfWordOrder = 2;
inline constexpr double kChrfBeta = 2.0;
inline constexpr int kChrfOrders = kChrfCharOrder + kChrfWordOrder;

struct ChrfStats {
    // index 0..5: char orders 1-6; 6..7: word orders 1-2
    std::array<std::int64_t, kChrfOrders> matched{};
    std::array<std::int64_t, kChrfOrders> hyp_total{};
    std::array<std::int64_t, kChrfOrders> ref_total{};

    ChrfStats& operator+=(const ChrfStats& o) {
        for (int i = 0; i < kChrfOrders; ++i) {
            matched[i] += o.matched[i];
            hyp_total[i] += o.hyp_total[i];
            ref_total[i] += o.ref_total[i];
        }
        return *this;
    }
};

namespace detail {

template <typename Unit>
std::map<std::vector<Unit>, std::int64_t> unit_ngram_counts(const std::vector<Unit>& units, int n) {
    std::map<std::vector<Unit>, std::int64_t> counts;
    if (units.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= units.size(); ++i)
        ++counts[std::vector<Unit>(units.begin() + i, units.begin() + i + n)];
    return counts;
}

template <typename Unit>
void accumulate_order(const std::vector<Unit>& hyp, const std::vector<Unit>& ref, int n,
                      std::int64_t& matched, std::int64_t& hyp_total, std::int64_t& ref_total) {
    auto hyp_counts = unit_ngram_counts(hyp, n);
    auto ref_counts = unit_ngram_counts(ref, n);
    for (const auto& [gram, count] : hyp_counts) {
        hyp_total += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    for (const auto& [gram, count] : ref_counts) ref_total += count;
}

inline std::vector<char32_t> chrf_chars(std::string_view text) {
    std::vector<char32_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = utf8::decode_next(text, pos);
        if (!palibench::detail::is_space_cp(cp)) out.push_back(cp);
    }
    return out;
}

} // namespace detail

inline ChrfStats chrf_pair_stats(std::string_view hypothesis, std::string_view reference) {
    ChrfStats stats;
    auto hyp_chars = detail::chrf_chars(hypothesis);
    auto ref_chars = detail::chrf_chars(reference);
    for (int n = 1; n <= kChrfCharOrder; ++n)
        detail::accumulate_order(hyp_chars, ref_chars, n, stats.matched[n - 1],
                                 stats.hyp_total[n - 1], stats.ref_total[n - 1]);
    auto hyp_words = whitespace_tokenize(hypothesis);
    auto ref_words = whitespace_tokenize(reference);
    for (int n = 1; n <= kChrfWordOrder; ++n)
        detail::accumulate_order(hyp_words, ref_words, n, stats.matched[kChrfCharOrder + n - 1],
                                 stats.hyp_total[kChrfCharOrder + n - 1],
                                 stats.ref_total[kChrfCharOrder + n - 1]);
    return stats;
}

inline double chrf_score_from_stats(const ChrfStats& stats) {
    double sum = 0.0;
    int used = 0;
    const double b2 = kChrfBeta * kChrfBeta;
    for (int i = 0; i < kChrfOrders; ++i) {
        if (stats.hyp_total[i] == 0 && stats.ref_total[i] == 0) continue; // order out of range
        ++used;
        double p = stats.hyp_total[i] > 0
                       ? static_cast<double>(stats.matched[i]) / static_cast<double>(stats.hyp_total[i])
                       : 0.0;
        double r = stats.ref_total[i] > 0
                       ? static_cast<double>(stats.matched[i]) / static_cast<double>(stats.ref_total[i])
                       : 0.0;
        if (p + r > 0.0) sum += (1.0 + b2) * p * r / (b2 * p + r);
    }
    if (used == 0) return 100.0; // two empty texts are identical
    return 100.0 * sum / used;
}

/// Best single-reference chrF++ across the given references.
inline double chrfpp_passage(std::string_view hypothesis,
                             const std::vector<std::string>& references) {
    if (references.empty()) throw ValidationError("empty-reference");
    double best = 0.0;
    bool first = true;
    for (const auto& ref : references) {
        double score = chrf_score_from_stats(chrf_pair_stats(hypothesis, ref));
        if (first || score > best) best = score;
        first = false;
    }
    return best;
}

/// Index of the reference that attains chrfpp_passage (first on ties).
inline std::size_t chrfpp_best_reference(std::string_view hypothesis,
                                         const std::vector<std::string>& references) {
    if (references.empty()) throw ValidationError("empty-reference");
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < references.size(); ++i) {
        double score = chrf_score_from_stats(chrf_pair_stats(hypothesis, references[i]));
        if (score > best) {
            best = score;
            best_idx = i;
        }
    }
    return best_idx;
}

struct ChrfCorpusResult {
    double mean_of_passages = 0.0;  // arithmetic mean of per-passage scores
    double pooled = 0.0;            // F over statistics pooled against each passage's best reference
};

inline ChrfCorpusResult chrf_corpus(const std::vector<std::pair<std::string, std::vector<std::string>>>& pairs) {
    if (pairs.empty()) throw ValidationError("empty-hypothesis-set");
    ChrfCorpusResult result;
    ChrfStats pooled;
    double sum = 0.0;
    for (const auto& [hyp, refs] : pairs) {
        sum += chrfpp_passage(hyp, refs);
        pooled += chrf_pair_stats(hyp, refs[chrfpp_best_reference(hyp, refs)]);
    }
    result.mean_of_passages = sum / static_cast<double>(pairs.size());
    result.pooled = chrf_score_from_stats(pooled);
    return result;
}

} // namespace palibench
