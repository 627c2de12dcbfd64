// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "palibench/errors.hpp"
#include "palibench/normalize.hpp"

namespace palibench {

// Set of word n-grams; each gram is its tokens joined with a 0x1F separator,
// which cannot appear inside a token.
struct NgramSet {
    int order = 0;
    std::set<std::string> grams;

    std::size_t size() const { return grams.size(); }
    bool empty() const { return grams.empty(); }
};

inline NgramSet ngrams_of_tokens(const std::vector<std::string>& tokens, int n) {
    if (n < 1) throw ValidationError("ngram order must be >= 1");
    NgramSet set;
    set.order = n;
    if (tokens.size() < static_cast<std::size_t>(n)) return set;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (int j = 1; j < n; ++j) {
            gram.push_back('\x1f');
            gram += tokens[i + j];
        }
        set.grams.insert(std::move(gram));
    }
    return set;
}

/// All consecutive n-token windows over the normalized, case-folded,
/// whitespace-tokenized text.
inline NgramSet word_ngrams(std::string_view text, int n,
                            const NormalizationProfile& profile = {}) {
    return ngrams_of_tokens(whitespace_tokenize(normalize(text, profile)), n);
}

inline double jaccard_sets(const NgramSet& a, const NgramSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    std::size_t inter = 0;
    const NgramSet& small = a.size() <= b.size() ? a : b;
    const NgramSet& large = a.size() <= b.size() ? b : a;
    for (const auto& g : small.grams)
        if (large.grams.count(g)) ++inter;
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Jaccard can never exceed min/max of the set sizes; callers use this to
// skip exact computation when the bound already fails a threshold.
inline double jaccard_upper_bound(const NgramSet& a, const NgramSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    double lo = static_cast<double>(std::min(a.size(), b.size()));
    double hi = static_cast<double>(std::max(a.size(), b.size()));
    return lo / hi;
}

inline double jaccard(std::string_view a, std::string_view b, int n,
                      const NormalizationProfile& profile = {}) {
    return jaccard_sets(word_ngrams(a, n, profile), word_ngrams(b, n, profile));
}

} // namespace palibench
