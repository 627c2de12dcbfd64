// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "palibench/utf8.hpp"

namespace palibench {

// Per-flag text standardization. Applying a profile twice equals applying it
// once; with every flag off the result is the input unchanged.
struct NormalizationProfile {
    bool unicode_form = true;    // compose Latin diacritics, fold ellipsis/space variants
    bool quote_folding = true;   // curly and angled quotes to ASCII ' and "
    bool dash_folding = true;    // hyphen/en/em/horizontal-bar dashes to '-'
    bool whitespace_collapse = true;
    bool list_number_strip = true;
    bool case_fold = true;

    static NormalizationProfile all() { return NormalizationProfile{}; }
    static NormalizationProfile none() {
        return NormalizationProfile{false, false, false, false, false, false};
    }
};

namespace detail {

inline bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v' ||
           cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x205F ||
           cp == 0x3000;
}

// Canonical composition for base + combining mark pairs seen in romanized
// Pali and common European text. Returns 0 when the pair does not compose.
inline char32_t compose_pair(char32_t base, char32_t mark) {
    struct Entry {
        char32_t base;
        char32_t mark;
        char32_t composed;
    };
    static constexpr Entry table[] = {
        // macron U+0304
        {U'a', 0x304, 0x101}, {U'A', 0x304, 0x100}, {U'e', 0x304, 0x113}, {U'E', 0x304, 0x112},
        {U'i', 0x304, 0x12B}, {U'I', 0x304, 0x12A}, {U'o', 0x304, 0x14D}, {U'O', 0x304, 0x14C},
        {U'u', 0x304, 0x16B}, {U'U', 0x304, 0x16A},
        // dot below U+0323
        {U'd', 0x323, 0x1E0D}, {U'D', 0x323, 0x1E0C}, {U't', 0x323, 0x1E6D}, {U'T', 0x323, 0x1E6C},
        {U'n', 0x323, 0x1E47}, {U'N', 0x323, 0x1E46}, {U'm', 0x323, 0x1E43}, {U'M', 0x323, 0x1E42},
        {U'l', 0x323, 0x1E37}, {U'L', 0x323, 0x1E36}, {U'r', 0x323, 0x1E5B}, {U'R', 0x323, 0x1E5A},
        {U's', 0x323, 0x1E63}, {U'S', 0x323, 0x1E62}, {U'h', 0x323, 0x1E25}, {U'H', 0x323, 0x1E24},
        {0x1E5B, 0x304, 0x1E5D}, {0x1E5A, 0x304, 0x1E5C},
        // dot above U+0307
        {U'n', 0x307, 0x1E45}, {U'N', 0x307, 0x1E44}, {U'm', 0x307, 0x1E41}, {U'M', 0x307, 0x1E40},
        // tilde U+0303
        {U'n', 0x303, 0xF1}, {U'N', 0x303, 0xD1}, {U'a', 0x303, 0xE3}, {U'A', 0x303, 0xC3},
        {U'o', 0x303, 0xF5}, {U'O', 0x303, 0xD5},
        // acute U+0301
        {U'a', 0x301, 0xE1}, {U'A', 0x301, 0xC1}, {U'e', 0x301, 0xE9}, {U'E', 0x301, 0xC9},
        {U'i', 0x301, 0xED}, {U'I', 0x301, 0xCD}, {U'o', 0x301, 0xF3}, {U'O', 0x301, 0xD3},
        {U'u', 0x301, 0xFA}, {U'U', 0x301, 0xDA},
        // grave U+0300
        {U'a', 0x300, 0xE0}, {U'A', 0x300, 0xC0}, {U'e', 0x300, 0xE8}, {U'E', 0x300, 0xC8},
        {U'i', 0x300, 0xEC}, {U'I', 0x300, 0xCC}, {U'o', 0x300, 0xF2}, {U'O', 0x300, 0xD2},
        {U'u', 0x300, 0xF9}, {U'U', 0x300, 0xD9},
    };
    for (const auto& e : table)
        if (e.base == base && e.mark == mark) return e.composed;
    return 0;
}

inline char32_t fold_case_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x178) return 0xFF;
    // Latin Extended-A / Additional upper-lower pairs (even = uppercase).
    if (((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177) ||
         (cp >= 0x1E00 && cp <= 0x1EFF)) &&
        (cp % 2 == 0))
        return cp + 1;
    return cp;
}

inline bool is_quote_single(char32_t cp) {
    return cp == 0x2018 || cp == 0x2019 || cp == 0x201A || cp == 0x201B || cp == 0x2039 ||
           cp == 0x203A;
}

inline bool is_quote_double(char32_t cp) {
    return cp == 0x201C || cp == 0x201D || cp == 0x201E || cp == 0x201F || cp == 0xAB ||
           cp == 0xBB;
}

inline bool is_dash(char32_t cp) {
    return cp == 0x2010 || cp == 0x2011 || cp == 0x2012 || cp == 0x2013 || cp == 0x2014 ||
           cp == 0x2015 || cp == 0x2212;
}

// Strips "(12)", "12." and "12)" list markers sitting at a strip point,
// repeatedly, so stacked markers cannot survive one pass. The marker must be
// followed by whitespace (or end of text) to leave interior numerals alone.
inline std::size_t skip_list_markers(const std::vector<char32_t>& cps, std::size_t i) {
    while (true) {
        std::size_t j = i;
        while (j < cps.size() && (cps[j] == U' ' || cps[j] == U'\t')) ++j;
        std::size_t m = j;
        bool paren = false;
        if (m < cps.size() && cps[m] == U'(') {
            paren = true;
            ++m;
        }
        std::size_t digits_start = m;
        while (m < cps.size() && cps[m] >= U'0' && cps[m] <= U'9') ++m;
        if (m == digits_start) return i;
        if (m >= cps.size()) return i;
        if (paren) {
            if (cps[m] != U')') return i;
        } else {
            if (cps[m] != U'.' && cps[m] != U')') return i;
        }
        ++m;
        if (m < cps.size() && !is_space_cp(cps[m])) return i;
        i = m;
    }
}

} // namespace detail

inline std::string normalize(std::string_view text, const NormalizationProfile& profile) {
    std::vector<char32_t> cps = utf8::decode(text);
    std::vector<char32_t> out;
    out.reserve(cps.size());

    if (profile.unicode_form) {
        for (char32_t cp : cps) {
            if (!out.empty()) {
                if (char32_t composed = detail::compose_pair(out.back(), cp); composed != 0) {
                    out.back() = composed;
                    continue;
                }
            }
            if (cp == 0x2026) { // ellipsis
                out.insert(out.end(), {U'.', U'.', U'.'});
            } else if (cp == 0x200B || cp == 0xFEFF) {
                // zero-width space / BOM: drop
            } else if (cp >= 0x80 && detail::is_space_cp(cp)) {
                out.push_back(U' ');
            } else {
                out.push_back(cp);
            }
        }
        cps.swap(out);
        out.clear();
    }

    if (profile.quote_folding || profile.dash_folding) {
        for (char32_t& cp : cps) {
            if (profile.quote_folding && detail::is_quote_single(cp)) cp = U'\'';
            else if (profile.quote_folding && detail::is_quote_double(cp)) cp = U'"';
            else if (profile.dash_folding && detail::is_dash(cp)) cp = U'-';
        }
    }

    if (profile.list_number_strip) {
        std::size_t i = detail::skip_list_markers(cps, 0);
        while (i < cps.size()) {
            char32_t cp = cps[i];
            out.push_back(cp);
            ++i;
            if (cp == U'\n') {
                i = detail::skip_list_markers(cps, i);
            } else if ((cp == U'.' || cp == U'!' || cp == U'?') && i < cps.size() &&
                       detail::is_space_cp(cps[i])) {
                // sentence boundary: whitespace then a potential marker
                std::size_t k = i;
                while (k < cps.size() && detail::is_space_cp(cps[k]) && cps[k] != U'\n') ++k;
                std::size_t after = detail::skip_list_markers(cps, k);
                if (after != k) {
                    for (std::size_t w = i; w < k; ++w) out.push_back(cps[w]);
                    i = after;
                }
            }
        }
        cps.swap(out);
        out.clear();
    }

    if (profile.whitespace_collapse) {
        bool pending_space = false;
        for (char32_t cp : cps) {
            if (detail::is_space_cp(cp)) {
                pending_space = !out.empty();
            } else {
                if (pending_space) out.push_back(U' ');
                pending_space = false;
                out.push_back(cp);
            }
        }
        cps.swap(out);
        out.clear();
    }

    if (profile.case_fold) {
        for (char32_t& cp : cps) cp = detail::fold_case_cp(cp);
    }

    return utf8::encode(cps);
}

/// Maximal runs of non-whitespace characters.
inline std::vector<std::string> whitespace_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t start = pos;
        char32_t cp = utf8::decode_next(text, pos);
        if (detail::is_space_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.append(text.substr(start, pos - start));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Versioned tokenizer behind BLEU: normalize under the given profile with
// case folding forced on, then split punctuation into standalone tokens.
inline constexpr std::string_view kBleuTokenizerId = "pb-tok-v1";

inline std::vector<std::string> bleu_tokenize(std::string_view text,
                                              NormalizationProfile profile = {}) {
    profile.case_fold = true;
    std::string norm = normalize(text, profile);
    std::string spaced;
    spaced.reserve(norm.size() + norm.size() / 4);
    std::size_t pos = 0;
    while (pos < norm.size()) {
        std::size_t start = pos;
        char32_t cp = utf8::decode_next(norm, pos);
        bool word = (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
                    (cp >= U'A' && cp <= U'Z') || cp >= 0x80;
        if (word || detail::is_space_cp(cp)) {
            spaced.append(norm.substr(start, pos - start));
        } else {
            spaced.push_back(' ');
            spaced.append(norm.substr(start, pos - start));
            spaced.push_back(' ');
        }
    }
    return whitespace_tokenize(spaced);
}

} // namespace palibench
