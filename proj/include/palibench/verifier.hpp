// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "palibench/corpus.hpp"
#include "palibench/errors.hpp"
#include "palibench/normalize.hpp"

namespace palibench {

enum class VerificationCategory {
    Verbatim,
    Normalized,
    Expanded,
    CrossReference,
    Suspicious,
    NotApplicable,
};

inline const char* to_string(VerificationCategory c) {
    switch (c) {
        case VerificationCategory::Verbatim: return "verbatim";
        case VerificationCategory::Normalized: return "normalized";
        case VerificationCategory::Expanded: return "expanded";
        case VerificationCategory::CrossReference: return "cross_reference";
        case VerificationCategory::Suspicious: return "suspicious";
        case VerificationCategory::NotApplicable: return "not_applicable";
    }
    return "?";
}

struct VerificationEvidence {
    enum class Kind { OffsetSpan, TemplateSegment, ReferencedDoc };
    Kind kind = Kind::OffsetSpan;
    std::size_t offset = 0; // OffsetSpan: byte offset in the (raw or normalized) source doc
    std::size_t length = 0;
    std::string ref;        // TemplateSegment: segment id; ReferencedDoc: doc id

    std::string to_text() const {
        switch (kind) {
            case Kind::OffsetSpan:
                return "offset:" + std::to_string(offset) + "+" + std::to_string(length);
            case Kind::TemplateSegment: return "template:" + ref;
            case Kind::ReferencedDoc: return "xref:" + ref;
        }
        return "";
    }
};

struct VerificationRecord {
    SegmentId segment;
    std::string translator;
    VerificationCategory category = VerificationCategory::Suspicious;
    std::optional<VerificationEvidence> evidence;
};

struct VerifierConfig {
    NormalizationProfile profile;
    std::size_t head_tail_chars = 15;
    // Matched against normalized text, so folded forms come first; raw forms
    // keep the stage working when folding is switched off.
    std::vector<std::string> ellipsis_markers = {"...", "…", "-pe-", "—pe—",
                                                 "(pe)", "[pe]"};
    std::vector<std::string> xref_patterns = {"as in ", "see "};
};

namespace detail {

inline std::string trim_spaces(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

// Reads a document id (letters then digits, e.g. "mn10") at pos.
inline std::string read_doc_id(std::string_view text, std::size_t pos) {
    std::size_t i = pos;
    while (i < text.size() && ((text[i] >= 'a' && text[i] <= 'z') || (text[i] >= 'A' && text[i] <= 'Z')))
        ++i;
    if (i == pos) return "";
    std::size_t letters_end = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == letters_end) return "";
    return std::string(text.substr(pos, i - pos));
}

// Stage 3. The source contains "<head> <marker> <tail>"; the extraction must
// start with the head, end with the tail, and its remaining middle must
// occur (normalized) in some earlier verified extraction from the same doc.
inline std::optional<VerificationEvidence> match_expanded(
    const std::string& extracted_norm, const std::string& source_norm,
    const std::vector<std::pair<SegmentId, std::string>>& prior_norm,
    const VerifierConfig& config) {
    if (extracted_norm.empty()) return std::nullopt;
    const std::size_t head_len = std::min(config.head_tail_chars, extracted_norm.size());
    const std::string head = extracted_norm.substr(0, head_len);

    for (const auto& marker : config.ellipsis_markers) {
        std::size_t p = source_norm.find(marker);
        while (p != std::string::npos) {
            do {
                // nearest occurrence of the extraction's head before the marker
                std::size_t q = source_norm.rfind(head, p);
                if (q == std::string::npos || q >= p) break;
                std::string prefix = trim_spaces(source_norm.substr(q, p - q));
                if (prefix.empty() || extracted_norm.rfind(prefix, 0) != 0) break;

                // longest prefix of the post-marker source that suffixes the
                // extraction; shorter than the anchor length is fine when the
                // abbreviated span ends with the sentence
                std::size_t t = p + marker.size();
                while (t < source_norm.size() && (source_norm[t] == ' ' || source_norm[t] == '\n'))
                    ++t;
                std::size_t avail = std::min(source_norm.size() - t, extracted_norm.size());
                std::size_t min_tail = std::min(config.head_tail_chars, avail);
                std::size_t tail_len = 0;
                auto sentence_complete = [&](std::size_t len) {
                    if (len < 4) return false;
                    if (t + len == source_norm.size()) return true;
                    char last = source_norm[t + len - 1];
                    return last == '.' || last == '!' || last == '?' || last == ';';
                };
                for (std::size_t len = avail; len > 0; --len) {
                    if (len < min_tail && !sentence_complete(len)) continue;
                    if (source_norm.compare(t, len, extracted_norm,
                                            extracted_norm.size() - len, len) == 0) {
                        tail_len = len;
                        break;
                    }
                }
                if (tail_len == 0) break;
                if (prefix.size() + tail_len >= extracted_norm.size()) break; // nothing elided
                std::string middle = trim_spaces(extracted_norm.substr(
                    prefix.size(), extracted_norm.size() - prefix.size() - tail_len));
                if (middle.empty()) break;
                for (const auto& [id, text] : prior_norm) {
                    if (text.find(middle) != std::string::npos) {
                        VerificationEvidence ev;
                        ev.kind = VerificationEvidence::Kind::TemplateSegment;
                        ev.ref = id.raw();
                        return ev;
                    }
                }
            } while (false);
            p = source_norm.find(marker, p + 1);
        }
    }
    return std::nullopt;
}

// Stage 4. A reference pattern ("as in mn10", "see mn10") in the source doc
// names another document that must contain the extraction after
// normalization.
inline std::optional<VerificationEvidence> match_cross_reference(
    const std::string& extracted_norm, const std::string& source_norm,
    const std::map<std::string, std::string>& xref_docs, const VerifierConfig& config) {
    for (const auto& pattern : config.xref_patterns) {
        std::size_t p = source_norm.find(pattern);
        while (p != std::string::npos) {
            std::string doc = read_doc_id(source_norm, p + pattern.size());
            if (!doc.empty()) {
                auto it = xref_docs.find(doc);
                if (it != xref_docs.end()) {
                    std::string target_norm = normalize(it->second, config.profile);
                    if (target_norm.find(extracted_norm) != std::string::npos) {
                        VerificationEvidence ev;
                        ev.kind = VerificationEvidence::Kind::ReferencedDoc;
                        ev.ref = doc;
                        return ev;
                    }
                }
            }
            p = source_norm.find(pattern, p + 1);
        }
    }
    return std::nullopt;
}

struct VerifyOutcome {
    VerificationCategory category = VerificationCategory::Suspicious;
    std::optional<VerificationEvidence> evidence;
};

inline VerifyOutcome classify_extraction(
    const std::string& extracted, const std::string& source_doc, const std::string& source_norm,
    const std::vector<std::pair<SegmentId, std::string>>& prior_norm,
    const std::map<std::string, std::string>& xref_docs, const VerifierConfig& config) {
    VerifyOutcome out;

    // An empty extraction (legitimate only opposite an empty anchor) is a
    // trivial substring of any source.
    if (extracted.empty()) {
        out.category = VerificationCategory::Verbatim;
        out.evidence = VerificationEvidence{VerificationEvidence::Kind::OffsetSpan, 0, 0, ""};
        return out;
    }

    // 1. verbatim: contiguous substring of the raw source
    std::size_t at = source_doc.find(extracted);
    if (at != std::string::npos) {
        out.category = VerificationCategory::Verbatim;
        out.evidence = VerificationEvidence{VerificationEvidence::Kind::OffsetSpan, at,
                                            extracted.size(), ""};
        return out;
    }

    // 2. normalized: substring after both sides are normalized
    std::string extracted_norm = normalize(extracted, config.profile);
    at = extracted_norm.empty() ? std::string::npos : source_norm.find(extracted_norm);
    if (at != std::string::npos) {
        out.category = VerificationCategory::Normalized;
        out.evidence = VerificationEvidence{VerificationEvidence::Kind::OffsetSpan, at,
                                            extracted_norm.size(), ""};
        return out;
    }

    // 3. expanded abbreviation
    if (auto ev = match_expanded(extracted_norm, source_norm, prior_norm, config)) {
        out.category = VerificationCategory::Expanded;
        out.evidence = ev;
        return out;
    }

    // 4. cross-reference
    if (auto ev = match_cross_reference(extracted_norm, source_norm, xref_docs, config)) {
        out.category = VerificationCategory::CrossReference;
        out.evidence = ev;
        return out;
    }

    out.category = VerificationCategory::Suspicious;
    return out;
}

} // namespace detail

/// Single-extraction verification; first stage that succeeds wins, in the
/// order verbatim, normalized, expanded, cross-reference, else suspicious.
inline VerificationRecord verify_segment(
    const SegmentId& segment, const std::string& translator, const std::string& extracted,
    const std::string& source_doc,
    const std::vector<std::pair<SegmentId, std::string>>& prior_verified,
    const std::map<std::string, std::string>& xref_docs, const VerifierConfig& config = {}) {
    std::vector<std::pair<SegmentId, std::string>> prior_norm;
    prior_norm.reserve(prior_verified.size());
    for (const auto& [id, text] : prior_verified)
        prior_norm.emplace_back(id, normalize(text, config.profile));
    auto outcome =
        detail::classify_extraction(extracted, source_doc, normalize(source_doc, config.profile),
                                    prior_norm, xref_docs, config);
    return {segment, translator, outcome.category, outcome.evidence};
}

struct VerificationStats {
    struct PerTranslator {
        std::map<VerificationCategory, std::size_t> counts;
        std::size_t non_null = 0;
        std::size_t null_count = 0;

        double percent(VerificationCategory c) const {
            auto it = counts.find(c);
            if (it == counts.end() || non_null == 0) return 0.0;
            return 100.0 * static_cast<double>(it->second) / static_cast<double>(non_null);
        }
    };
    std::map<std::string, PerTranslator> per_translator;
};

// Verifies every non-null extraction of every aligned translator against
// that translator's own source documents. Docs are processed independently;
// within a doc, segments run in SegmentId order so stage 3 only ever sees
// earlier, already-verified extractions.
inline std::pair<std::vector<VerificationRecord>, VerificationStats> verify_corpus(
    const AlignedCorpus& corpus,
    const std::map<std::string, std::map<std::string, std::string>>& sources_by_translator,
    const VerifierConfig& config = {}) {
    std::vector<VerificationRecord> records;
    VerificationStats stats;

    for (const auto& translator : corpus.translators) {
        if (translator.role != TranslatorRole::Aligned) continue;
        auto src_it = sources_by_translator.find(translator.name);
        auto& tstats = stats.per_translator[translator.name];

        // group segments by doc, in id order
        std::map<std::string, std::vector<const Segment*>> by_doc;
        for (const auto& p : corpus.passages)
            for (const auto& s : p.segments)
                if (s.has_entry(translator.name)) by_doc[s.id.doc].push_back(&s);
        for (auto& [doc, segs] : by_doc)
            std::sort(segs.begin(), segs.end(),
                      [](const Segment* a, const Segment* b) { return a->id < b->id; });

        for (const auto& [doc, segs] : by_doc) {
            const std::map<std::string, std::string>* docs =
                src_it == sources_by_translator.end() ? nullptr : &src_it->second;
            const std::string* source_doc = nullptr;
            if (docs != nullptr) {
                auto d = docs->find(doc);
                if (d != docs->end()) source_doc = &d->second;
            }
            bool doc_needed = false;
            for (const Segment* s : segs)
                if (s->entry(translator.name)->has_value()) doc_needed = true;
            if (doc_needed && source_doc == nullptr)
                throw ValidationError("missing-source-document: translator " + translator.name +
                                      " doc " + doc);

            std::string source_norm =
                source_doc ? normalize(*source_doc, config.profile) : std::string();
            std::vector<std::pair<SegmentId, std::string>> prior_norm;

            for (const Segment* seg : segs) {
                const auto& entry = *seg->entry(translator.name);
                if (!entry.has_value()) {
                    ++tstats.null_count;
                    records.push_back(
                        {seg->id, translator.name, VerificationCategory::NotApplicable, {}});
                    continue;
                }
                ++tstats.non_null;
                auto outcome = detail::classify_extraction(
                    *entry, *source_doc, source_norm, prior_norm,
                    docs ? *docs : std::map<std::string, std::string>{}, config);
                ++tstats.counts[outcome.category];
                records.push_back({seg->id, translator.name, outcome.category, outcome.evidence});
                if (outcome.category != VerificationCategory::Suspicious)
                    prior_norm.emplace_back(seg->id, normalize(*entry, config.profile));
            }
        }
    }
    return {std::move(records), std::move(stats)};
}

} // namespace palibench
