// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "palibench/corpus.hpp"
#include "palibench/errors.hpp"
#include "palibench/ngram.hpp"
#include "palibench/utf8.hpp"
#include "palibench/verifier.hpp"

namespace palibench {

struct FilterThresholds {
    std::size_t min_chars = 100;       // shortest acceptable rendering
    double max_pair_jaccard = 0.90;    // >= flags translator copies
    double max_length_ratio = 2.0;     // > flags anomalous length spread
    double dedup_jaccard = 0.85;       // > marks near-duplicate passages
    int ngram_order = 3;
    std::size_t min_dup_chars = 25;    // internal duplication floor

    void validate() const {
        if (max_pair_jaccard <= 0 || max_pair_jaccard > 1)
            throw ValidationError("max_pair_jaccard must be in (0,1]");
        if (dedup_jaccard <= 0 || dedup_jaccard > 1)
            throw ValidationError("dedup_jaccard must be in (0,1]");
        if (max_length_ratio < 1) throw ValidationError("max_length_ratio must be >= 1");
        if (ngram_order < 1) throw ValidationError("ngram_order must be >= 1");
    }
};

enum class FilterCriterion {
    IncompleteData,
    VerificationFailure,
    InsufficientLength,
    ExcessiveSimilarity,
    AnomalousLengthRatio,
    InternalDuplication,
};

inline const char* to_string(FilterCriterion c) {
    switch (c) {
        case FilterCriterion::IncompleteData: return "incomplete_data";
        case FilterCriterion::VerificationFailure: return "verification_failure";
        case FilterCriterion::InsufficientLength: return "insufficient_length";
        case FilterCriterion::ExcessiveSimilarity: return "excessive_similarity";
        case FilterCriterion::AnomalousLengthRatio: return "anomalous_length_ratio";
        case FilterCriterion::InternalDuplication: return "internal_duplication";
    }
    return "?";
}

inline const std::vector<FilterCriterion>& all_filter_criteria() {
    static const std::vector<FilterCriterion> all = {
        FilterCriterion::IncompleteData,       FilterCriterion::VerificationFailure,
        FilterCriterion::InsufficientLength,   FilterCriterion::ExcessiveSimilarity,
        FilterCriterion::AnomalousLengthRatio, FilterCriterion::InternalDuplication,
    };
    return all;
}

struct FilterVerdict {
    PassageId passage;
    std::set<FilterCriterion> violations;

    bool retained() const { return violations.empty(); }
};

// (segment raw id, translator) -> category, built from verification records.
using VerificationIndex = std::map<std::pair<std::string, std::string>, VerificationCategory>;

inline VerificationIndex index_verification_records(const std::vector<VerificationRecord>& records) {
    VerificationIndex index;
    for (const auto& rec : records) index[{rec.segment.raw(), rec.translator}] = rec.category;
    return index;
}

inline FilterVerdict filter_passage(const Passage& passage,
                                    const std::vector<TranslatorId>& translators,
                                    const VerificationIndex& records, const FilterThresholds& t,
                                    const NormalizationProfile& profile = {}) {
    t.validate();
    FilterVerdict verdict;
    verdict.passage = passage.id;

    std::vector<std::string> aligned;
    std::vector<std::string> all_names;
    for (const auto& tr : translators) {
        all_names.push_back(tr.name);
        if (tr.role == TranslatorRole::Aligned) aligned.push_back(tr.name);
    }

    // 1. incomplete data: any null translation among aligned translators
    for (const auto& seg : passage.segments) {
        for (const auto& name : aligned) {
            const auto* e = seg.entry(name);
            if (e == nullptr || !e->has_value())
                verdict.violations.insert(FilterCriterion::IncompleteData);
        }
    }

    // 2. verification failure: any suspicious record
    for (const auto& seg : passage.segments) {
        for (const auto& name : aligned) {
            const auto* e = seg.entry(name);
            if (e == nullptr || !e->has_value()) continue;
            auto it = records.find({seg.id.raw(), name});
            if (it == records.end())
                throw ValidationError("missing-verification-record: " + seg.id.raw() + " / " + name);
            if (it->second == VerificationCategory::Suspicious)
                verdict.violations.insert(FilterCriterion::VerificationFailure);
        }
    }

    // 3/4/5 need per-translator passage texts
    std::map<std::string, std::string> texts;
    for (const auto& name : all_names) texts[name] = passage_translation_text(passage, name);

    for (const auto& [name, text] : texts) {
        if (utf8::char_count(text) < t.min_chars)
            verdict.violations.insert(FilterCriterion::InsufficientLength);
    }

    for (std::size_t i = 0; i < all_names.size(); ++i) {
        for (std::size_t j = i + 1; j < all_names.size(); ++j) {
            double sim = jaccard(texts[all_names[i]], texts[all_names[j]], t.ngram_order, profile);
            if (sim >= t.max_pair_jaccard)
                verdict.violations.insert(FilterCriterion::ExcessiveSimilarity);
        }
    }

    std::size_t longest = 0, shortest = 0;
    bool first = true;
    for (const auto& [name, text] : texts) {
        std::size_t len = utf8::char_count(text);
        longest = first ? len : std::max(longest, len);
        shortest = first ? len : std::min(shortest, len);
        first = false;
    }
    if (!first) {
        if (shortest == 0) {
            if (longest > 0) verdict.violations.insert(FilterCriterion::AnomalousLengthRatio);
        } else if (static_cast<double>(longest) / static_cast<double>(shortest) >
                   t.max_length_ratio) {
            verdict.violations.insert(FilterCriterion::AnomalousLengthRatio);
        }
    }

    // 6. internal duplication: same translator, two segments whose normalized
    // texts are identical or nested, with the shorter at least min_dup_chars.
    for (const auto& name : all_names) {
        std::vector<std::string> norm;
        for (const auto& seg : passage.segments) {
            const auto* e = seg.entry(name);
            norm.push_back(e != nullptr && e->has_value() ? normalize(**e, profile)
                                                          : std::string());
        }
        for (std::size_t i = 0; i < norm.size() && !verdict.violations.count(
                                                       FilterCriterion::InternalDuplication);
             ++i) {
            for (std::size_t j = i + 1; j < norm.size(); ++j) {
                const std::string& a = norm[i];
                const std::string& b = norm[j];
                const std::string& shorter = a.size() <= b.size() ? a : b;
                const std::string& longer = a.size() <= b.size() ? b : a;
                if (utf8::char_count(shorter) < t.min_dup_chars) continue;
                if (longer.find(shorter) != std::string::npos) {
                    verdict.violations.insert(FilterCriterion::InternalDuplication);
                    break;
                }
            }
        }
    }
    return verdict;
}

struct DedupRemoval {
    PassageId removed;
    PassageId kept;
    double similarity = 0.0;
};

struct CurationReport {
    std::size_t starting_passages = 0;
    std::map<FilterCriterion, std::size_t> criterion_counts; // non-exclusive
    std::vector<FilterVerdict> verdicts;
    std::vector<PassageId> retained_after_filter;
    std::vector<DedupRemoval> removed_by_dedup;
    std::vector<PassageId> final_passages;
    FilterThresholds thresholds;
    std::map<std::string, std::string> provenance;

    void check_identities() const {
        if (final_passages.size() != retained_after_filter.size() - removed_by_dedup.size())
            throw ValidationError("curation accounting identity violated");
    }
};

struct FilterOutcome {
    std::vector<Passage> retained;
    CurationReport report;
};

inline FilterOutcome filter_corpus(const AlignedCorpus& corpus,
                                   const std::vector<VerificationRecord>& records,
                                   const FilterThresholds& t,
                                   const NormalizationProfile& profile = {}) {
    VerificationIndex index = index_verification_records(records);
    FilterOutcome out;
    out.report.starting_passages = corpus.passages.size();
    out.report.thresholds = t;
    for (auto c : all_filter_criteria()) out.report.criterion_counts[c] = 0;
    for (const auto& passage : corpus.passages) {
        FilterVerdict verdict = filter_passage(passage, corpus.translators, index, t, profile);
        for (auto c : verdict.violations) ++out.report.criterion_counts[c];
        if (verdict.retained()) {
            out.retained.push_back(passage);
            out.report.retained_after_filter.push_back(passage.id);
        }
        out.report.verdicts.push_back(std::move(verdict));
    }
    return out;
}

struct DedupOutcome {
    std::vector<Passage> final_passages;
    std::vector<DedupRemoval> removals;
};

// Greedy alphabetical scan over source-text 3-gram similarity: a passage is
// dropped iff it exceeds the threshold against some already-kept passage,
// recording the first such keeper.
inline DedupOutcome deduplicate(const std::vector<Passage>& retained, const FilterThresholds& t,
                                const NormalizationProfile& profile = {}) {
    t.validate();
    for (std::size_t i = 1; i < retained.size(); ++i)
        if (!(retained[i - 1].id < retained[i].id))
            throw ValidationError("deduplicate expects passages in alphabetical order");

    std::vector<NgramSet> grams;
    grams.reserve(retained.size());
    for (const auto& p : retained)
        grams.push_back(word_ngrams(passage_source_text(p), t.ngram_order, profile));

    DedupOutcome out;
    std::vector<std::size_t> kept_indices;
    for (std::size_t i = 0; i < retained.size(); ++i) {
        bool removed = false;
        for (std::size_t k : kept_indices) {
            if (jaccard_upper_bound(grams[k], grams[i]) <= t.dedup_jaccard) continue;
            double sim = jaccard_sets(grams[k], grams[i]);
            if (sim > t.dedup_jaccard) {
                out.removals.push_back({retained[i].id, retained[k].id, sim});
                removed = true;
                break;
            }
        }
        if (!removed) {
            kept_indices.push_back(i);
            out.final_passages.push_back(retained[i]);
        }
    }
    return out;
}

inline CurationReport curate(const AlignedCorpus& corpus,
                             const std::vector<VerificationRecord>& records,
                             const FilterThresholds& t, const NormalizationProfile& profile,
                             std::vector<Passage>* final_out = nullptr) {
    FilterOutcome filtered = filter_corpus(corpus, records, t, profile);
    DedupOutcome deduped = deduplicate(filtered.retained, t, profile);
    CurationReport report = std::move(filtered.report);
    report.removed_by_dedup = deduped.removals;
    for (const auto& p : deduped.final_passages) report.final_passages.push_back(p.id);
    report.check_identities();
    if (final_out != nullptr) *final_out = std::move(deduped.final_passages);
    return report;
}

} // namespace palibench
