// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "palibench/errors.hpp"
#include "palibench/segment_id.hpp"
#include "palibench/utf8.hpp"

namespace palibench {

enum class TranslatorRole { SegmentationAnchor, Aligned };

struct TranslatorId {
    std::string name;
    TranslatorRole role = TranslatorRole::Aligned;
};

// One aligned unit: source text plus per-translator renderings. The anchor
// translator's entry is always present and non-null (possibly empty for
// structural markers); aligned translators may be null (no match found) or
// absent entirely (not yet aligned).
struct Segment {
    SegmentId id;
    std::string source_text;
    std::map<std::string, std::optional<std::string>> translations;

    bool has_entry(const std::string& translator) const {
        return translations.find(translator) != translations.end();
    }
    const std::optional<std::string>* entry(const std::string& translator) const {
        auto it = translations.find(translator);
        return it == translations.end() ? nullptr : &it->second;
    }
};

struct Passage {
    PassageId id;
    std::vector<Segment> segments;
};

struct AlignedCorpus {
    std::vector<TranslatorId> translators;
    std::vector<Passage> passages;
    std::map<std::string, std::string> provenance;

    const TranslatorId& anchor() const {
        for (const auto& t : translators)
            if (t.role == TranslatorRole::SegmentationAnchor) return t;
        throw ValidationError("corpus has no segmentation anchor");
    }

    std::vector<std::string> aligned_translator_names() const {
        std::vector<std::string> names;
        for (const auto& t : translators)
            if (t.role == TranslatorRole::Aligned) names.push_back(t.name);
        return names;
    }

    bool has_translator(const std::string& name) const {
        return std::any_of(translators.begin(), translators.end(),
                           [&](const TranslatorId& t) { return t.name == name; });
    }

    std::size_t segment_count() const {
        std::size_t n = 0;
        for (const auto& p : passages) n += p.segments.size();
        return n;
    }
};

/// Token = maximal run of non-whitespace characters.
inline std::size_t approx_token_count(std::string_view text) {
    // Byte-level scan: multi-byte UTF-8 sequences never contain ASCII
    // whitespace bytes, and the folded Unicode spaces below are the only
    // non-ASCII separators recognized anywhere in this toolkit.
    std::size_t count = 0;
    bool in_token = false;
    std::size_t pos = 0;
    auto is_space_cp = [](char32_t cp) {
        return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
               cp == U'\v' || cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F ||
               cp == 0x205F || cp == 0x3000;
    };
    while (pos < text.size()) {
        char c = text[pos];
        bool space;
        if (static_cast<unsigned char>(c) < 0x80) {
            space = (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v');
            ++pos;
        } else {
            std::size_t p = pos;
            char32_t cp = utf8::decode_next(text, p);
            space = is_space_cp(cp);
            pos = p;
        }
        if (space) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++count;
        }
    }
    return count;
}

inline std::vector<Passage> group_segments_into_passages(std::vector<Segment> segments) {
    std::sort(segments.begin(), segments.end(),
              [](const Segment& a, const Segment& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].id == segments[i - 1].id)
            throw ValidationError("duplicate-segment-id: " + segments[i].id.raw());
    }
    std::map<std::string, Passage> by_passage;
    for (auto& seg : segments) {
        PassageId pid = PassageId::of(seg.id);
        auto& passage = by_passage[pid.raw];
        passage.id = pid;
        passage.segments.push_back(std::move(seg));
    }
    std::vector<Passage> out;
    out.reserve(by_passage.size());
    for (auto& [raw, passage] : by_passage) {
        std::sort(passage.segments.begin(), passage.segments.end(),
                  [](const Segment& a, const Segment& b) { return a.id < b.id; });
        out.push_back(std::move(passage));
    }
    return out;
}

/// Non-empty source texts of a passage joined with single spaces.
inline std::string passage_source_text(const Passage& passage) {
    std::string out;
    for (const auto& seg : passage.segments) {
        if (seg.source_text.empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += seg.source_text;
    }
    return out;
}

/// One translator's rendering of a passage: non-null, non-empty segment
/// texts joined with single spaces.
inline std::string passage_translation_text(const Passage& passage, const std::string& translator) {
    std::string out;
    for (const auto& seg : passage.segments) {
        const auto* e = seg.entry(translator);
        if (e == nullptr || !e->has_value() || (*e)->empty()) continue;
        if (!out.empty()) out.push_back(' ');
        out += **e;
    }
    return out;
}

// Full structural validation; load/save and the pipeline stages call this.
inline void validate_corpus(const AlignedCorpus& corpus) {
    int anchors = 0;
    for (const auto& t : corpus.translators) {
        if (t.name.empty()) throw ValidationError("translator with empty name");
        if (t.role == TranslatorRole::SegmentationAnchor) ++anchors;
        std::size_t dups = 0;
        for (const auto& u : corpus.translators)
            if (u.name == t.name) ++dups;
        if (dups != 1) throw ValidationError("duplicate translator name: " + t.name);
    }
    if (anchors != 1) throw ValidationError("corpus must have exactly one segmentation anchor");
    const std::string anchor_name = corpus.anchor().name;
    for (std::size_t i = 0; i < corpus.passages.size(); ++i) {
        const Passage& p = corpus.passages[i];
        if (p.segments.empty()) throw ValidationError("empty passage " + p.id.raw);
        if (i > 0 && !(corpus.passages[i - 1].id < p.id))
            throw ValidationError("passages not sorted at " + p.id.raw);
        for (std::size_t j = 0; j < p.segments.size(); ++j) {
            const Segment& s = p.segments[j];
            if (PassageId::of(s.id).raw != p.id.raw)
                throw ValidationError("segment " + s.id.raw() + " not in passage " + p.id.raw);
            if (j > 0 && !(p.segments[j - 1].id < s.id))
                throw ValidationError("segments not sorted at " + s.id.raw());
            const auto* anchor_entry = s.entry(anchor_name);
            if (anchor_entry == nullptr || !anchor_entry->has_value())
                throw ValidationError("segment " + s.id.raw() + " missing anchor translation");
            for (const auto& [name, value] : s.translations) {
                if (!corpus.has_translator(name))
                    throw ValidationError("segment " + s.id.raw() + " has entry for unknown translator " +
                                          name);
            }
        }
    }
}

} // namespace palibench
