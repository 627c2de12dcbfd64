#include <doctest.h>

#include "palibench/curation.hpp"

using namespace palibench;

namespace {

const std::vector<TranslatorId> kTranslators = {
    {"alder", TranslatorRole::SegmentationAnchor},
    {"birch", TranslatorRole::Aligned},
    {"cedar", TranslatorRole::Aligned},
};

std::string long_text(const std::string& stem, std::size_t chars) {
    std::string out;
    int i = 0;
    while (out.size() < chars) {
        if (!out.empty()) out += ' ';
        out += stem + std::to_string(i++);
    }
    return out;
}

Passage make_passage(const std::string& pid, int segments = 2) {
    Passage p;
    p.id = PassageId{pid};
    for (int i = 1; i <= segments; ++i) {
        Segment s;
        s.id = parse_segment_id(pid + "." + std::to_string(i));
        s.source_text = long_text("pali" + pid + "s" + std::to_string(i), 60);
        s.translations["alder"] = long_text("alderwort" + pid + "x" + std::to_string(i), 70);
        s.translations["birch"] = long_text("birchleaf" + pid + "y" + std::to_string(i), 70);
        s.translations["cedar"] = long_text("cedarbark" + pid + "z" + std::to_string(i), 70);
        p.segments.push_back(std::move(s));
    }
    return p;
}

VerificationIndex verbatim_records(const std::vector<Passage>& passages) {
    std::vector<VerificationRecord> records;
    for (const auto& p : passages)
        for (const auto& s : p.segments)
            for (const auto& t : {"birch", "cedar"})
                if (s.entry(t) != nullptr && s.entry(t)->has_value())
                    records.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    return index_verification_records(records);
}

} // namespace

TEST_CASE("clean passage has no violations") {
    Passage p = make_passage("mn1:1");
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.retained());
}

TEST_CASE("null translation flags incomplete_data") {
    Passage p = make_passage("mn1:1");
    p.segments[0].translations["birch"] = std::nullopt;
    // keep lengths balanced so only the one criterion fires
    p.segments[1].translations["birch"] = long_text("birchleaf", 140);
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations == std::set<FilterCriterion>{FilterCriterion::IncompleteData});
}

TEST_CASE("suspicious record flags verification_failure") {
    Passage p = make_passage("mn1:1");
    std::vector<VerificationRecord> recs;
    for (const auto& s : p.segments)
        for (const auto& t : {"birch", "cedar"}) recs.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    recs[0].category = VerificationCategory::Suspicious;
    FilterVerdict v =
        filter_passage(p, kTranslators, index_verification_records(recs), FilterThresholds{});
    CHECK(v.violations == std::set<FilterCriterion>{FilterCriterion::VerificationFailure});
}

TEST_CASE("short rendering flags insufficient_length") {
    Passage p = make_passage("mn1:1");
    p.segments[0].translations["cedar"] = std::string("short one");
    p.segments[1].translations["cedar"] = std::string("still short, way under limit");
    // cedar ~38 chars < 100; others ~140; ratio 141/38 > 2 would also fire, so pad cedar to 95
    p.segments[1].translations["cedar"] = long_text("cedar", 85);
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations == std::set<FilterCriterion>{FilterCriterion::InsufficientLength});
}

TEST_CASE("identical renderings flag excessive_similarity") {
    Passage p = make_passage("mn1:1");
    for (auto& s : p.segments) s.translations["cedar"] = s.entry("birch")->value();
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations == std::set<FilterCriterion>{FilterCriterion::ExcessiveSimilarity});
}

TEST_CASE("length spread flags anomalous_length_ratio at 300/140") {
    Passage p = make_passage("mn1:1");
    p.segments[0].translations["alder"] = long_text("alderwort", 150);
    p.segments[1].translations["alder"] = long_text("alderroot", 149); // total 300 with join space
    p.segments[0].translations["birch"] = long_text("birchleaf", 70);
    p.segments[1].translations["birch"] = long_text("birchroot", 69); // total 140
    p.segments[0].translations["cedar"] = long_text("cedarbark", 140);
    p.segments[1].translations["cedar"] = long_text("cedarroot", 140);
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations == std::set<FilterCriterion>{FilterCriterion::AnomalousLengthRatio});
}

TEST_CASE("repeated segment text flags internal_duplication") {
    Passage p = make_passage("mn1:1");
    p.segments[1].translations["birch"] = p.segments[0].entry("birch")->value();
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations.count(FilterCriterion::InternalDuplication) == 1);
}

TEST_CASE("containment also counts as internal duplication, short repeats do not") {
    Passage p = make_passage("mn1:1");
    std::string base = p.segments[0].entry("birch")->value();
    p.segments[1].translations["birch"] = base.substr(0, 40); // long contained prefix
    FilterVerdict v = filter_passage(p, kTranslators, verbatim_records({p}), FilterThresholds{});
    CHECK(v.violations.count(FilterCriterion::InternalDuplication) == 1);

    Passage q = make_passage("mn1:2");
    q.segments[0].translations["birch"] = std::string("Yes, sir. ") + long_text("birchA", 80);
    q.segments[1].translations["birch"] = std::string("Yes, sir. ") + long_text("birchB", 80);
    FilterVerdict w = filter_passage(q, kTranslators, verbatim_records({q}), FilterThresholds{});
    CHECK(w.violations.count(FilterCriterion::InternalDuplication) == 0);
}

TEST_CASE("missing verification record is an error") {
    Passage p = make_passage("mn1:1");
    CHECK_THROWS_AS(filter_passage(p, kTranslators, VerificationIndex{}, FilterThresholds{}),
                    ValidationError);
}

TEST_CASE("filter_corpus: clean fixture keeps everything with zero counts") {
    AlignedCorpus corpus;
    corpus.translators = kTranslators;
    for (int i = 1; i <= 10; ++i) corpus.passages.push_back(make_passage("mn1:" + std::to_string(i)));
    std::sort(corpus.passages.begin(), corpus.passages.end(),
              [](const Passage& a, const Passage& b) { return a.id < b.id; });
    std::vector<VerificationRecord> records;
    for (const auto& p : corpus.passages)
        for (const auto& s : p.segments)
            for (const auto& t : {"birch", "cedar"})
                records.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    FilterOutcome out = filter_corpus(corpus, records, FilterThresholds{});
    CHECK(out.retained.size() == 10);
    for (const auto& [criterion, count] : out.report.criterion_counts) CHECK(count == 0);
}

TEST_CASE("double violation increments both counters, excluded once") {
    AlignedCorpus corpus;
    corpus.translators = kTranslators;
    Passage bad = make_passage("mn1:1");
    bad.segments[0].translations["birch"] = std::nullopt;               // incomplete
    bad.segments[1].translations["cedar"] = std::string("tiny");        // insufficient + ratio risk
    corpus.passages = {bad, make_passage("mn1:2")};
    std::vector<VerificationRecord> records;
    for (const auto& p : corpus.passages)
        for (const auto& s : p.segments)
            for (const auto& t : {"birch", "cedar"})
                if (s.entry(t)->has_value())
                    records.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    FilterOutcome out = filter_corpus(corpus, records, FilterThresholds{});
    CHECK(out.retained.size() == 1);
    CHECK(out.report.criterion_counts[FilterCriterion::IncompleteData] == 1);
    CHECK(out.report.criterion_counts[FilterCriterion::InsufficientLength] == 1);
    std::size_t total = 0;
    for (const auto& [criterion, count] : out.report.criterion_counts) total += count;
    CHECK(total >= 1); // non-exclusive counts at least cover the excluded passage
}

TEST_CASE("tightening min_chars never grows the retained set") {
    AlignedCorpus corpus;
    corpus.translators = kTranslators;
    for (int i = 1; i <= 6; ++i) {
        Passage p = make_passage("mn1:" + std::to_string(i));
        corpus.passages.push_back(p);
    }
    // shrink some renderings to varying sizes
    corpus.passages[1].segments[0].translations["cedar"] = long_text("c", 30);
    corpus.passages[1].segments[1].translations["cedar"] = long_text("c", 75);
    corpus.passages[3].segments[0].translations["birch"] = long_text("b", 60);
    corpus.passages[3].segments[1].translations["birch"] = long_text("b", 90);
    std::vector<VerificationRecord> records;
    for (const auto& p : corpus.passages)
        for (const auto& s : p.segments)
            for (const auto& t : {"birch", "cedar"})
                records.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    std::size_t prev = corpus.passages.size() + 1;
    for (std::size_t min_chars : {50, 100, 150, 200, 400}) {
        FilterThresholds t;
        t.min_chars = min_chars;
        t.max_length_ratio = 100.0; // isolate the length criterion
        FilterOutcome out = filter_corpus(corpus, records, t);
        CHECK(out.retained.size() <= prev);
        prev = out.retained.size();
    }
}

TEST_CASE("dedup removes the alphabetically later of identical sources") {
    std::vector<Passage> passages = {make_passage("mn1:1"), make_passage("mn1:2")};
    for (std::size_t i = 0; i < passages[0].segments.size(); ++i)
        passages[1].segments[i].source_text = passages[0].segments[i].source_text;
    DedupOutcome out = deduplicate(passages, FilterThresholds{});
    REQUIRE(out.final_passages.size() == 1);
    CHECK(out.final_passages[0].id.raw == "mn1:1");
    REQUIRE(out.removals.size() == 1);
    CHECK(out.removals[0].removed.raw == "mn1:2");
    CHECK(out.removals[0].kept.raw == "mn1:1");
    CHECK(out.removals[0].similarity > 0.85);
}

TEST_CASE("similarity chain keeps the first, removals all cite it") {
    std::vector<Passage> passages = {make_passage("mn1:1"), make_passage("mn1:2"),
                                     make_passage("mn1:3")};
    for (auto& p : passages)
        for (std::size_t i = 0; i < p.segments.size(); ++i)
            p.segments[i].source_text = passages[0].segments[i].source_text;
    DedupOutcome out = deduplicate(passages, FilterThresholds{});
    REQUIRE(out.final_passages.size() == 1);
    CHECK(out.final_passages[0].id.raw == "mn1:1");
    REQUIRE(out.removals.size() == 2);
    for (const auto& r : out.removals) {
        CHECK(r.kept.raw == "mn1:1");
        CHECK(r.kept.raw < r.removed.raw); // keep-first property
        CHECK(r.similarity > 0.85);
    }
}

TEST_CASE("dedup is idempotent") {
    std::vector<Passage> passages = {make_passage("mn1:1"), make_passage("mn1:2"),
                                     make_passage("mn2:1")};
    passages[1].segments[0].source_text = passages[0].segments[0].source_text;
    passages[1].segments[1].source_text = passages[0].segments[1].source_text;
    DedupOutcome first = deduplicate(passages, FilterThresholds{});
    DedupOutcome second = deduplicate(first.final_passages, FilterThresholds{});
    CHECK(second.removals.empty());
    CHECK(second.final_passages.size() == first.final_passages.size());
}

TEST_CASE("curation report identities hold") {
    AlignedCorpus corpus;
    corpus.translators = kTranslators;
    corpus.passages = {make_passage("mn1:1"), make_passage("mn1:2"), make_passage("mn1:3")};
    for (std::size_t i = 0; i < corpus.passages[0].segments.size(); ++i)
        corpus.passages[2].segments[i].source_text = corpus.passages[0].segments[i].source_text;
    std::vector<VerificationRecord> records;
    for (const auto& p : corpus.passages)
        for (const auto& s : p.segments)
            for (const auto& t : {"birch", "cedar"})
                records.push_back({s.id, t, VerificationCategory::Verbatim, {}});
    std::vector<Passage> final_passages;
    CurationReport report =
        curate(corpus, records, FilterThresholds{}, NormalizationProfile{}, &final_passages);
    CHECK(report.retained_after_filter.size() == 3);
    CHECK(report.removed_by_dedup.size() == 1);
    CHECK(report.final_passages.size() == 2);
    CHECK(final_passages.size() == 2);
}
