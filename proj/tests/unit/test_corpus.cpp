#include <doctest.h>

#include <random>
#include <set>

#include "palibench/corpus.hpp"

using namespace palibench;

namespace {

Segment seg(const std::string& id, const std::string& source = "src") {
    Segment s;
    s.id = parse_segment_id(id);
    s.source_text = source;
    s.translations["anchor"] = std::string("text of ") + id;
    return s;
}

} // namespace

TEST_CASE("grouping collects shared prefixes into one passage") {
    auto passages = group_segments_into_passages({seg("mn2:1.1"), seg("mn2:1.2"), seg("mn2:1.3")});
    REQUIRE(passages.size() == 1);
    CHECK(passages[0].id.raw == "mn2:1");
    CHECK(passages[0].segments.size() == 3);
}

TEST_CASE("grouping single segment") {
    auto passages = group_segments_into_passages({seg("an1:1")});
    REQUIRE(passages.size() == 1);
    CHECK(passages[0].id.raw == "an1:1");
    CHECK(passages[0].segments.size() == 1);
}

TEST_CASE("grouping splits distinct prefixes") {
    auto passages = group_segments_into_passages({seg("mn2:1.1"), seg("mn2:2.1"), seg("mn3:1.1")});
    REQUIRE(passages.size() == 3);
    CHECK(passages[0].id.raw == "mn2:1");
    CHECK(passages[1].id.raw == "mn2:2");
    CHECK(passages[2].id.raw == "mn3:1");
}

TEST_CASE("grouping rejects duplicate ids") {
    CHECK_THROWS_AS(group_segments_into_passages({seg("mn2:1.1"), seg("mn2:1.1")}),
                    ValidationError);
}

TEST_CASE("grouping is a partition") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> doc_pick(0, 2);
    std::uniform_int_distribution<int> major(1, 5);
    std::uniform_int_distribution<int> minor(1, 9);
    const char* docs[] = {"mn1", "mn2", "sn5"};
    for (int round = 0; round < 50; ++round) {
        std::vector<Segment> segs;
        std::set<std::string> ids;
        int n = 1 + round % 30;
        while (static_cast<int>(segs.size()) < n) {
            std::string raw = std::string(docs[doc_pick(rng)]) + ":" +
                              std::to_string(major(rng)) + "." + std::to_string(minor(rng));
            if (!ids.insert(raw).second) continue;
            segs.push_back(seg(raw));
        }
        auto passages = group_segments_into_passages(segs);
        std::set<std::string> seen;
        std::set<std::string> prefixes;
        for (const auto& p : passages) {
            REQUIRE(!p.segments.empty());
            for (const auto& s : p.segments) {
                CHECK(PassageId::of(s.id).raw == p.id.raw);
                CHECK(seen.insert(s.id.raw()).second); // pairwise disjoint
            }
        }
        for (const auto& s : segs) prefixes.insert(PassageId::of(s.id).raw);
        CHECK(seen.size() == ids.size());             // union covers input
        CHECK(passages.size() == prefixes.size());    // one passage per prefix
        for (std::size_t i = 1; i < passages.size(); ++i)
            CHECK(passages[i - 1].id < passages[i].id);
    }
}

TEST_CASE("approx_token_count") {
    CHECK(approx_token_count("") == 0);
    CHECK(approx_token_count("evam me sutam") == 3);
    CHECK(approx_token_count("   ") == 0);

    // oracle: manual scanner over the same text
    std::string text = "one\ttwo  three\nfour\r\n five\tsix   seven";
    std::size_t oracle = 0;
    bool in_tok = false;
    for (char c : text) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (ws)
            in_tok = false;
        else if (!in_tok) {
            in_tok = true;
            ++oracle;
        }
    }
    CHECK(approx_token_count(text) == oracle);
    CHECK(oracle == 7);
}

TEST_CASE("passage text joins with single spaces, skipping nulls and empties") {
    Passage p;
    p.id = PassageId{"mn2:1"};
    Segment a = seg("mn2:1.1", "alpha");
    a.translations["other"] = std::string("first");
    Segment b = seg("mn2:1.2", "");
    b.translations["other"] = std::nullopt;
    Segment c = seg("mn2:1.3", "gamma");
    c.translations["other"] = std::string("third");
    p.segments = {a, b, c};
    CHECK(passage_source_text(p) == "alpha gamma");
    CHECK(passage_translation_text(p, "other") == "first third");
    CHECK(passage_translation_text(p, "anchor") ==
          "text of mn2:1.1 text of mn2:1.2 text of mn2:1.3");
}

TEST_CASE("validate_corpus catches structural breakage") {
    AlignedCorpus corpus;
    corpus.translators = {{"anchor", TranslatorRole::SegmentationAnchor},
                          {"other", TranslatorRole::Aligned}};
    Segment a = seg("mn1:1.1");
    a.translations["other"] = std::string("x");
    corpus.passages = group_segments_into_passages({a});
    CHECK_NOTHROW(validate_corpus(corpus));

    AlignedCorpus no_anchor = corpus;
    no_anchor.translators[0].role = TranslatorRole::Aligned;
    CHECK_THROWS_AS(validate_corpus(no_anchor), ValidationError);

    AlignedCorpus missing_anchor_text = corpus;
    missing_anchor_text.passages[0].segments[0].translations.erase("anchor");
    CHECK_THROWS_AS(validate_corpus(missing_anchor_text), ValidationError);

    AlignedCorpus null_anchor = corpus;
    null_anchor.passages[0].segments[0].translations["anchor"] = std::nullopt;
    CHECK_THROWS_AS(validate_corpus(null_anchor), ValidationError);
}
