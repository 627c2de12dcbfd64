#include <doctest.h>

#include <filesystem>
#include <random>

#include "palibench/bench.hpp"
#include "support/fixtures.hpp"

using namespace palibench;
using fixtures::ScriptedChatClient;

namespace {

Passage passage_with_tokens(const std::string& pid, std::size_t tokens) {
    Passage p;
    p.id = PassageId{pid};
    Segment s;
    s.id = parse_segment_id(pid + ".1");
    std::string text;
    for (std::size_t i = 0; i < tokens; ++i) {
        if (!text.empty()) text += ' ';
        text += "tok" + std::to_string(i);
    }
    s.source_text = text;
    s.translations["alder"] = "anchor";
    p.segments.push_back(std::move(s));
    return p;
}

std::string echo_translation_response(const ChatRequest& request) {
    auto payload = nlohmann::ordered_json::parse(request.user_payload);
    nlohmann::ordered_json reply = nlohmann::ordered_json::object();
    for (auto it = payload.begin(); it != payload.end(); ++it)
        reply[it.key()] = it.value().get<std::string>();
    return reply.dump();
}

} // namespace

TEST_CASE("three equal passages fit one budgeted batch") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 1000),
                               passage_with_tokens("mn1:2", 1000),
                               passage_with_tokens("mn1:3", 1000)};
    auto batches = build_translation_batches(ps, 3000);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0].items.size() == 3);
    CHECK(batches[0].token_count == 3000);
}

TEST_CASE("greedy split when the budget would overflow") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 2000),
                               passage_with_tokens("mn1:2", 2000)};
    auto batches = build_translation_batches(ps, 3000);
    REQUIRE(batches.size() == 2);
    CHECK(batches[0].items.size() == 1);
    CHECK(batches[1].items.size() == 1);
}

TEST_CASE("an oversize passage travels alone, flagged") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 100),
                               passage_with_tokens("mn1:2", 5000),
                               passage_with_tokens("mn1:3", 100)};
    auto batches = build_translation_batches(ps, 3000);
    REQUIRE(batches.size() == 3);
    CHECK(batches[1].items.size() == 1);
    CHECK(batches[1].oversize);
    CHECK(batches[1].items[0].first == "mn1:2");
    CHECK(!batches[0].oversize);
}

TEST_CASE("randomized packing satisfies budget with the single-oversize exception") {
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> count(1, 40);
    std::uniform_int_distribution<int> tokens(1, 5000);
    for (int round = 0; round < 30; ++round) {
        std::vector<Passage> ps;
        int n = count(rng);
        for (int i = 0; i < n; ++i)
            ps.push_back(passage_with_tokens("mn1:" + std::to_string(i + 1), tokens(rng)));
        std::size_t budget = 3000;
        auto batches = build_translation_batches(ps, budget);
        std::vector<std::string> all_ids;
        for (const auto& b : batches) {
            REQUIRE(!b.items.empty());
            if (!b.oversize) CHECK(b.token_count <= budget);
            if (b.oversize) {
                CHECK(b.items.size() == 1);
                CHECK(b.token_count > budget);
            }
            for (const auto& [id, text] : b.items) all_ids.push_back(id);
        }
        // partition: concatenating batches recovers the passage order
        REQUIRE(all_ids.size() == ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) CHECK(all_ids[i] == ps[i].id.raw);
    }
}

TEST_CASE("echo system covers all passages with identical outputs") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 10), passage_with_tokens("mn1:2", 10)};
    ScriptedChatClient client;
    client.set_default(echo_translation_response);
    RunnerLog log;
    SystemRun run = run_system("echo", ps, client, RetryPolicy{3}, RunnerConfig{}, nullptr, &log);
    CHECK(run.outputs.size() == 2);
    CHECK(run.missing.empty());
    for (const auto& p : ps) CHECK(run.outputs.at(p.id.raw) == passage_source_text(p));
}

TEST_CASE("fenced response is stripped and parsed") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 5)};
    ScriptedChatClient client;
    client.push_handler([](const ChatRequest& r) {
        return "```json\n" + echo_translation_response(r) + "\n```";
    });
    SystemRun run = run_system("echo", ps, client, RetryPolicy{1}, RunnerConfig{});
    CHECK(run.outputs.size() == 1);
}

TEST_CASE("missing key retries then records the passage as missing") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 5), passage_with_tokens("mn1:2", 5)};
    ScriptedChatClient client;
    client.set_default([](const ChatRequest& r) {
        auto payload = nlohmann::ordered_json::parse(r.user_payload);
        nlohmann::ordered_json reply = nlohmann::ordered_json::object();
        bool first = true;
        for (auto it = payload.begin(); it != payload.end(); ++it) {
            if (!first) break; // omit every key but the first
            reply[it.key()] = "text";
            first = false;
        }
        return reply.dump();
    });
    RunnerLog log;
    SystemRun run = run_system("flaky", ps, client, RetryPolicy{3}, RunnerConfig{}, nullptr, &log);
    CHECK(client.calls() == 3);
    CHECK(run.outputs.empty());
    CHECK(run.missing.size() == 2);
    CHECK(!log.failures.empty());
}

TEST_CASE("reordered keys are rejected") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 5), passage_with_tokens("mn1:2", 5)};
    ScriptedChatClient client;
    client.set_default([](const ChatRequest& r) {
        auto payload = nlohmann::ordered_json::parse(r.user_payload);
        std::vector<std::string> keys;
        for (auto it = payload.begin(); it != payload.end(); ++it) keys.push_back(it.key());
        nlohmann::ordered_json reply = nlohmann::ordered_json::object();
        for (auto it = keys.rbegin(); it != keys.rend(); ++it) reply[*it] = "x";
        return reply.dump();
    });
    SystemRun run = run_system("reorder", ps, client, RetryPolicy{2}, RunnerConfig{});
    CHECK(run.outputs.empty());
    CHECK(run.missing.size() == 2);
}

TEST_CASE("double quotes in values are repaired to single quotes and logged") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 5)};
    ScriptedChatClient client;
    client.push_handler([](const ChatRequest& r) {
        auto payload = nlohmann::ordered_json::parse(r.user_payload);
        nlohmann::ordered_json reply = nlohmann::ordered_json::object();
        for (auto it = payload.begin(); it != payload.end(); ++it)
            reply[it.key()] = "he said \"hello\" loudly";
        return reply.dump();
    });
    RunnerLog log;
    SystemRun run = run_system("quoted", ps, client, RetryPolicy{1}, RunnerConfig{}, nullptr, &log);
    CHECK(run.outputs.at("mn1:1") == "he said 'hello' loudly");
    CHECK(log.quote_repairs.size() == 1);
}

TEST_CASE("resume skips passages that already have outputs") {
    std::vector<Passage> ps = {passage_with_tokens("mn1:1", 5), passage_with_tokens("mn1:2", 5)};
    ScriptedChatClient client;
    client.set_default(echo_translation_response);
    SystemRun first = run_system("echo", ps, client, RetryPolicy{1}, RunnerConfig{});
    int calls = client.calls();
    SystemRun second = run_system("echo", ps, client, RetryPolicy{1}, RunnerConfig{}, &first);
    CHECK(client.calls() == calls); // zero new requests
    CHECK(second.outputs == first.outputs);
}

TEST_CASE("system run round-trips through its file format") {
    SystemRun run;
    run.system = "echo";
    run.outputs = {{"mn1:1", "first"}, {"mn1:2", "second"}};
    run.missing = {"mn1:3"};
    run.metadata = {{"model", "echo"}, {"prompt_version", "v1"}};
    auto path = std::filesystem::temp_directory_path() / "palibench_run.jsonl";
    run.save(path.string());
    SystemRun loaded = SystemRun::load(path.string());
    CHECK(loaded.system == run.system);
    CHECK(loaded.outputs == run.outputs);
    CHECK(loaded.missing == run.missing);
    CHECK(loaded.metadata == run.metadata);
    std::filesystem::remove(path);
}

namespace {

// Deterministic synthetic embedder: hashes text into a smooth unit-ish
// vector, so equal texts agree and different texts disagree.
class HashEmbedder : public Embedder {
  public:
    explicit HashEmbedder(std::size_t dim = 16) : dim_(dim) {}
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        calls_ += static_cast<int>(texts.size());
        std::vector<EmbeddingVector> out;
        for (const auto& t : texts) {
            std::seed_seq seed(t.begin(), t.end());
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> coord(0.2, 1.0); // positive: no cancellation
            EmbeddingVector v;
            for (std::size_t i = 0; i < dim_; ++i) v.values.push_back(coord(rng));
            out.push_back(std::move(v));
        }
        return out;
    }
    int calls() const { return calls_; }

  private:
    std::size_t dim_;
    int calls_ = 0;
};

AlignedCorpus tiny_benchmark() {
    AlignedCorpus corpus;
    corpus.translators = {{"alder", TranslatorRole::SegmentationAnchor},
                          {"birch", TranslatorRole::Aligned},
                          {"cedar", TranslatorRole::Aligned}};
    for (int i = 1; i <= 2; ++i) {
        Passage p;
        p.id = PassageId{"mn1:" + std::to_string(i)};
        Segment s;
        s.id = parse_segment_id(p.id.raw + ".1");
        s.source_text = "pali source " + std::to_string(i);
        s.translations["alder"] = "the alder rendering of passage " + std::to_string(i);
        s.translations["birch"] = "a birch version for passage " + std::to_string(i);
        s.translations["cedar"] = "cedar text about passage " + std::to_string(i);
        p.segments.push_back(std::move(s));
        corpus.passages.push_back(std::move(p));
    }
    return corpus;
}

} // namespace

TEST_CASE("system identical to one reference translator scores perfectly") {
    AlignedCorpus benchmark = tiny_benchmark();
    SystemRun run;
    run.system = "copycat";
    for (const auto& p : benchmark.passages)
        run.outputs[p.id.raw] = passage_translation_text(p, "birch");
    HashEmbedder embedder;
    GeometryCache geometry;
    SystemEvaluation eval =
        evaluate_system(run, benchmark, embedder, geometry, nullptr, nullptr, EvalConfig{});
    CHECK(eval.row.sim_best == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval.row.chrfpp == doctest::Approx(100.0));
    CHECK(eval.row.bleu == doctest::Approx(100.0));
    CHECK(eval.row.outlier_pct == doctest::Approx(0.0));
    CHECK(eval.row.closest_pct.at("birch") == doctest::Approx(100.0));
    CHECK(!eval.row.external_valid);
    for (const auto& ps : eval.passages) CHECK(ps.closest == "birch");
}

TEST_CASE("two-passage aggregates equal hand-computed means") {
    AlignedCorpus benchmark = tiny_benchmark();
    SystemRun run;
    run.system = "mixed";
    run.outputs[benchmark.passages[0].id.raw] =
        passage_translation_text(benchmark.passages[0], "birch");
    run.outputs[benchmark.passages[1].id.raw] = "completely unrelated words here";
    HashEmbedder embedder;
    GeometryCache geometry;
    SystemEvaluation eval =
        evaluate_system(run, benchmark, embedder, geometry, nullptr, nullptr, EvalConfig{});
    REQUIRE(eval.passages.size() == 2);
    double expect_sim = (eval.passages[0].sim_best + eval.passages[1].sim_best) / 2.0;
    CHECK(eval.row.sim_best == doctest::Approx(expect_sim).epsilon(1e-12));
    double expect_len = (eval.passages[0].length_ratio + eval.passages[1].length_ratio) / 2.0;
    CHECK(eval.row.length_ratio == doctest::Approx(expect_len).epsilon(1e-12));
    CHECK(eval.passages[0].sim_best == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("external scores aggregate when a scorer is wired in") {
    AlignedCorpus benchmark = tiny_benchmark();
    SystemRun run;
    run.system = "scored";
    for (const auto& p : benchmark.passages)
        run.outputs[p.id.raw] = passage_translation_text(p, "cedar");
    HashEmbedder embedder;
    GeometryCache geometry;
    ConstantScorer scorer(0.7);
    SystemEvaluation eval =
        evaluate_system(run, benchmark, embedder, geometry, &scorer, nullptr, EvalConfig{});
    CHECK(eval.row.external_valid);
    CHECK(eval.row.external_avg == doctest::Approx(0.7));
    CHECK(eval.row.external_best == doctest::Approx(0.7));
}

TEST_CASE("insufficient coverage is an error; lower min_coverage admits it") {
    AlignedCorpus benchmark = tiny_benchmark();
    SystemRun run;
    run.system = "partial";
    run.outputs[benchmark.passages[0].id.raw] =
        passage_translation_text(benchmark.passages[0], "birch");
    HashEmbedder embedder;
    GeometryCache geometry;
    CHECK_THROWS_AS(
        evaluate_system(run, benchmark, embedder, geometry, nullptr, nullptr, EvalConfig{}),
        ValidationError);
    EvalConfig relaxed;
    relaxed.min_coverage = 0.5;
    SystemEvaluation eval =
        evaluate_system(run, benchmark, embedder, geometry, nullptr, nullptr, relaxed);
    CHECK(eval.row.coverage == doctest::Approx(0.5));
    CHECK(eval.passages.size() == 1);
}

TEST_CASE("caching embedder makes re-evaluation a provider no-op") {
    AlignedCorpus benchmark = tiny_benchmark();
    SystemRun run;
    run.system = "echo";
    for (const auto& p : benchmark.passages)
        run.outputs[p.id.raw] = passage_translation_text(p, "alder");
    HashEmbedder inner;
    CachingEmbedder cached(inner);
    GeometryCache geometry;
    evaluate_system(run, benchmark, cached, geometry, nullptr, nullptr, EvalConfig{});
    int calls_first = inner.calls();
    CHECK(calls_first > 0);
    evaluate_system(run, benchmark, cached, geometry, nullptr, nullptr, EvalConfig{});
    CHECK(inner.calls() == calls_first); // geometry + embedding caches absorb everything
}

TEST_CASE("closest translator distribution sums to 100") {
    std::vector<PassageScores> ps(4);
    ps[0].closest = "a";
    ps[1].closest = "a";
    ps[2].closest = "b";
    ps[3].closest = "c";
    auto dist = closest_translator_distribution(ps, {"a", "b", "c"});
    CHECK(dist.at("a") == doctest::Approx(50.0));
    CHECK(dist.at("b") == doctest::Approx(25.0));
    CHECK(dist.at("c") == doctest::Approx(25.0));
    double sum = 0;
    for (const auto& [name, v] : dist) sum += v;
    CHECK(sum == doctest::Approx(100.0));
}
