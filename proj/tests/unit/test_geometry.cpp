#include <doctest.h>

#include <cmath>
#include <random>

#include "palibench/geometry.hpp"

using namespace palibench;

namespace {

EmbeddingVector vec(std::initializer_list<double> v) { return EmbeddingVector{{v}}; }

} // namespace

TEST_CASE("cosine basics") {
    CHECK(cosine(vec({1, 2, 3}), vec({1, 2, 3})) == doctest::Approx(1.0));
    CHECK(cosine(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
    // dot 32, norms sqrt(14) and sqrt(77)
    CHECK(cosine(vec({1, 2, 3}), vec({4, 5, 6})) ==
          doctest::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-9));
    CHECK(cosine(vec({1, 2, 3}), vec({4, 5, 6})) == doctest::Approx(0.97463).epsilon(1e-4));
}

TEST_CASE("cosine errors") {
    CHECK_THROWS_AS(cosine(vec({1, 2}), vec({1, 2, 3})), ValidationError);
    CHECK_THROWS_AS(cosine(vec({0, 0}), vec({1, 2})), ValidationError);
}

TEST_CASE("identical references are degenerate with zero drift") {
    std::map<std::string, EmbeddingVector> refs = {
        {"a", vec({1, 1, 0})}, {"b", vec({1, 1, 0})}, {"c", vec({1, 1, 0})}};
    ReferenceGeometry geo = reference_geometry(refs);
    for (double d : geo.drifts) CHECK(d == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(geo.mean_drift == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(geo.degenerate);
}

TEST_CASE("2-D reference pair at right angles") {
    std::map<std::string, EmbeddingVector> refs = {{"a", vec({1, 0})}, {"b", vec({0, 1})}};
    ReferenceGeometry geo = reference_geometry(refs);
    // centroid (0.5, 0.5); each drift = 1 - cos45
    double expect = 1.0 - std::cos(M_PI / 4);
    CHECK(geo.drifts[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(geo.drifts[1] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(geo.mean_drift == doctest::Approx(0.29289).epsilon(1e-4));
    CHECK(!geo.degenerate);
}

TEST_CASE("machine on the centroid direction has zero drift") {
    std::map<std::string, EmbeddingVector> refs = {{"a", vec({1, 0})}, {"b", vec({0, 1})}};
    ReferenceGeometry geo = reference_geometry(refs);
    EmbeddingScores s = passage_embedding_scores(vec({1, 1}), geo);
    CHECK(s.sim_centroid == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.normalized_drift == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(!s.outlier);
}

TEST_CASE("2-D outlier example") {
    std::map<std::string, EmbeddingVector> refs = {{"a", vec({1, 0})}, {"b", vec({0, 1})}};
    ReferenceGeometry geo = reference_geometry(refs);
    EmbeddingScores s = passage_embedding_scores(vec({-1, 0}), geo);
    double cos45 = std::cos(M_PI / 4);
    CHECK(s.sim_centroid == doctest::Approx(-cos45).epsilon(1e-12));
    CHECK(s.normalized_drift == doctest::Approx((1 + cos45) / (1 - cos45)).epsilon(1e-9));
    CHECK(s.normalized_drift == doctest::Approx(5.8284).epsilon(1e-4));
    CHECK(s.outlier);
}

TEST_CASE("machine equal to a reference names it closest") {
    std::map<std::string, EmbeddingVector> refs = {
        {"a", vec({1, 0, 0})}, {"b", vec({0.8, 0.6, 0})}, {"c", vec({0.8, 0, 0.6})}};
    ReferenceGeometry geo = reference_geometry(refs);
    EmbeddingScores s = passage_embedding_scores(vec({0.8, 0.6, 0}), geo);
    CHECK(s.closest == "b");
    CHECK(s.sim_best == doctest::Approx(1.0).epsilon(1e-12));
    // scoring each reference as if it were the MT: normalized drifts mean 1
    double sum = 0;
    for (const auto& [name, v] : refs)
        sum += passage_embedding_scores(v, geo).normalized_drift;
    CHECK(sum / 3.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closest ties break alphabetically") {
    std::map<std::string, EmbeddingVector> refs = {
        {"b", vec({1, 0, 0})}, {"a", vec({1, 0, 0})}, {"c", vec({0, 1, 0})}};
    ReferenceGeometry geo = reference_geometry(refs);
    EmbeddingScores s = passage_embedding_scores(vec({1, 0, 0}), geo);
    CHECK(s.closest == "a");
}

TEST_CASE("scale invariance of every score") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 50.0);
    for (int round = 0; round < 100; ++round) {
        std::size_t dim = 8 + round % 32;
        auto make = [&] {
            EmbeddingVector v;
            for (std::size_t i = 0; i < dim; ++i) v.values.push_back(coord(rng));
            if (v.norm() == 0) v.values[0] = 1;
            return v;
        };
        std::map<std::string, EmbeddingVector> refs = {{"a", make()}, {"b", make()}, {"c", make()}};
        EmbeddingVector mt = make();
        ReferenceGeometry geo = reference_geometry(refs);
        if (geo.degenerate) continue;
        EmbeddingScores base = passage_embedding_scores(mt, geo);

        // scale one reference and the machine vector by arbitrary positives
        std::map<std::string, EmbeddingVector> scaled = refs;
        double k = scale(rng);
        for (double& x : scaled["b"].values) x *= k;
        EmbeddingVector mt2 = mt;
        double k2 = scale(rng);
        for (double& x : mt2.values) x *= k2;
        EmbeddingScores other = passage_embedding_scores(mt2, reference_geometry(scaled));
        CHECK(std::abs(base.sim_best - other.sim_best) < 1e-12);
        CHECK(std::abs(base.sim_centroid - other.sim_centroid) < 1e-12);
        CHECK(std::abs(base.normalized_drift - other.normalized_drift) < 1e-12);
        CHECK(base.closest == other.closest);
        CHECK(base.outlier == other.outlier);
    }
}

TEST_CASE("adding a reference never decreases sim_best") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> coord(0.1, 1.0);
    for (int round = 0; round < 50; ++round) {
        auto make = [&] {
            EmbeddingVector v;
            for (int i = 0; i < 12; ++i) v.values.push_back(coord(rng));
            return v;
        };
        std::map<std::string, EmbeddingVector> refs = {{"a", make()}, {"b", make()}};
        EmbeddingVector mt = make();
        double before = passage_embedding_scores(mt, reference_geometry(refs)).sim_best;
        refs["c"] = make();
        double after = passage_embedding_scores(mt, reference_geometry(refs)).sim_best;
        CHECK(after >= before - 1e-15);
    }
}

TEST_CASE("degenerate geometry sentinel") {
    std::map<std::string, EmbeddingVector> refs = {
        {"a", vec({1, 0})}, {"b", vec({1, 0})}, {"c", vec({1, 0})}};
    ReferenceGeometry geo = reference_geometry(refs);
    REQUIRE(geo.degenerate);
    EmbeddingScores on_axis = passage_embedding_scores(vec({2, 0}), geo);
    CHECK(on_axis.normalized_drift == 0.0);
    CHECK(on_axis.degenerate_geometry);
    CHECK(!on_axis.outlier);
    EmbeddingScores off_axis = passage_embedding_scores(vec({0, 1}), geo);
    CHECK(std::isinf(off_axis.normalized_drift));
    CHECK(off_axis.outlier);
}

TEST_CASE("opposed references have no centroid") {
    std::map<std::string, EmbeddingVector> refs = {{"a", vec({1, 0})}, {"b", vec({-1, 0})}};
    CHECK_THROWS_AS(reference_geometry(refs), ValidationError);
}

TEST_CASE("outlier threshold validation") {
    OutlierThreshold bad{0.5};
    std::map<std::string, EmbeddingVector> refs = {{"a", vec({1, 0})}, {"b", vec({0, 1})}};
    CHECK_THROWS_AS(passage_embedding_scores(vec({1, 1}), reference_geometry(refs), bad),
                    ValidationError);
}
