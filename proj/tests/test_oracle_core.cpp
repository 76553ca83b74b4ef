#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "aptest/interval_distance.hpp"
#include "aptest/oracle.hpp"
#include "aptest/rng.hpp"

using namespace aptest;

TEST_CASE("draw_unlabeled counts and returns fresh ids in draw order") {
    ActiveOracle oracle(Uniform01{}, IntervalUnionTarget{PiecewiseConstantFn::constant(0)}, 7);
    REQUIRE(oracle.unlabeled_count() == 0);
    const auto ids = oracle.draw_unlabeled(3);
    REQUIRE(ids == std::vector<PointId>{0, 1, 2});
    REQUIRE(oracle.unlabeled_count() == 3);
    CHECK_THROWS_AS(oracle.draw_unlabeled(0), BadParams);
}

TEST_CASE("gaussian draws carry the configured dimension") {
    ActiveOracle oracle(GaussianIsotropic{5}, MemoizedRandom{}, 11);
    const auto id = oracle.draw_unlabeled(1).front();
    REQUIRE(oracle.vec(id).size() == 5);
}

TEST_CASE("degenerate mixture puts every draw in bin 1") {
    std::vector<std::pair<double, double>> bins(8, {0.0, 0.0});
    bins[0] = {1.0, 0.0};
    ActiveOracle oracle(BinnedMixture(bins), BinnedTable{bins}, 3);
    for (const auto id : oracle.draw_unlabeled(100)) CHECK(oracle.binned(id).bin_index == 1);
}

TEST_CASE("query_label evaluates targets and meters every request") {
    SECTION("interval union") {
        PiecewiseConstantFn f({0.5}, {1, 0});
        CHECK(f.eval(0.25) == 1);
        ActiveOracle oracle(Uniform01{}, IntervalUnionTarget{f}, 19);
        const auto id = oracle.draw_unlabeled(1).front();
        const int l = oracle.query_label(id);
        CHECK(l == (oracle.unit(id) <= 0.5 ? 1 : 0));
        CHECK(oracle.label_count() == 1);
        oracle.query_label(id);  // repeats also count
        CHECK(oracle.label_count() == 2);
    }
    SECTION("ltf maps sign -1 to label 0") {
        LinearThreshold f({1.0, 0.0}, 0.0);
        CHECK(eval_pm(f, std::vector<double>{-0.3, 2.0}) == -1);
        ActiveOracle oracle(GaussianIsotropic{2}, LtfTarget{f}, 23);
        const auto id = oracle.draw_unlabeled(1).front();
        CHECK(oracle.query_label(id) == (oracle.vec(id)[0] >= 0.0 ? 1 : 0));
    }
    SECTION("memoized random labels are stable per id") {
        ActiveOracle oracle(Uniform01{}, MemoizedRandom{}, 29);
        const auto ids = oracle.draw_unlabeled(64);
        for (const auto id : ids) CHECK(oracle.query_label(id) == oracle.query_label(id));
    }
}

TEST_CASE("label requests on undrawn points violate the active model") {
    ActiveOracle oracle(Uniform01{}, MemoizedRandom{}, 1);
    CHECK_THROWS_AS(oracle.query_label(0), UnknownPoint);
    oracle.draw_unlabeled(2);
    CHECK_NOTHROW(oracle.query_label(1));
    CHECK_THROWS_AS(oracle.query_label(2), UnknownPoint);
}

TEST_CASE("fixed seed reproduces the full transcript") {
    auto transcript = [] {
        ActiveOracle oracle(Uniform01{}, MemoizedRandom{}, 12345);
        std::vector<double> t;
        for (const auto id : oracle.draw_unlabeled(50)) {
            t.push_back(oracle.unit(id));
            t.push_back(static_cast<double>(oracle.query_label(id)));
        }
        return t;
    };
    CHECK(transcript() == transcript());
}

TEST_CASE("distance_to_interval_union matches hand-checked instances") {
    CHECK(distance_to_interval_union(PiecewiseConstantFn({0.5}, {1, 0}), 1) == 0.0);

    // 1 on [0,0.2] u [0.4,0.6]: flip either positive block or bridge the gap
    PiecewiseConstantFn two({0.2, 0.4, 0.6}, {1, 0, 1, 0});
    CHECK(distance_to_interval_union(two, 1) == Catch::Approx(0.2).margin(1e-15));
    CHECK(distance_to_interval_union(two, 2) == 0.0);

    // alternating 20 equal blocks: exactly 10 positive intervals
    std::vector<double> breaks;
    std::vector<int> values;
    for (int i = 0; i < 20; ++i) {
        values.push_back(i % 2);
        if (i < 19) breaks.push_back((i + 1) / 20.0);
    }
    PiecewiseConstantFn alternating(breaks, values);
    CHECK(distance_to_interval_union(alternating, 10) == 0.0);
    CHECK(distance_to_interval_union(alternating, 9) > 0.0);
}

TEST_CASE("DP oracle agrees with exhaustive flip search on small instances") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t blocks = 2 + rng.below(11);  // up to 12 blocks
        std::vector<double> cuts;
        for (std::size_t i = 0; i + 1 < blocks; ++i) cuts.push_back(rng.uniform());
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<int> vals(cuts.size() + 1);
        for (auto& v : vals) v = rng.coin() ? 1 : 0;
        PiecewiseConstantFn f(cuts, vals);
        for (std::size_t d = 0; d <= 3; ++d)
            CHECK(distance_to_interval_union(f, d) ==
                  Catch::Approx(distance_to_interval_union_bruteforce(f, d)).margin(1e-12));
    }
}

TEST_CASE("distance is zero iff at most d positive intervals, monotone in d") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t blocks = 1 + rng.below(16);
        std::vector<double> cuts;
        for (std::size_t i = 0; i + 1 < blocks; ++i) cuts.push_back(rng.uniform());
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<int> vals(cuts.size() + 1);
        for (auto& v : vals) v = rng.coin() ? 1 : 0;
        PiecewiseConstantFn f(cuts, vals);
        const std::size_t k = f.positive_interval_count();
        double prev = 1.0;
        for (std::size_t d = 0; d <= k + 2; ++d) {
            const double dist = distance_to_interval_union(f, d);
            CHECK(dist <= prev + 1e-15);
            CHECK((dist == 0.0) == (d >= k));
            prev = dist;
        }
    }
}

TEST_CASE("cluster_error ground truth") {
    CHECK(cluster_error({{0.5, 0.0}, {0.0, 0.5}}) == 0.0);
    CHECK(cluster_error({{0.5, 0.5}}) == 0.5);
    CHECK(cluster_error({{0.3, 0.1}, {0.05, 0.55}}) == Catch::Approx(0.15).margin(1e-15));
    CHECK_THROWS_AS(cluster_error({{0.3, 0.1}}), BadSimplex);

    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<double, double>> bins(1 + rng.below(20));
        double total = 0.0;
        for (auto& [a, b] : bins) {
            a = rng.uniform();
            b = rng.uniform();
            total += a + b;
        }
        for (auto& [a, b] : bins) {
            a /= total;
            b /= total;
        }
        const double err = cluster_error(bins);
        CHECK(err >= 0.0);
        CHECK(err <= 0.5 + 1e-12);
    }
}
