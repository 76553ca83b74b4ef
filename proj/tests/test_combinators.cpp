#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "aptest/cluster_tester.hpp"
#include "aptest/disjoint_union.hpp"
#include "aptest/generators.hpp"
#include "aptest/local_tester.hpp"
#include "aptest/margin.hpp"
#include "aptest/oracle.hpp"

using namespace aptest;

TEST_CASE("cluster tester accepts pure instances and meters its budgets") {
    const std::size_t bins = 20;
    const double eps = 0.25;
    const auto inst = make_cluster_instance(bins, 0.0, 7);
    REQUIRE(inst.error == 0.0);
    ClusterTesterConfig cfg;
    ActiveOracle oracle(inst.mixture, inst.table, 11);
    const auto v = test_cluster(oracle, bins, eps, cfg);
    CHECK(v.decision == Decision::Accept);
    const auto pool = static_cast<std::uint64_t>(std::ceil(cfg.c_n * bins / eps));
    CHECK(v.unlabeled_used == pool);
    const auto rounds = static_cast<std::uint64_t>(std::ceil(4.0 / eps));
    CHECK(v.labels_used <= 2 * rounds * static_cast<std::uint64_t>(cfg.boost));
}

TEST_CASE("cluster tester rejects impure instances") {
    const std::size_t bins = 20;
    const double eps = 0.25;
    const auto inst = make_cluster_instance(bins, 2.0 * eps, 13);
    REQUIRE(inst.error == Catch::Approx(eps));
    std::size_t rejects = 0;
    for (std::uint64_t t = 0; t < 30; ++t) {
        ActiveOracle oracle(inst.mixture, inst.table, trial_seed(400, t));
        if (test_cluster(oracle, bins, eps).decision == Decision::Reject) ++rejects;
    }
    CHECK(rejects >= 27);
}

TEST_CASE("a single 50/50 bin is rejected quickly") {
    const BinnedMixture mix({{0.5, 0.5}});
    const BinnedTable table{{{0.5, 0.5}}};
    std::size_t rejects = 0;
    for (std::uint64_t t = 0; t < 30; ++t) {
        ActiveOracle oracle(mix, table, trial_seed(500, t));
        if (test_cluster(oracle, 1, 0.5).decision == Decision::Reject) ++rejects;
    }
    CHECK(rejects >= 27);
}

TEST_CASE("disjoint union accepts constant components and rejects mixed ones") {
    const std::size_t bins = 10;
    const double eps = 0.25;
    const std::vector<SubTester> testers(bins, constant_subtester());
    {
        const auto inst = make_cluster_instance(bins, 0.0, 21);
        ActiveOracle oracle(inst.mixture, inst.table, 31);
        CHECK(test_disjoint_union(oracle, testers, bins, eps).decision == Decision::Accept);
    }
    std::size_t rejects = 0;
    for (std::uint64_t t = 0; t < 25; ++t) {
        const auto inst = make_cluster_instance(bins, 2.0 * eps, trial_seed(600, t));
        ActiveOracle oracle(inst.mixture, inst.table, trial_seed(700, t));
        if (test_disjoint_union(oracle, testers, bins, eps).decision == Decision::Reject)
            ++rejects;
    }
    CHECK(rejects >= 23);
}

TEST_CASE("disjoint union with one component is a boosted single run") {
    const std::vector<SubTester> testers(1, constant_subtester());
    const BinnedMixture pure({{1.0, 0.0}});
    ActiveOracle oracle(pure, BinnedTable{{{1.0, 0.0}}}, 4);
    const auto v = test_disjoint_union(oracle, testers, 1, 0.25);
    CHECK(v.decision == Decision::Accept);
    CHECK(v.labels_used > 0);

    const BinnedMixture mixed({{0.5, 0.5}});
    std::size_t rejects = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        ActiveOracle o2(mixed, BinnedTable{{{0.5, 0.5}}}, trial_seed(800, t));
        if (test_disjoint_union(o2, testers, 1, 0.25).decision == Decision::Reject) ++rejects;
    }
    CHECK(rejects >= 18);
}

TEST_CASE("sub-tester errors are wrapped with the offending bin") {
    SubTester bad;
    bad.labels_needed = [](double, double) { return std::uint64_t{1}; };
    bad.points_needed = [](double, double) { return std::uint64_t{1}; };
    bad.run = [](ActiveOracle&, std::span<const PointId>, double, double) -> Decision {
        throw std::runtime_error("internal failure");
    };
    const std::vector<SubTester> testers(2, bad);
    const auto inst = make_cluster_instance(2, 0.0, 3);
    ActiveOracle oracle(inst.mixture, inst.table, 5);
    CHECK_THROWS_AS(test_disjoint_union(oracle, testers, 2, 0.25), SubTesterFailure);
}

TEST_CASE("unit ball partitions match the stated geometry") {
    {
        const auto p = partition_unit_ball(1, 0.2, 2.0);
        CHECK(p.cell_side == Catch::Approx(0.05));
        CHECK(p.region_count() == 40);
    }
    {
        const auto p = partition_unit_ball(2, 0.5, 2.0);
        const double diam = p.cell_side * std::sqrt(2.0);
        CHECK(diam <= 0.125 + 1e-12);
        for (std::size_t i = 0; i < p.region_count(); ++i)
            CHECK(p.union_diameter(i, i) == Catch::Approx(diam));
    }
    {
        const auto p = partition_unit_ball(3, 2.5, 2.0);
        CHECK(p.region_count() == 1);
    }
    CHECK_THROWS_AS(partition_unit_ball(6, 0.01, 2.0), RegionBlowup);
    CHECK_THROWS_AS(partition_unit_ball(0, 0.2, 2.0), BadParams);
    CHECK_THROWS_AS(partition_unit_ball(2, 0.2, 1.0), BadParams);
}

TEST_CASE("margin graph edges follow the exact cell geometry") {
    const auto p = partition_unit_ball(1, 0.5, 2.0);  // cells of length 0.125
    std::vector<double> mass(p.region_count(), 0.0);
    mass[0] = 0.3;
    mass[1] = 0.1;
    const auto g = build_margin_graph(p, mass);
    const double gamma_prime = p.gamma * (1.0 - 1.0 / p.c);

    bool found_adjacent = false;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        const auto& [i, j] = g.edges[e];
        CHECK(p.union_diameter(i, j) < p.gamma);
        if ((i == 0 && j == 1) || (i == 1 && j == 0)) {
            found_adjacent = true;
            CHECK(g.w_hat[e] == Catch::Approx(0.1));
        }
        if (mass[i] == 0.0 || mass[j] == 0.0) CHECK(g.w_hat[e] == 0.0);
    }
    CHECK(found_adjacent);

    // non-edge pairs are geometrically separated by at least gamma'
    std::vector<std::vector<bool>> adjacent(p.region_count(),
                                            std::vector<bool>(p.region_count(), false));
    for (const auto& [i, j] : g.edges) adjacent[i][j] = adjacent[j][i] = true;
    for (std::size_t i = 0; i < p.region_count(); ++i)
        for (std::size_t j = i + 1; j < p.region_count(); ++j)
            if (!adjacent[i][j]) CHECK(p.separation(i, j) >= gamma_prime - 1e-12);
}

TEST_CASE("edge weight estimates concentrate within eps/(4M)") {
    // two adjacent occupied cells; every other edge weight is exactly zero
    const std::size_t d = 1;
    const double gamma = 0.5, c = 2.0, eps = 0.25;
    const auto p = partition_unit_ball(d, gamma, c);
    const Empirical atoms(1, {-0.03, 0.03}, {0.5, 0.5});
    REQUIRE(p.locate(atoms.atom(0)) >= 0);
    REQUIRE(p.locate(atoms.atom(1)) >= 0);
    REQUIRE(p.locate(atoms.atom(0)) != p.locate(atoms.atom(1)));

    // build once to learn M, then size the sample for a 3-sigma pass
    std::vector<double> probe_mass(p.region_count(), 0.0);
    const auto probe = build_margin_graph(p, probe_mass);
    const double tolerance = eps / (4.0 * static_cast<double>(probe.edges.size()));
    const auto samples = static_cast<std::uint64_t>(
        std::ceil(0.25 * 9.0 / (tolerance * tolerance)));

    std::size_t ok = 0;
    const std::size_t builds = 200;
    for (std::uint64_t b = 0; b < builds; ++b) {
        Rng rng(trial_seed(909, b));
        std::vector<double> mass(p.region_count(), 0.0);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const std::size_t atom = categorical_draw(atoms.cumulative, rng);
            mass[static_cast<std::size_t>(p.locate(atoms.atom(atom)))] +=
                1.0 / static_cast<double>(samples);
        }
        const auto g = build_margin_graph(p, mass);
        double worst = 0.0;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const auto& [i, j] = g.edges[e];
            double wi = 0.0, wj = 0.0;
            for (std::size_t a = 0; a < atoms.atom_count(); ++a) {
                if (p.locate(atoms.atom(a)) == static_cast<std::int64_t>(i)) wi += atoms.weights[a];
                if (p.locate(atoms.atom(a)) == static_cast<std::int64_t>(j)) wj += atoms.weights[a];
            }
            worst = std::max(worst, std::abs(g.w_hat[e] - std::min(wi, wj)));
        }
        if (worst <= tolerance) ++ok;
    }
    CHECK(ok >= builds * 95 / 100);
}

TEST_CASE("witness edges detect violations with probability at least 1/2") {
    // two adjacent regions, one majority-positive and one pure-negative:
    // disagreement probability for a uniform cross pair is at least 1/2
    const std::size_t pos_majority = 9, pos_minority = 1, neg_pure = 10;
    const double p_disagree =
        static_cast<double>(pos_majority * neg_pure) /
        static_cast<double>((pos_majority + pos_minority) * neg_pure);
    CHECK(p_disagree >= 0.5);
}

TEST_CASE("margin tester separates margin from far instances (d = 1)") {
    const std::size_t d = 1;
    const double gamma = 0.2, c = 2.0, eps = 0.25;
    MarginTesterConfig cfg;
    std::size_t margin_accepts = 0, far_rejects = 0;
    const std::size_t trials = 20;
    for (std::uint64_t t = 0; t < trials; ++t) {
        {
            const auto inst =
                gen_margin_instance(d, gamma, c, eps, MarginKind::Margin, trial_seed(111, t));
            REQUIRE(inst.certificate >= gamma);
            ActiveOracle oracle(inst.atoms, inst.labels, trial_seed(222, t));
            if (test_margin(oracle, gamma, c, eps, d, cfg).decision == Decision::Accept)
                ++margin_accepts;
        }
        {
            const auto inst =
                gen_margin_instance(d, gamma, c, eps, MarginKind::Far, trial_seed(333, t));
            REQUIRE(inst.certificate >= eps);
            ActiveOracle oracle(inst.atoms, inst.labels, trial_seed(444, t));
            if (test_margin(oracle, gamma, c, eps, d, cfg).decision == Decision::Reject)
                ++far_rejects;
        }
    }
    CHECK(margin_accepts >= 18);
    CHECK(far_rejects >= 18);
}

TEST_CASE("margin tester accepts when the graph has no occupied edges") {
    // single atom: no cross pairs at all
    const Empirical atoms(1, {0.0}, {1.0});
    ActiveOracle oracle(atoms, AtomTable{{1}}, 9);
    const auto v = test_margin(oracle, 0.2, 2.0, 0.25, 1);
    CHECK(v.decision == Decision::Accept);
}

TEST_CASE("locally characterized reduction over long constant blocks") {
    auto inner = [](ActiveOracle& oracle, std::span<const PointId> ids) {
        int first = -1;
        for (const auto id : ids) {
            const int l = oracle.query_label(id);
            if (first < 0)
                first = l;
            else if (l != first)
                return Decision::Reject;
        }
        return Decision::Accept;
    };
    auto metric = [](ActiveOracle& oracle, PointId a, PointId b) {
        return std::abs(oracle.unit(a) - oracle.unit(b));
    };

    // three long blocks: almost every radius-r ball is monochromatic
    const PiecewiseConstantFn f({0.4, 0.7}, {0, 1, 0});
    ActiveOracle oracle(Uniform01{}, IntervalUnionTarget{f}, 77);
    const double r = 0.005;
    const auto v = test_locally_characterized(
        oracle, std::function<Decision(ActiveOracle&, std::span<const PointId>)>(inner), r,
        metric, 15, 4, 2.0 * r);
    CHECK(v.decision == Decision::Accept);

    // t = 1 degenerates to a single inner run
    ActiveOracle single(Uniform01{}, IntervalUnionTarget{f}, 78);
    const auto v1 = test_locally_characterized(
        single, std::function<Decision(ActiveOracle&, std::span<const PointId>)>(inner), r,
        metric, 1, 4, 2.0 * r);
    CHECK((v1.decision == Decision::Accept || v1.decision == Decision::Reject));

    // zero pair rate violates the precondition
    ActiveOracle third(Uniform01{}, IntervalUnionTarget{f}, 79);
    CHECK_THROWS_AS(
        test_locally_characterized(
            third, std::function<Decision(ActiveOracle&, std::span<const PointId>)>(inner), r,
            metric, 3, 4, 0.0),
        BadParams);

    // unreachable neighborhoods starve the reduction
    ActiveOracle starved(Uniform01{}, IntervalUnionTarget{f}, 80);
    CHECK_THROWS_AS(
        test_locally_characterized(
            starved, std::function<Decision(ActiveOracle&, std::span<const PointId>)>(inner),
            1e-12, metric, 3, 8, 1e-3),
        NeighborhoodStarved);
}
