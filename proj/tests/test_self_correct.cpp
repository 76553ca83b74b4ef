#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "aptest/generators.hpp"
#include "aptest/interval_distance.hpp"
#include "aptest/noise_sensitivity.hpp"
#include "aptest/self_correct.hpp"

using namespace aptest;

TEST_CASE("clean members come back unchanged up to block merging") {
    const std::size_t d = 3;
    const double eps = 0.25;
    const double delta = eps * eps / (32.0 * d);
    for (int i = 0; i < 25; ++i) {
        const auto inst = gen_interval_instance(d, eps, IntervalKind::Member, 1000 + i);
        const auto g = self_correct(inst.fn, delta, eps, d);
        // the smoothing fringe shifts each boundary by at most ~delta
        CHECK(piecewise_distance(inst.fn, g) <= 4.0 * d * delta);
        CHECK(g.positive_interval_count() ==
              inst.fn.normalized().positive_interval_count());
    }
}

TEST_CASE("constants are fixed points") {
    const auto ones = self_correct(PiecewiseConstantFn::constant(1), 0.01, 0.25, 2);
    CHECK(ones.positive_interval_count() == 1);
    CHECK(ones.positive_mass() == 1.0);
    const auto zeros = self_correct(PiecewiseConstantFn::constant(0), 0.01, 0.25, 2);
    CHECK(zeros.positive_mass() == 0.0);
}

TEST_CASE("wide spurious blips are pruned away") {
    const std::size_t d = 10;
    const double eps = 0.25;
    const double delta = eps * eps / (32.0 * d);
    std::size_t good = 0;
    const std::size_t cases = 25;
    for (std::size_t i = 0; i < cases; ++i) {
        Rng rng(trial_seed(2200, i));
        const auto noisy = gen_noisy_member(d, eps, eps / 8.0, rng);
        const auto g = self_correct(noisy, delta, eps, d);
        const bool close = piecewise_distance(noisy, g) <= eps;
        const bool in_class = distance_to_interval_union(g, d) == 0.0;
        if (close && in_class) ++good;
    }
    CHECK(good >= cases - 1);
}

TEST_CASE("in-regime functions land in the class within eps (desk-scale lemma)") {
    const std::size_t d = 4;
    const double eps = 0.3;
    const double delta = eps * eps / (32.0 * d);
    const double regime = d * delta * (1.0 + eps / 4.0);
    std::size_t tested = 0;
    for (std::uint64_t s = 0; tested < 40 && s < 400; ++s) {
        // member plus hair-thin blips: small enough to stay in the NS regime
        const PiecewiseConstantFn base =
            gen_interval_instance(d, eps, IntervalKind::Member, trial_seed(9100, s)).fn;
        std::vector<double> breaks = base.breakpoints();
        std::vector<int> values = base.block_values();
        detail::carve_islands(breaks, values, 0, 3.0 * delta * eps / 16.0, delta * eps / 16.0);
        const PiecewiseConstantFn f(breaks, values);
        if (f.block_count() > 64) continue;
        if (noise_sensitivity_exact(f, delta) > regime) continue;
        ++tested;
        const auto g = self_correct(f, delta, eps, d);
        CHECK(distance_to_interval_union(g, d) == 0.0);
        CHECK(piecewise_distance(f, g) <= eps);
    }
    CHECK(tested >= 40);
}

TEST_CASE("pruning deletes the shortest positive intervals first") {
    // five positive intervals with distinct lengths, d = 3: the two shortest go
    const PiecewiseConstantFn f({0.05, 0.07, 0.2, 0.23, 0.4, 0.45, 0.6, 0.7, 0.8, 0.95},
                                {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
    const double eps = 0.3;
    const double delta = 1e-4;
    const auto g = self_correct(f, delta, eps, 3);
    CHECK(g.positive_interval_count() == 3);
    // removed: [0.05,0.07] (0.02) and [0.2,0.23] (0.03), plus fringe shifts
    CHECK(piecewise_distance(f, g) == Catch::Approx(0.05).margin(30.0 * delta));
    CHECK(g.eval(0.42) == 1);
    CHECK(g.eval(0.65) == 1);
    CHECK(g.eval(0.9) == 1);
    CHECK(g.eval(0.06) == 0);
    CHECK(g.eval(0.21) == 0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(self_correct(PiecewiseConstantFn::constant(0), 0.0, 0.5, 1), BadParams);
    CHECK_THROWS_AS(self_correct(PiecewiseConstantFn::constant(0), 0.1, 1.5, 1), BadParams);
}
