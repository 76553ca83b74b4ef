#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "aptest/hermite.hpp"
#include "aptest/ltf.hpp"
#include "aptest/ltf_tester.hpp"
#include "aptest/oracle.hpp"
#include "aptest/ustat.hpp"

using namespace aptest;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> gaussian_point(std::size_t n, Rng& rng) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    return x;
}

}  // namespace

TEST_CASE("eval_pm sign convention and scale invariance") {
    CHECK(eval_pm(LinearThreshold({1.0}, 0.0), std::vector<double>{0.0}) == 1);
    CHECK(eval_pm(LinearThreshold({1.0, 1.0}, 1.0), std::vector<double>{0.4, 0.4}) == -1);
    CHECK_THROWS_AS(eval_pm(LinearThreshold({1.0, 1.0}, 0.0), std::vector<double>{1.0}),
                    DimMismatch);

    const LinearThreshold f({2.0, 0.0}, 0.0);
    const LinearThreshold g({1.0, 0.0}, 0.0);
    Rng rng(6);
    for (int i = 0; i < 10'000; ++i) {
        const auto x = gaussian_point(2, rng);
        CHECK(eval_pm(f, x) == eval_pm(g, x));
    }
    CHECK_THROWS_AS(LinearThreshold({0.0, 0.0}, 1.0), BadParams);
}

TEST_CASE("W anchors: peak, endpoints, derivative bound") {
    CHECK(std::abs(w_function(0.0) - 2.0 / kPi) <= 1e-9);
    CHECK(w_function(1.0) <= 1e-9);
    CHECK(w_function(-1.0) <= 1e-9);
    CHECK_THROWS_AS(w_function(1.5), BadParams);

    const double h = 1e-3;
    double max_slope = 0.0;
    for (int k = 1; k < 2000; ++k) {
        const double mu = -1.0 + static_cast<double>(k) * h;
        const double hi = std::min(mu + h, 1.0);
        const double lo = std::max(mu - h, -1.0);
        max_slope = std::max(max_slope, std::abs(w_function(hi) - w_function(lo)) / (hi - lo));
    }
    CHECK(max_slope <= 1.0 + 1e-3);
    // continuity at the endpoints
    CHECK(w_function(1.0 - 1e-9) <= 1e-6);
    CHECK(w_function(-1.0 + 1e-9) <= 1e-6);
}

TEST_CASE("W matches the Monte-Carlo self-correlation of a threshold cut") {
    // f = sgn(x_1 - 0.5) at n = 3: rho(f) should equal W(E f)
    const LinearThreshold f({1.0, 0.0, 0.0}, 0.5);
    Rng rng(777);
    const std::uint64_t pairs = 400'000;
    long double sum = 0.0L, sumsq = 0.0L, mean_sum = 0.0L;
    for (std::uint64_t t = 0; t < pairs; ++t) {
        const auto x = gaussian_point(3, rng);
        const auto y = gaussian_point(3, rng);
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += x[k] * y[k];
        const double v = eval_pm(f, x) * eval_pm(f, y) * dot;
        sum += v;
        sumsq += static_cast<long double>(v) * v;
        mean_sum += eval_pm(f, x);
    }
    const double rho = static_cast<double>(sum / pairs);
    const double se =
        std::sqrt((static_cast<double>(sumsq / pairs) - rho * rho) / static_cast<double>(pairs));
    const double mu = static_cast<double>(mean_sum / pairs);
    CHECK(std::abs(rho - w_function(mu)) <= 3.0 * se + 1e-3);
}

TEST_CASE("hermite polynomial values and multi-index evaluation") {
    CHECK(hermite_value(0, 1.7) == 1.0);
    CHECK(hermite_value(1, 1.7) == Catch::Approx(1.7));
    CHECK(hermite_value(2, 1.7) == Catch::Approx((1.7 * 1.7 - 1.0) / std::sqrt(2.0)));
    const HermiteIndex idx{{1, 0, 2}};
    CHECK(idx.degree() == 3);
    const std::vector<double> x{0.5, 9.0, 1.2};
    CHECK(idx.eval(x) == Catch::Approx(0.5 * (1.2 * 1.2 - 1.0) / std::sqrt(2.0)));
}

TEST_CASE("degree-1 coefficients of an axis threshold") {
    const LinearThreshold f({1.0, 0.0, 0.0, 0.0}, 0.0);
    auto label = [&](std::span<const double> x) { return eval_pm(f, x); };
    Rng rng(11);
    const auto c1 = hermite_coeff_degree1(label, 4, 1, 400'000, rng);
    CHECK(std::abs(c1.value - std::sqrt(2.0 / kPi)) <= 3.0 * c1.se);
    const auto c2 = hermite_coeff_degree1(label, 4, 2, 400'000, rng);
    CHECK(std::abs(c2.value) <= 3.0 * c2.se);
    auto ones = [](std::span<const double>) { return 1; };
    const auto c3 = hermite_coeff_degree1(ones, 4, 3, 100'000, rng);
    CHECK(std::abs(c3.value) <= 3.0 * c3.se);
    CHECK_THROWS_AS(hermite_coeff_degree1(ones, 4, 0, 10, rng), BadParams);
    CHECK_THROWS_AS(hermite_coeff_degree1(ones, 4, 5, 10, rng), BadParams);
}

TEST_CASE("sum of squared degree-1 coefficients equals the pair statistic") {
    Rng rng(2025);
    std::size_t hits = 0;
    const int cases = 5;
    for (int c = 0; c < cases; ++c) {
        const std::size_t n = 2 + rng.below(5);
        std::vector<double> w(n);
        for (auto& wi : w) wi = rng.gaussian();
        const LinearThreshold f(w, 0.4 * rng.gaussian());
        auto label = [&](std::span<const double> x) { return eval_pm(f, x); };

        const std::uint64_t samples = 200'000;
        double sum_sq = 0.0, var_sum = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            const auto ci = hermite_coeff_degree1(label, n, i, samples, rng);
            sum_sq += ci.value * ci.value;
            var_sum += 4.0 * ci.value * ci.value * ci.se * ci.se;
        }
        long double acc = 0.0L, accsq = 0.0L;
        for (std::uint64_t t = 0; t < samples; ++t) {
            const auto x = gaussian_point(n, rng);
            const auto y = gaussian_point(n, rng);
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += x[k] * y[k];
            const double v = label(x) * label(y) * dot;
            acc += v;
            accsq += static_cast<long double>(v) * v;
        }
        const double rho = static_cast<double>(acc / samples);
        const double rho_var =
            (static_cast<double>(accsq / samples) - rho * rho) / static_cast<double>(samples);
        const double combined_se = std::sqrt(var_sum + rho_var);
        if (std::abs(sum_sq - rho) <= 4.0 * combined_se) ++hits;
    }
    CHECK(hits >= cases - 1);
}

TEST_CASE("self-correlation estimate is centered for symmetric targets") {
    SECTION("constant +1 target") {
        ActiveOracle oracle(GaussianIsotropic{20},
                            LtfTarget{LinearThreshold(std::vector<double>(20, 1.0), -1e9)}, 3);
        const auto est = estimate_self_correlation(oracle, UStatConfig(22.0, 2000));
        CHECK(std::abs(est.rho) <= 4.0 * est.se);
        CHECK(est.mu == 1.0);
    }
    SECTION("memoized random target") {
        ActiveOracle oracle(GaussianIsotropic{20}, MemoizedRandom{}, 4);
        const auto est = estimate_self_correlation(oracle, UStatConfig(22.0, 2000));
        CHECK(std::abs(est.rho) <= 4.0 * est.se);
    }
}

TEST_CASE("self-correlation of an axis dictator approaches 2/pi") {
    ActiveOracle oracle(GaussianIsotropic{10},
                        LtfTarget{LinearThreshold({1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0.0)}, 5);
    const double tau = ltf_truncation_threshold(10, 0.5);
    const auto est = estimate_self_correlation(oracle, UStatConfig(tau, 4000));
    CHECK(std::abs(est.rho - 2.0 / kPi) <= 0.05);
}

TEST_CASE("full-pair estimate is exactly permutation invariant") {
    Rng rng(31);
    const std::size_t n = 6, m = 50;
    std::vector<std::vector<double>> pts(m);
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        pts[i] = gaussian_point(n, rng);
        labels[i] = rng.coin() ? 1 : -1;
    }
    auto run = [&](const std::vector<std::size_t>& order) {
        std::vector<std::span<const double>> spans;
        std::vector<int> perm_labels;
        for (const auto i : order) {
            spans.emplace_back(pts[i]);
            perm_labels.push_back(labels[i]);
        }
        Rng local(1);
        return self_correlation_from_sample(spans, perm_labels, 5.0, std::uint64_t{1} << 30,
                                            local)
            .rho;
    };
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    const double base = run(order);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        CHECK(run(order) == base);
    }
}

TEST_CASE("per-point conditional mean variance stays below one") {
    Rng rng(61);
    const std::size_t n = 10, m = 600;
    std::vector<double> w(n);
    for (auto& wi : w) wi = rng.gaussian();
    const LinearThreshold f(w, 0.0);
    const double tau = ltf_truncation_threshold(n, 0.5);
    std::vector<std::vector<double>> pts(m);
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) {
        pts[i] = gaussian_point(n, rng);
        labels[i] = eval_pm(f, pts[i]);
    }
    std::vector<double> conditional(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) dot += pts[i][k] * pts[j][k];
            if (std::abs(dot) <= tau) conditional[i] += labels[i] * labels[j] * dot;
        }
        conditional[i] /= static_cast<double>(m - 1);
    }
    double mean = 0.0;
    for (double c : conditional) mean += c;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double c : conditional) var += (c - mean) * (c - mean);
    var /= static_cast<double>(m - 1);
    CHECK(var <= 1.0 + 3.0 * var * std::sqrt(2.0 / static_cast<double>(m)));
}

TEST_CASE("truncation gap edge cases and bound") {
    Rng rng(71);
    const std::size_t n = 20;
    std::vector<double> w(n);
    for (auto& wi : w) wi = rng.gaussian();
    const LinearThreshold f(w, 0.0);
    auto label = [&](std::span<const double> x) { return eval_pm(f, x); };

    const auto huge_tau = truncation_gap(label, n, 1e12, 20'000, rng);
    CHECK(huge_tau.gap == 0.0);

    const auto zero_tau = truncation_gap(label, n, 0.0, 20'000, rng);
    CHECK(zero_tau.gap >= 0.0);  // equals |mean g| on these pairs

    const double eps = 0.5;
    const double tau = ltf_truncation_threshold(n, eps);
    const auto gap = truncation_gap(label, n, tau, 100'000, rng);
    CHECK(gap.gap <= 0.5 * eps * eps * eps + 3.0 * gap.se);
}

TEST_CASE("ltf tester separates LTFs from memoized noise at desk scale") {
    const std::size_t n = 8;
    const double eps = 0.5;
    LtfTesterConfig cfg;
    cfg.c_m1 = 20.0;
    cfg.c_m2 = 8.0;
    std::size_t ltf_accepts = 0, noise_rejects = 0;
    const std::size_t trials = 10;
    for (std::uint64_t t = 0; t < trials; ++t) {
        {
            Rng gen(trial_seed(4000, t));
            std::vector<double> w(n);
            for (auto& wi : w) wi = gen.gaussian();
            ActiveOracle oracle(GaussianIsotropic{n}, LtfTarget{LinearThreshold(w, 0.0)},
                                trial_seed(5000, t));
            const auto v = test_ltf(oracle, n, eps, cfg);
            if (v.decision == Decision::Accept) ++ltf_accepts;
            CHECK(v.labels_used == ltf_sample_size(n, eps, cfg));
            CHECK(v.unlabeled_used == ltf_sample_size(n, eps, cfg));
        }
        {
            ActiveOracle oracle(GaussianIsotropic{n}, MemoizedRandom{}, trial_seed(6000, t));
            if (test_ltf(oracle, n, eps, cfg).decision == Decision::Reject) ++noise_rejects;
        }
    }
    CHECK(ltf_accepts >= 9);
    CHECK(noise_rejects >= 9);
}

TEST_CASE("degenerate constants are rejected as parameters") {
    ActiveOracle oracle(GaussianIsotropic{4}, MemoizedRandom{}, 2);
    LtfTesterConfig cfg;
    cfg.c_m1 = 0.0;
    cfg.c_m2 = 0.0;
    CHECK_THROWS_AS(test_ltf(oracle, 4, 0.5, cfg), BadParams);
    CHECK_THROWS_AS(test_ltf(oracle, 4, 1.5), BadParams);
    ActiveOracle wrong(Uniform01{}, MemoizedRandom{}, 2);
    CHECK_THROWS_AS(test_ltf(wrong, 4, 0.5), DimMismatch);
}
