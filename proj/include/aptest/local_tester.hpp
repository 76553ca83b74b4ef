#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"

namespace aptest {

struct LocalTesterConfig {
    double cap_factor = 8.0;  // per-iteration draw cap: ceil(cap_factor * s / pair_rate)
};

// Reduction for locally characterized properties: t times, draw an anchor,
// gather s-1 samples within metric radius r of it, and run the inner passive
// tester on the ball; accept iff at least half of the completed runs accept.
// Iterations whose ball cannot be filled within the draw cap are skipped; if
// more than t/2 iterations starve, the reduction fails.
template <typename Metric>
inline TesterVerdict test_locally_characterized(
    ActiveOracle& oracle,
    const std::function<Decision(ActiveOracle&, std::span<const PointId>)>& inner, double r,
    Metric&& metric, std::uint64_t t, std::uint64_t s, double pair_rate,
    const LocalTesterConfig& cfg = {}) {
    if (!(pair_rate > 0.0)) throw BadParams("local tester: pair_rate must be > 0");
    if (t < 1 || s < 1) throw BadParams("local tester: t and s must be >= 1");

    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();
    const auto cap = static_cast<std::uint64_t>(
        std::ceil(cfg.cap_factor * static_cast<double>(s) / pair_rate));

    std::uint64_t starved = 0, accepts = 0, completed = 0;
    for (std::uint64_t it = 0; it < t; ++it) {
        const PointId anchor = oracle.draw_one();
        std::vector<PointId> ball{anchor};
        for (std::uint64_t drawn = 0; ball.size() < s && drawn < cap; ++drawn) {
            const PointId id = oracle.draw_one();
            if (metric(oracle, anchor, id) <= r) ball.push_back(id);
        }
        if (ball.size() < s) {
            ++starved;
            continue;
        }
        ++completed;
        if (inner(oracle, ball) == Decision::Accept) ++accepts;
    }
    if (2 * starved > t)
        throw NeighborhoodStarved("local tester: ball fill cap hit in more than t/2 iterations");

    TesterVerdict v;
    v.decision = (completed == 0 || 2 * accepts >= completed) ? Decision::Accept : Decision::Reject;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    v.statistic = completed == 0 ? 1.0
                                 : static_cast<double>(accepts) / static_cast<double>(completed);
    v.threshold = 0.5;
    return v;
}

}  // namespace aptest
