#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "aptest/piecewise.hpp"

namespace aptest {

// Exact distance from f to the class of unions of at most d intervals under
// the uniform distribution: the minimum total length of blocks whose values
// must flip so that the result has at most d maximal positive intervals.
//
// DP over blocks; state is (#positive runs opened so far, output value of the
// previous block). O(m * d) time, O(d) space.
inline double distance_to_interval_union(const PiecewiseConstantFn& f, std::size_t d) {
    const PiecewiseConstantFn g = f.normalized();
    const std::size_t m = g.block_count();
    // more runs than ceil(m/2) can never help
    const std::size_t rcap = std::min(d, m / 2 + 1);

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // cost[r][v]: min flip mass over a prefix ending with output value v and r runs
    std::vector<std::array<double, 2>> cost(rcap + 1, {kInf, kInf});
    std::vector<std::array<double, 2>> next(rcap + 1, {kInf, kInf});
    cost[0][0] = 0.0;

    for (std::size_t i = 0; i < m; ++i) {
        const double len = g.block_length(i);
        const int val = g.block_values()[i];
        for (auto& row : next) row = {kInf, kInf};
        for (std::size_t r = 0; r <= rcap; ++r) {
            for (int prev = 0; prev < 2; ++prev) {
                const double base = cost[r][prev];
                if (base == kInf) continue;
                // output 0
                {
                    const double c = base + (val == 0 ? 0.0 : len);
                    next[r][0] = std::min(next[r][0], c);
                }
                // output 1: opens a run if prev was 0
                {
                    const std::size_t nr = r + (prev == 0 ? 1 : 0);
                    if (nr <= rcap) {
                        const double c = base + (val == 1 ? 0.0 : len);
                        next[nr][1] = std::min(next[nr][1], c);
                    }
                }
            }
        }
        std::swap(cost, next);
    }

    double best = kInf;
    for (std::size_t r = 0; r <= std::min(d, rcap); ++r)
        best = std::min({best, cost[r][0], cost[r][1]});
    return best;
}

// Exhaustive flip-pattern search; independent oracle for small instances.
inline double distance_to_interval_union_bruteforce(const PiecewiseConstantFn& f, std::size_t d) {
    const PiecewiseConstantFn g = f.normalized();
    const std::size_t m = g.block_count();
    if (m > 24) throw BadParams("bruteforce: too many blocks");
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        double flip = 0.0;
        std::size_t runs = 0;
        int prev = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const int out = g.block_values()[i] ^ ((mask >> i) & 1u);
            if ((mask >> i) & 1u) flip += g.block_length(i);
            if (out == 1 && prev == 0) ++runs;
            prev = out;
        }
        if (runs <= d) best = std::min(best, flip);
    }
    return best;
}

}  // namespace aptest
