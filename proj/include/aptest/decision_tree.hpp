#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/label_law.hpp"

namespace aptest {

namespace detail {

struct DtInstance {
    std::vector<std::pair<Labeling, double>> prop;  // half-weighted pi_U support
    std::vector<std::pair<Labeling, double>> far;   // half-weighted pi'_U support
    std::size_t points = 0;
};

// min misclassified fair mass over depth-<=q trees, adaptive on answers.
// States keyed on (answered assignment, remaining depth); different query
// orders reaching the same assignment share the entry.
inline double dt_search(const DtInstance& inst,
                        std::vector<std::pair<Labeling, double>> prop,
                        std::vector<std::pair<Labeling, double>> far, std::uint32_t mask,
                        std::uint32_t answers, std::uint32_t depth,
                        std::unordered_map<std::uint64_t, double>& memo) {
    double wp = 0.0, wf = 0.0;
    for (const auto& [y, p] : prop) wp += p;
    for (const auto& [y, p] : far) wf += p;
    const double leaf = std::min(wp, wf);
    if (depth == 0 || leaf == 0.0) return leaf;

    const std::uint64_t key =
        (static_cast<std::uint64_t>(depth) << 56) |
        (static_cast<std::uint64_t>(mask) << 28) | answers;
    if (const auto it = memo.find(key); it != memo.end()) return it->second;

    double best = leaf;  // stopping early is always allowed
    for (std::uint32_t u = 0; u < inst.points; ++u) {
        const std::uint32_t bit = std::uint32_t{1} << u;
        std::vector<std::pair<Labeling, double>> p0, p1, f0, f1;
        for (const auto& e : prop) (e.first & bit ? p1 : p0).push_back(e);
        for (const auto& e : far) (e.first & bit ? f1 : f0).push_back(e);
        const double v =
            dt_search(inst, std::move(p0), std::move(f0), mask | bit, answers, depth - 1, memo) +
            dt_search(inst, std::move(p1), std::move(f1), mask | bit, answers | bit, depth - 1,
                      memo);
        best = std::min(best, v);
        if (best == 0.0) break;
    }
    memo.emplace(key, best);
    return best;
}

}  // namespace detail

// err*(DT_q, Fair(pi, pi', U)): minimum misclassification probability of the
// source bit over all depth-<=q adaptive decision trees that query points of
// U. Exhaustive with memoization on (answered prefix, remaining depth).
inline double optimal_dt_error(const FairLaw& fair, std::size_t points, std::uint32_t q) {
    if (points > 14 || q > 3)
        throw SearchBudget("optimal_dt_error: exhaustive search capped at |U| <= 14, q <= 3");
    if (fair.q() != points) throw DimMismatch("optimal_dt_error: law arity != |U|");

    detail::DtInstance inst;
    inst.points = points;
    const LabelLaw prop = fair.from_property.materialized();
    const LabelLaw far = fair.from_far.materialized();
    for (const auto& [y, p] : prop.probs) inst.prop.emplace_back(y, 0.5 * p);
    for (const auto& [y, p] : far.probs) inst.far.emplace_back(y, 0.5 * p);

    std::unordered_map<std::uint64_t, double> memo;
    return detail::dt_search(inst, inst.prop, inst.far, 0, 0, q, memo);
}

}  // namespace aptest
