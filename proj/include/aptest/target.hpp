#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/ltf.hpp"
#include "aptest/piecewise.hpp"

namespace aptest {

struct IntervalUnionTarget {
    PiecewiseConstantFn fn;
};

struct LtfTarget {
    LinearThreshold fn;
};

// Deterministic realization of per-bin label masses (p_i0, p_i1): a binned
// point (i, u) is labeled 1 iff u falls in the p_i1 share of bin i.
struct BinnedTable {
    std::vector<std::pair<double, double>> bins;

    int label(int bin_index, double payload) const {
        const auto& [p0, p1] = bins.at(static_cast<std::size_t>(bin_index - 1));
        const double mass = p0 + p1;
        if (mass <= 0.0) return 0;
        return payload < p1 / mass ? 1 : 0;
    }
};

// Fair-coin labels assigned lazily per point id and memoized, so repeated
// queries agree. Keyed on point identity, not coordinates.
struct MemoizedRandom {};

// Fixed labels for the atoms of an Empirical distribution.
struct AtomTable {
    std::vector<int> labels;
};

using TargetFunction =
    std::variant<IntervalUnionTarget, LtfTarget, BinnedTable, MemoizedRandom, AtomTable>;

}  // namespace aptest
