#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "aptest/errors.hpp"

namespace aptest {

// Boolean function on [0,1] represented by its breakpoints. Block i covers
// [b_{i-1}, b_i) with b_0 = 0 implicit, and the last block is closed at 1.
// Adjacent blocks may carry equal values; normalize() merges them.
class PiecewiseConstantFn {
public:
    PiecewiseConstantFn() : values_{0} {}

    PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<int> values)
        : breaks_(std::move(breakpoints)), values_(std::move(values)) {
        validate();
    }

    static PiecewiseConstantFn constant(int v) { return PiecewiseConstantFn({}, {v}); }

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<int>& block_values() const { return values_; }
    std::size_t block_count() const { return values_.size(); }

    double block_start(std::size_t i) const { return i == 0 ? 0.0 : breaks_[i - 1]; }
    double block_end(std::size_t i) const { return i == breaks_.size() ? 1.0 : breaks_[i]; }
    double block_length(std::size_t i) const { return block_end(i) - block_start(i); }

    int eval(double x) const {
        // index of first breakpoint > x
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }

    // merge adjacent blocks with equal values
    PiecewiseConstantFn normalized() const {
        std::vector<double> nb;
        std::vector<int> nv;
        nv.push_back(values_[0]);
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] == nv.back()) continue;
            nb.push_back(breaks_[i - 1]);
            nv.push_back(values_[i]);
        }
        return PiecewiseConstantFn(std::move(nb), std::move(nv));
    }

    // number of maximal positive intervals
    std::size_t positive_interval_count() const {
        std::size_t n = 0;
        int prev = 0;
        for (int v : values_) {
            if (v == 1 && prev == 0) ++n;
            prev = v;
        }
        return n;
    }

    double positive_mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] == 1) m += block_length(i);
        return m;
    }

private:
    void validate() const {
        if (values_.empty()) throw BadParams("piecewise: no blocks");
        if (values_.size() != breaks_.size() + 1)
            throw BadParams("piecewise: values must be breakpoints+1");
        double prev = 0.0;
        for (double b : breaks_) {
            if (!(b > prev) || !(b < 1.0))
                throw BadParams("piecewise: breakpoints must ascend strictly inside (0,1)");
            prev = b;
        }
        for (int v : values_)
            if (v != 0 && v != 1) throw BadParams("piecewise: values must be 0/1");
    }

    std::vector<double> breaks_;
    std::vector<int> values_;
};

// Pr_{x~U[0,1]}[ f(x) != g(x) ], exact sweep over merged breakpoints.
inline double piecewise_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g) {
    std::vector<double> cuts;
    cuts.reserve(f.breakpoints().size() + g.breakpoints().size() + 2);
    cuts.push_back(0.0);
    std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
               g.breakpoints().end(), std::back_inserter(cuts));
    cuts.push_back(1.0);
    double dist = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi);
        if (f.eval(mid) != g.eval(mid)) dist += hi - lo;
    }
    return dist;
}

}  // namespace aptest
