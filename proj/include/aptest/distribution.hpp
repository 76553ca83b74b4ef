#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/rng.hpp"

namespace aptest {

struct Uniform01 {};

struct GaussianIsotropic {
    std::size_t n;
};

// Mixture over N bins; bin i has mass p_i0 + p_i1 split between the two
// labels. A draw is (bin_index, payload) with payload ~ U[0,1); the payload
// determines the realized label through TargetFunction::BinnedTable.
struct BinnedMixture {
    std::vector<std::pair<double, double>> bins;  // (p_i0, p_i1)
    std::vector<double> cumulative;               // built on construction

    explicit BinnedMixture(std::vector<std::pair<double, double>> b) : bins(std::move(b)) {
        if (bins.empty()) throw BadSimplex("binned_mixture: no bins");
        double total = 0.0;
        cumulative.reserve(bins.size());
        for (const auto& [p0, p1] : bins) {
            if (p0 < 0.0 || p1 < 0.0) throw BadSimplex("binned_mixture: negative mass");
            total += p0 + p1;
            cumulative.push_back(total);
        }
        if (std::abs(total - 1.0) > 1e-12) throw BadSimplex("binned_mixture: masses must sum to 1");
        cumulative.back() = 1.0;
    }

    std::size_t bin_count() const { return bins.size(); }
};

// Finite weighted support in R^dim.
struct Empirical {
    std::size_t dim;
    std::vector<double> coords;   // flattened, atom i at [i*dim, (i+1)*dim)
    std::vector<double> weights;  // nonnegative, sum 1
    std::vector<double> cumulative;

    Empirical(std::size_t d, std::vector<double> flat, std::vector<double> w)
        : dim(d), coords(std::move(flat)), weights(std::move(w)) {
        if (dim == 0 || weights.empty() || coords.size() != weights.size() * dim)
            throw BadParams("empirical: inconsistent shapes");
        double total = 0.0;
        cumulative.reserve(weights.size());
        for (double wi : weights) {
            if (wi < 0.0) throw BadSimplex("empirical: negative weight");
            total += wi;
            cumulative.push_back(total);
        }
        if (std::abs(total - 1.0) > 1e-12) throw BadSimplex("empirical: weights must sum to 1");
        cumulative.back() = 1.0;
    }

    std::size_t atom_count() const { return weights.size(); }
    std::span<const double> atom(std::size_t i) const {
        return {coords.data() + i * dim, dim};
    }
};

struct UnitBallUniform {
    std::size_t d;
};

// Continuous distribution on [0,1] with piecewise-constant density; used to
// exercise the rank-space reduction on non-uniform D. Block i spans
// [edges[i-1], edges[i]) (edges ascend strictly inside (0,1)) and carries
// probability mass weights[i].
struct UnitPiecewiseDensity {
    std::vector<double> edges;
    std::vector<double> weights;
    std::vector<double> cumulative;

    UnitPiecewiseDensity(std::vector<double> e, std::vector<double> w)
        : edges(std::move(e)), weights(std::move(w)) {
        if (weights.size() != edges.size() + 1)
            throw BadParams("unit_piecewise: weights must be edges+1");
        double prev = 0.0;
        for (double x : edges) {
            if (!(x > prev) || !(x < 1.0)) throw BadParams("unit_piecewise: bad edges");
            prev = x;
        }
        double total = 0.0;
        for (double wi : weights) {
            if (wi < 0.0) throw BadSimplex("unit_piecewise: negative weight");
            total += wi;
            cumulative.push_back(total);
        }
        if (std::abs(total - 1.0) > 1e-12) throw BadSimplex("unit_piecewise: weights must sum to 1");
        cumulative.back() = 1.0;
    }

    double block_lo(std::size_t i) const { return i == 0 ? 0.0 : edges[i - 1]; }
    double block_hi(std::size_t i) const { return i == edges.size() ? 1.0 : edges[i]; }

    double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const auto it = std::upper_bound(edges.begin(), edges.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - edges.begin());
        const double lo = block_lo(i), hi = block_hi(i);
        const double below = i == 0 ? 0.0 : cumulative[i - 1];
        return below + weights[i] * (x - lo) / (hi - lo);
    }
};

using Distribution = std::variant<Uniform01, GaussianIsotropic, BinnedMixture, Empirical,
                                  UnitBallUniform, UnitPiecewiseDensity>;

inline std::size_t categorical_draw(const std::vector<double>& cumulative, Rng& rng) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
}

}  // namespace aptest
