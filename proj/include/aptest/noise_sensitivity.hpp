#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"
#include "aptest/piecewise.hpp"

namespace aptest {

struct NoiseParams {
    double delta;
    std::uint64_t rounds;

    NoiseParams(double d, std::uint64_t r) : delta(d), rounds(r) {
        if (!(delta > 0.0)) throw BadParams("noise params: delta must be > 0");
        if (rounds < 1) throw BadParams("noise params: rounds must be >= 1");
    }
};

namespace detail {

// mass of the opposite value inside the clipped window (x-delta, x+delta) n [0,1]
inline double opposite_mass(const PiecewiseConstantFn& f, double x, double delta) {
    const double lo = std::max(x - delta, 0.0);
    const double hi = std::min(x + delta, 1.0);
    const int fx = f.eval(x);
    double mass = 0.0;
    for (std::size_t i = 0; i < f.block_count(); ++i) {
        if (f.block_values()[i] == fx) continue;
        const double a = std::max(f.block_start(i), lo);
        const double b = std::min(f.block_end(i), hi);
        if (b > a) mass += b - a;
    }
    return mass;
}

// integral of (a0 + b s) / (A0 + B s) for s in [-h, h] (piece-centered
// coordinates; keeps the a0 - b A0/B cancellation at the scale of the
// integrand instead of the scale of the domain)
inline double rational_integral_centered(double a0, double b, double A0, double B, double h) {
    if (B == 0.0) return 2.0 * h * a0 / A0;
    return (b / B) * 2.0 * h + (a0 - b * A0 / B) / B * std::log((A0 + B * h) / (A0 - B * h));
}

}  // namespace detail

// NS_delta(f) = Pr_{x, y ~_delta x}[f(x) != f(y)] with y uniform on
// (x-delta, x+delta) n [0,1]. The local rate opp(x)/width(x) is a ratio of
// piecewise-linear functions whose kinks all lie in {b_i, b_i +- delta,
// delta, 1-delta}; integrating each smooth piece in closed form gives the
// value to machine precision.
inline double noise_sensitivity_exact(const PiecewiseConstantFn& f, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw BadParams("noise_sensitivity_exact: delta in (0,1)");

    std::vector<double> cuts{0.0, 1.0};
    auto push = [&](double x) {
        if (x > 0.0 && x < 1.0) cuts.push_back(x);
    };
    push(delta);
    push(1.0 - delta);
    for (double b : f.breakpoints()) {
        push(b);
        push(b - delta);
        push(b + delta);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               cuts.end());

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double u = cuts[i], v = cuts[i + 1];
        if (!(v - u > 1e-13)) continue;
        const double m = 0.5 * (u + v);
        const double h = 0.5 * (v - u);
        // window width at the midpoint and its slope on this piece
        double width_mid, slope;
        const bool clip_left = v <= delta + 1e-13;
        const bool clip_right = u >= 1.0 - delta - 1e-13;
        if (clip_left && clip_right) {
            width_mid = 1.0;
            slope = 0.0;
        } else if (clip_left) {
            width_mid = m + delta;
            slope = 1.0;
        } else if (clip_right) {
            width_mid = 1.0 - m + delta;
            slope = -1.0;
        } else {
            width_mid = 2.0 * delta;
            slope = 0.0;
        }
        // opposite mass is linear on the piece: midpoint value + endpoint slope
        const double eps_in = h * 1e-9;
        const double ou = detail::opposite_mass(f, u + eps_in, delta);
        const double ov = detail::opposite_mass(f, v - eps_in, delta);
        const double om = detail::opposite_mass(f, m, delta);
        const double b = (ov - ou) / (v - u - 2.0 * eps_in);
        total += detail::rational_integral_centered(om, b, width_mid, slope, h);
    }
    return std::max(0.0, total);
}

// Tester-box estimator: r rounds of (draw x; rejection-sample y into the
// delta-window; compare labels). Costs exactly 2r label requests.
inline double estimate_noise_sensitivity(ActiveOracle& oracle, const NoiseParams& params,
                                         double rejection_cap_factor = 64.0) {
    if (!std::holds_alternative<Uniform01>(oracle.distribution()))
        throw BadParams("estimate_noise_sensitivity: oracle must draw from uniform01");
    const double delta = params.delta;
    const std::uint64_t cap =
        static_cast<std::uint64_t>(std::ceil(rejection_cap_factor / delta));
    std::uint64_t disagreements = 0;
    for (std::uint64_t round = 0; round < params.rounds; ++round) {
        const PointId xid = oracle.draw_one();
        const double x = oracle.unit(xid);
        PointId yid = 0;
        bool found = false;
        for (std::uint64_t tries = 0; tries < cap; ++tries) {
            yid = oracle.draw_one();
            if (std::abs(oracle.unit(yid) - x) < delta) {
                found = true;
                break;
            }
        }
        if (!found)
            throw SampleBudgetExceeded("noise estimator: rejection cap hit; delta too small");
        if (oracle.query_label(xid) != oracle.query_label(yid)) ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(params.rounds);
}

}  // namespace aptest
