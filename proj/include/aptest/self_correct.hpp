#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "aptest/noise_sensitivity.hpp"
#include "aptest/piecewise.hpp"

namespace aptest {

namespace detail {

// running integral of f up to t, clamped to [0,1]
class PrefixMass {
public:
    explicit PrefixMass(const PiecewiseConstantFn& f) : f_(&f) {
        prefix_.resize(f.block_count() + 1, 0.0);
        for (std::size_t i = 0; i < f.block_count(); ++i)
            prefix_[i + 1] =
                prefix_[i] + (f.block_values()[i] == 1 ? f.block_length(i) : 0.0);
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return prefix_.back();
        const auto& breaks = f_->breakpoints();
        const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        const auto i = static_cast<std::size_t>(it - breaks.begin());
        double m = prefix_[i];
        if (f_->block_values()[i] == 1) m += t - f_->block_start(i);
        return m;
    }

private:
    const PiecewiseConstantFn* f_;
    std::vector<double> prefix_;
};

struct Run {
    double start, end;
    int value;
};

inline std::vector<Run> prune_to_d_intervals(std::vector<Run> runs, std::size_t d) {
    auto positive_count = [&] {
        std::size_t c = 0;
        for (const auto& r : runs)
            if (r.value == 1) ++c;
        return c;
    };
    auto coalesce = [&] {
        std::vector<Run> out;
        for (const auto& r : runs) {
            if (!(r.end - r.start > 0.0)) continue;
            if (!out.empty() && out.back().value == r.value)
                out.back().end = r.end;
            else
                out.push_back(r);
        }
        runs = std::move(out);
    };
    coalesce();
    while (positive_count() > d) {
        std::size_t shortest = runs.size();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (runs[i].value != 1) continue;
            if (shortest == runs.size() ||
                runs[i].end - runs[i].start < runs[shortest].end - runs[shortest].start)
                shortest = i;
        }
        runs[shortest].value = 0;
        coalesce();
    }
    return runs;
}

inline PiecewiseConstantFn runs_to_fn(const std::vector<Run>& runs) {
    std::vector<double> breaks;
    std::vector<int> values;
    for (const auto& r : runs) {
        if (!(r.end - r.start > 1e-14)) continue;
        if (!values.empty() && values.back() == r.value) continue;
        if (!values.empty() && r.start > 0.0 && r.start < 1.0) breaks.push_back(r.start);
        values.push_back(r.value);
    }
    if (values.empty()) values.push_back(0);
    return PiecewiseConstantFn(std::move(breaks), std::move(values)).normalized();
}

}  // namespace detail

// Local self-correction: smooth f to f_delta(x) = E_{y ~delta x} f(y) (the
// mean over the clipped window, so constants are fixed points), classify
// against tau = (4/eps) NS_delta(f) into {0, 1, undefined}, resolve
// undefined stretches from the nearest defined value to the left (0 when
// none), then delete shortest positive intervals until at most d remain.
//
// On each piece between structural kink points f_delta is a ratio of two
// linear functions, so threshold crossings are solved exactly.
inline PiecewiseConstantFn self_correct(const PiecewiseConstantFn& f, double delta, double eps,
                                        std::size_t d) {
    if (!(delta > 0.0 && delta < 1.0)) throw BadParams("self_correct: delta in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("self_correct: eps in (0,1)");

    const double tau = (4.0 / eps) * noise_sensitivity_exact(f, delta);
    const detail::PrefixMass prefix(f);
    auto positive_mass_in_window = [&](double x) {
        return prefix(std::min(x + delta, 1.0)) - prefix(std::max(x - delta, 0.0));
    };

    std::vector<double> kinks{0.0, 1.0};
    auto push = [&](double x) {
        if (x > 0.0 && x < 1.0) kinks.push_back(x);
    };
    push(delta);
    push(1.0 - delta);
    for (double b : f.breakpoints()) {
        push(b - delta);
        push(b + delta);
    }
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                kinks.end());

    constexpr int kUndefined = 2;
    auto classify = [&](double v) {
        if (v >= 1.0 - tau) return 1;
        if (v <= tau) return 0;
        return kUndefined;
    };

    std::vector<detail::Run> regions;
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
        const double u = kinks[i], v = kinks[i + 1];
        // window width A + B x on this piece
        double A, B;
        const bool clip_left = v <= delta + 1e-14;
        const bool clip_right = u >= 1.0 - delta - 1e-14;
        if (clip_left && clip_right) {
            A = 1.0;
            B = 0.0;
        } else if (clip_left) {
            A = delta;
            B = 1.0;
        } else if (clip_right) {
            A = 1.0 + delta;
            B = -1.0;
        } else {
            A = 2.0 * delta;
            B = 0.0;
        }
        // positive window mass a + b x on this piece
        const double nu = positive_mass_in_window(u);
        const double nv = positive_mass_in_window(v);
        const double b = (nv - nu) / (v - u);
        const double a = nu - b * u;

        // f_delta = (a + b x)/(A + B x) is monotone here; cut at threshold
        // crossings and classify each slice at its midpoint
        std::vector<double> cuts{u, v};
        for (double level : {tau, 1.0 - tau}) {
            const double denom = b - level * B;
            if (denom == 0.0) continue;
            const double x = (level * A - a) / denom;
            if (x > u + 1e-15 && x < v - 1e-15) cuts.push_back(x);
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
            const double value = positive_mass_in_window(mid) /
                                 (A + B * mid);
            regions.push_back({cuts[j], cuts[j + 1], classify(value)});
        }
    }

    // resolve undefined stretches leftward; leading stretch defaults to 0
    int last_defined = 0;
    for (auto& r : regions) {
        if (r.value == kUndefined)
            r.value = last_defined;
        else
            last_defined = r.value;
    }

    return detail::runs_to_fn(detail::prune_to_d_intervals(std::move(regions), d));
}

}  // namespace aptest
