#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"
#include "aptest/rng.hpp"

namespace aptest {

struct UStatConfig {
    double tau;
    std::uint64_t m;

    UStatConfig(double t, std::uint64_t points) : tau(t), m(points) {
        if (!(tau > 0.0)) throw BadParams("ustat: tau must be > 0");
        if (m < 2) throw BadParams("ustat: m must be >= 2");
    }
};

struct SelfCorrelationEstimate {
    double rho = 0.0;          // truncated pair-kernel mean
    double mu = 0.0;           // mean of the +-1 labels
    std::uint64_t points = 0;
    std::uint64_t pairs = 0;
    double se = 0.0;           // i.i.d.-pair standard error (conservative)
};

namespace detail {

inline double pair_kernel(std::span<const double> x, std::span<const double> y, int lx, int ly,
                          double tau) {
    double dot = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * y[k];
    if (std::abs(dot) > tau) return 0.0;
    return static_cast<double>(lx * ly) * dot;
}

}  // namespace detail

// Core of the truncated self-correlation estimate over a fixed labeled
// sample: average f(x_i) f(x_j) <x_i, x_j> 1[|<x_i, x_j>| <= tau] over
// unordered pairs. When the full pair set exceeds pair_cap, a uniform
// without-replacement subsample of pair_cap pairs is used instead, which
// keeps the estimate unbiased. In full-pair mode the kernel values are
// summed in sorted order, so the result is invariant under permutations of
// the sample.
inline SelfCorrelationEstimate self_correlation_from_sample(
    const std::vector<std::span<const double>>& points, const std::vector<int>& labels_pm,
    double tau, std::uint64_t pair_cap, Rng& rng) {
    const std::uint64_t m = points.size();
    if (m < 2 || labels_pm.size() != m) throw BadParams("self correlation: need m >= 2 points");

    SelfCorrelationEstimate out;
    out.points = m;
    double label_sum = 0.0;
    for (int l : labels_pm) label_sum += l;
    out.mu = label_sum / static_cast<double>(m);

    const std::uint64_t all_pairs = m * (m - 1) / 2;
    std::vector<double> kernels;
    if (all_pairs <= pair_cap) {
        kernels.reserve(all_pairs);
        for (std::uint64_t i = 0; i < m; ++i)
            for (std::uint64_t j = i + 1; j < m; ++j)
                kernels.push_back(
                    detail::pair_kernel(points[i], points[j], labels_pm[i], labels_pm[j], tau));
        std::sort(kernels.begin(), kernels.end());
    } else {
        kernels.reserve(pair_cap);
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(pair_cap * 2);
        while (kernels.size() < pair_cap) {
            std::uint64_t i = rng.below(m);
            std::uint64_t j = rng.below(m);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            if (!chosen.insert(i * m + j).second) continue;
            kernels.push_back(
                detail::pair_kernel(points[i], points[j], labels_pm[i], labels_pm[j], tau));
        }
    }

    long double sum = 0.0L, sumsq = 0.0L;
    for (double k : kernels) {
        sum += k;
        sumsq += static_cast<long double>(k) * k;
    }
    const auto p = static_cast<double>(kernels.size());
    out.pairs = kernels.size();
    out.rho = static_cast<double>(sum / p);
    const double var = std::max(0.0, static_cast<double>(sumsq / p) - out.rho * out.rho);
    out.se = std::sqrt(var / p);
    return out;
}

// Oracle-facing wrapper: draws m points and queries each label exactly once.
inline SelfCorrelationEstimate estimate_self_correlation(ActiveOracle& oracle,
                                                         const UStatConfig& cfg,
                                                         std::uint64_t pair_cap = 5'000'000) {
    const auto* g = std::get_if<GaussianIsotropic>(&oracle.distribution());
    if (g == nullptr) throw BadParams("self correlation: oracle must be gaussian");

    const std::vector<PointId> ids = oracle.draw_unlabeled(cfg.m);
    std::vector<std::span<const double>> points;
    std::vector<int> labels(cfg.m);
    points.reserve(cfg.m);
    for (std::uint64_t i = 0; i < cfg.m; ++i) {
        points.push_back(oracle.vec(ids[i]));
        labels[i] = oracle.query_label(ids[i]) == 1 ? 1 : -1;
    }
    return self_correlation_from_sample(points, labels, cfg.tau, pair_cap, oracle.rng());
}

struct GapEstimate {
    double gap = 0.0;  // |mean g - mean g*| on common pairs
    double se = 0.0;
};

// Monte-Carlo gap between the untruncated and tau-truncated kernels on
// common random pairs; LabelFn maps a point to a +-1 label.
template <typename LabelFn>
inline GapEstimate truncation_gap(LabelFn&& label_of, std::size_t n, double tau,
                                  std::uint64_t pairs, Rng& rng) {
    if (pairs < 1) throw BadParams("truncation_gap: need pairs >= 1");
    std::vector<double> x(n), y(n);
    long double sum = 0.0L, sumsq = 0.0L;
    for (std::uint64_t t = 0; t < pairs; ++t) {
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = rng.gaussian();
            y[k] = rng.gaussian();
            dot += x[k] * y[k];
        }
        double diff = 0.0;  // g - g* is nonzero only outside the truncation band
        if (std::abs(dot) > tau) {
            const int lx = label_of(std::span<const double>(x));
            const int ly = label_of(std::span<const double>(y));
            diff = static_cast<double>(lx * ly) * dot;
        }
        sum += diff;
        sumsq += static_cast<long double>(diff) * diff;
    }
    const auto p = static_cast<double>(pairs);
    const double mean = static_cast<double>(sum / p);
    const double var = std::max(0.0, static_cast<double>(sumsq / p) - mean * mean);
    return {std::abs(mean), std::sqrt(var / p)};
}

}  // namespace aptest
