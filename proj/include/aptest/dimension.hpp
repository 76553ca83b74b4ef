#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "aptest/decision_tree.hpp"
#include "aptest/errors.hpp"
#include "aptest/label_law.hpp"
#include "aptest/prior.hpp"
#include "aptest/rng.hpp"

namespace aptest {

struct DimensionEstimate {
    std::size_t q = 0;                  // largest q meeting the definition empirically
    std::vector<double> exceedance;     // per q = 1..q_max
};

namespace detail {

// conservative exceedance count: Monte-Carlo distances only count as > 1/4
// when the 2-sigma interval clears the threshold
inline bool exceeds_quarter(const DistanceEstimate& d) {
    if (d.exact) return d.value > 0.25;
    return d.value - 2.0 * d.se > 0.25;
}

template <typename ExceedFn>
DimensionEstimate largest_q_scan(std::size_t q_max, ExceedFn&& exceed_prob,
                                 const std::vector<double>& thresholds) {
    DimensionEstimate out;
    for (std::size_t q = 1; q <= q_max; ++q) {
        const double p = exceed_prob(q);
        out.exceedance.push_back(p);
        if (p <= thresholds[q - 1])
            out.q = q;
        else
            break;  // the exceedance event is monotone in q
    }
    return out;
}

}  // namespace detail

// Largest q with Pr_{S ~ D^q}( d_S(pi, pi') > 1/4 ) <= 1/4, estimated over
// `trials` query-set draws per q.
inline DimensionEstimate estimate_passive_dim(const FunctionPrior& pi,
                                              const FunctionPrior& pi_prime,
                                              const DomainSampler& domain, std::size_t q_max,
                                              std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw BadParams("estimate_passive_dim: trials must be >= 1");
    std::vector<double> thresholds(q_max, 0.25);
    return detail::largest_q_scan(
        q_max,
        [&](std::size_t q) {
            std::size_t exceed = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                Rng rng(trial_seed(seed, (q << 20) + t));
                const QuerySet s = domain.draw(q, rng);
                const LabelLaw a = label_law(pi, s, rng);
                const LabelLaw b = label_law(pi_prime, s, rng);
                if (detail::exceeds_quarter(variation_distance(a, b))) ++exceed;
            }
            return static_cast<double>(exceed) / static_cast<double>(trials);
        },
        thresholds);
}

// Same scan against the sharper threshold 1/n^q. Resolving a tail that small
// needs at least ~3 n^q trials; anything less is an error.
inline DimensionEstimate estimate_coarse_dim(const FunctionPrior& pi,
                                             const FunctionPrior& pi_prime,
                                             const DomainSampler& domain, std::size_t n,
                                             std::size_t q_max, std::size_t trials,
                                             std::uint64_t seed) {
    if (trials < 1) throw BadParams("estimate_coarse_dim: trials must be >= 1");
    std::vector<double> thresholds;
    for (std::size_t q = 1; q <= q_max; ++q) {
        const double tail = std::pow(static_cast<double>(n), -static_cast<double>(q));
        if (static_cast<double>(trials) < 3.0 / tail)
            throw InsufficientTrials("estimate_coarse_dim: trials cannot resolve 1/n^q tail");
        thresholds.push_back(tail);
    }
    return detail::largest_q_scan(
        q_max,
        [&](std::size_t q) {
            std::size_t exceed = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                Rng rng(trial_seed(seed, (q << 24) + t));
                const QuerySet s = domain.draw(q, rng);
                const LabelLaw a = label_law(pi, s, rng);
                const LabelLaw b = label_law(pi_prime, s, rng);
                if (detail::exceeds_quarter(variation_distance(a, b))) ++exceed;
            }
            return static_cast<double>(exceed) / static_cast<double>(trials);
        },
        thresholds);
}

// Largest q with Pr_{U ~ D^u}( err*(DT_q, Fair(pi, pi', U)) < 1/4 ) <= 1/4.
inline DimensionEstimate estimate_active_dim(const FunctionPrior& pi,
                                             const FunctionPrior& pi_prime,
                                             const DomainSampler& domain, std::size_t u,
                                             std::size_t q_max, std::size_t trials,
                                             std::uint64_t seed) {
    if (trials < 1) throw BadParams("estimate_active_dim: trials must be >= 1");
    std::vector<double> thresholds(q_max, 0.25);
    return detail::largest_q_scan(
        q_max,
        [&](std::size_t q) {
            std::size_t wins = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                Rng rng(trial_seed(seed, (q << 20) + t));
                const QuerySet s = domain.draw(u, rng);
                const LabelLaw a = label_law(pi, s, rng);
                const LabelLaw b = label_law(pi_prime, s, rng);
                if (optimal_dt_error(fair_law(a, b), u, static_cast<std::uint32_t>(q)) < 0.25)
                    ++wins;
            }
            return static_cast<double>(wins) / static_cast<double>(trials);
        },
        thresholds);
}

struct DictatorRatioResult {
    double violation_fraction = 0.0;  // fraction of S with some pi_S(y) > (6/5) 2^-q
    std::size_t trials = 0;
};

// Samples subsets S of size q from a fixed pool of uniform hypercube points
// and counts how often the dictator label law violates the per-labeling
// bound pi_S(y) <= (6/5) 2^-q.
inline DictatorRatioResult dictator_ratio_check(std::size_t n, std::size_t q,
                                                std::size_t pool_size, std::size_t trials,
                                                std::uint64_t seed) {
    if (q < 1 || q > 20) throw BadParams("dictator_ratio_check: q must be in 1..20");
    if (pool_size < q) throw BadParams("dictator_ratio_check: pool smaller than q");
    Rng rng(seed);
    const DomainSampler domain{DomainSampler::Kind::Hypercube, n, 0};
    const QuerySet pool = domain.draw(pool_size, rng);

    const double bound = 1.2 * std::ldexp(1.0, -static_cast<int>(q));
    const double unit = 1.0 / static_cast<double>(n);
    std::vector<std::uint32_t> counts(std::size_t{1} << q);
    std::vector<std::size_t> pick(q);
    std::size_t violations = 0;

    for (std::size_t t = 0; t < trials; ++t) {
        // q distinct pool rows
        for (std::size_t k = 0; k < q; ++k) {
            bool fresh = true;
            do {
                pick[k] = rng.below(pool_size);
                fresh = true;
                for (std::size_t j = 0; j < k; ++j)
                    if (pick[j] == pick[k]) fresh = false;
            } while (!fresh);
        }
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t col = 0; col < n; ++col) {
            Labeling y = 0;
            for (std::size_t k = 0; k < q; ++k)
                y |= static_cast<Labeling>(pool.bit(pick[k], col)) << k;
            ++counts[y];
        }
        std::uint32_t max_count = 0;
        for (auto c : counts) max_count = std::max(max_count, c);
        if (static_cast<double>(max_count) * unit > bound) ++violations;
    }
    return {static_cast<double>(violations) / static_cast<double>(trials), trials};
}

}  // namespace aptest
