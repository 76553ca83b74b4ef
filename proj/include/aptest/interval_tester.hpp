#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/noise_sensitivity.hpp"
#include "aptest/oracle.hpp"
#include "aptest/rng.hpp"

namespace aptest {

struct IntervalTesterConfig {
    double c_r = 64.0;        // rounds r = ceil(c_r / eps^4)
    double c_gamma = 2.0;     // calibration sample size ceil(c_gamma / gamma^2)
    double rejection_cap_factor = 64.0;
    std::optional<double> delta_override;  // testing hook; must stay < 1
};

namespace detail {

struct IntervalParams {
    double delta;
    std::uint64_t rounds;
    double threshold;
};

inline IntervalParams interval_params(std::uint64_t d, double eps,
                                      const IntervalTesterConfig& cfg) {
    if (d < 1) throw BadParams("interval tester: d must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("interval tester: eps must be in (0,1)");
    const double delta =
        cfg.delta_override ? *cfg.delta_override : eps * eps / (32.0 * static_cast<double>(d));
    if (delta >= 1.0) throw BadParams("interval tester: delta >= 1");
    if (!(delta > 0.0)) throw BadParams("interval tester: delta must be > 0");
    const auto rounds =
        static_cast<std::uint64_t>(std::ceil(cfg.c_r / (eps * eps * eps * eps)));
    const double threshold = static_cast<double>(d) * delta * (1.0 + eps / 8.0);
    return {delta, std::max<std::uint64_t>(rounds, 1), threshold};
}

inline TesterVerdict verdict_from(ActiveOracle& oracle, std::uint64_t u0, std::uint64_t l0,
                                  double statistic, double threshold) {
    TesterVerdict v;
    v.decision = statistic <= threshold ? Decision::Accept : Decision::Reject;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    v.statistic = statistic;
    v.threshold = threshold;
    return v;
}

// first stream pair closer than delta in transformed space; returns ids
template <typename Transform>
inline std::pair<PointId, PointId> first_close_pair(ActiveOracle& oracle, double delta,
                                                    std::uint64_t cap, Transform&& value_of) {
    std::vector<std::pair<double, PointId>> seen;  // kept sorted by value
    for (std::uint64_t tries = 0; tries < cap; ++tries) {
        const PointId id = oracle.draw_one();
        const double v = value_of(id);
        const auto it = std::lower_bound(seen.begin(), seen.end(), std::make_pair(v, PointId{0}));
        if (it != seen.end() && it->first - v < delta) return {it->second, id};
        if (it != seen.begin() && v - std::prev(it)->first < delta)
            return {std::prev(it)->second, id};
        seen.insert(it, {v, id});
    }
    throw SampleBudgetExceeded("pair scan: cap hit without a close pair");
}

}  // namespace detail

// Noise-sensitivity tester over the uniform distribution: estimate NS_delta
// with r rounds and accept iff the estimate is at most d*delta*(1 + eps/8).
inline TesterVerdict test_union_intervals_uniform(ActiveOracle& oracle, std::uint64_t d,
                                                  double eps,
                                                  const IntervalTesterConfig& cfg = {}) {
    const auto p = detail::interval_params(d, eps, cfg);
    if (!std::holds_alternative<Uniform01>(oracle.distribution()))
        throw BadParams("uniform interval tester: oracle must draw from uniform01");
    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();
    const double estimate = estimate_noise_sensitivity(oracle, NoiseParams(p.delta, p.rounds),
                                                       cfg.rejection_cap_factor);
    return detail::verdict_from(oracle, u0, l0, estimate, p.threshold);
}

// Same statistic, but each round takes the first close pair in the unlabeled
// stream instead of rejection-sampling around a fixed anchor; cuts the
// unlabeled budget to O(sqrt(d)/eps^5).
inline TesterVerdict test_union_intervals_pairs(ActiveOracle& oracle, std::uint64_t d, double eps,
                                                const IntervalTesterConfig& cfg = {}) {
    const auto p = detail::interval_params(d, eps, cfg);
    if (!std::holds_alternative<Uniform01>(oracle.distribution()))
        throw BadParams("pair interval tester: oracle must draw from uniform01");
    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();
    const auto cap =
        static_cast<std::uint64_t>(std::ceil(cfg.rejection_cap_factor / p.delta));
    std::uint64_t disagreements = 0;
    for (std::uint64_t round = 0; round < p.rounds; ++round) {
        const auto [xid, yid] = detail::first_close_pair(
            oracle, p.delta, cap, [&](PointId id) { return oracle.unit(id); });
        if (oracle.query_label(xid) != oracle.query_label(yid)) ++disagreements;
    }
    const double estimate =
        static_cast<double>(disagreements) / static_cast<double>(p.rounds);
    return detail::verdict_from(oracle, u0, l0, estimate, p.threshold);
}

// empirical CDF rank: fraction of the sample at or below x
inline double empirical_cdf_rank(std::span<const double> sample, double x) {
    if (sample.empty()) throw EmptyInput("empirical_cdf_rank: empty sample");
    std::size_t count = 0;
    for (double s : sample)
        if (s <= x) ++count;
    return static_cast<double>(count) / static_cast<double>(sample.size());
}

// Tie rule for distributions with atoms: p drawn uniformly in [p^L, p^U].
inline double empirical_cdf_rank_tied(std::span<const double> sorted_sample, double x, Rng& rng) {
    if (sorted_sample.empty()) throw EmptyInput("empirical_cdf_rank_tied: empty sample");
    const auto lo = std::lower_bound(sorted_sample.begin(), sorted_sample.end(), x);
    const auto hi = std::upper_bound(sorted_sample.begin(), sorted_sample.end(), x);
    const double n = static_cast<double>(sorted_sample.size());
    const double pl = static_cast<double>(lo - sorted_sample.begin()) / n;
    const double pu = static_cast<double>(hi - sorted_sample.begin()) / n;
    return pl == pu ? pl : rng.uniform(pl, pu);
}

// Arbitrary (unknown) continuous distribution: calibrate an empirical CDF
// from O(1/gamma^2) unlabeled draws with gamma = eps*delta/8, then run the
// pair tester in rank space.
inline TesterVerdict test_union_intervals_general(ActiveOracle& oracle, std::uint64_t d,
                                                  double eps,
                                                  const IntervalTesterConfig& cfg = {}) {
    const auto p = detail::interval_params(d, eps, cfg);
    const bool unit_kind = std::holds_alternative<Uniform01>(oracle.distribution()) ||
                           std::holds_alternative<UnitPiecewiseDensity>(oracle.distribution());
    if (!unit_kind)
        throw BadParams("general interval tester: needs a continuous distribution on [0,1]");
    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();

    const double gamma = eps * p.delta / 8.0;
    const auto calibration_size =
        static_cast<std::uint64_t>(std::ceil(cfg.c_gamma / (gamma * gamma)));
    std::vector<double> calib;
    calib.reserve(calibration_size);
    for (std::uint64_t i = 0; i < calibration_size; ++i) calib.push_back(oracle.unit(oracle.draw_one()));
    std::sort(calib.begin(), calib.end());
    const double n = static_cast<double>(calib.size());
    auto rank = [&](double x) {
        const auto it = std::upper_bound(calib.begin(), calib.end(), x);
        return static_cast<double>(it - calib.begin()) / n;
    };

    const auto cap =
        static_cast<std::uint64_t>(std::ceil(cfg.rejection_cap_factor / p.delta));
    std::uint64_t disagreements = 0;
    for (std::uint64_t round = 0; round < p.rounds; ++round) {
        const auto [xid, yid] = detail::first_close_pair(
            oracle, p.delta, cap, [&](PointId id) { return rank(oracle.unit(id)); });
        if (oracle.query_label(xid) != oracle.query_label(yid)) ++disagreements;
    }
    const double estimate =
        static_cast<double>(disagreements) / static_cast<double>(p.rounds);
    return detail::verdict_from(oracle, u0, l0, estimate, p.threshold);
}

}  // namespace aptest
