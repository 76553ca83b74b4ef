#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"

namespace aptest {

struct ClusterTesterConfig {
    double c_n = 4.0;   // unlabeled sample size ceil(c_n * N / eps)
    int boost = 3;      // single pass detects with prob ~1 - 1/e; majority of 3 clears 2/3
};

namespace detail {

// One pass of the cluster check over pre-grouped sample ids: repeat
// ceil(4/eps) times {pick random x; if its group has another member, compare
// its label with a random other member}. Rejects on any disagreement.
inline Decision cluster_pass(ActiveOracle& oracle, std::span<const PointId> pool,
                             const std::vector<std::vector<PointId>>& groups,
                             const std::vector<std::uint32_t>& group_of, double eps) {
    if (pool.empty()) return Decision::Accept;
    const auto rounds = static_cast<std::uint64_t>(std::ceil(4.0 / eps));
    Rng& rng = oracle.rng();
    for (std::uint64_t r = 0; r < rounds; ++r) {
        const std::uint64_t pick = rng.below(pool.size());
        const PointId x = pool[pick];
        const auto& mates = groups[group_of[pick]];
        if (mates.size() < 2) continue;  // x is the only example in its bin
        PointId y = x;
        while (y == x) y = mates[rng.below(mates.size())];
        if (oracle.query_label(x) != oracle.query_label(y)) return Decision::Reject;
    }
    return Decision::Accept;
}

inline Decision cluster_majority(ActiveOracle& oracle, std::span<const PointId> pool,
                                 const std::vector<std::vector<PointId>>& groups,
                                 const std::vector<std::uint32_t>& group_of, double eps,
                                 int boost) {
    int rejects = 0;
    for (int b = 0; b < boost; ++b)
        if (cluster_pass(oracle, pool, groups, group_of, eps) == Decision::Reject) ++rejects;
    return 2 * rejects > boost ? Decision::Reject : Decision::Accept;
}

}  // namespace detail

// Cluster-assumption tester over N given bins: accept unless two samples in
// the same bin carry different labels.
inline TesterVerdict test_cluster(ActiveOracle& oracle, std::size_t bins, double eps,
                                  const ClusterTesterConfig& cfg = {}) {
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("test_cluster: eps must be in (0,1)");
    const auto* mix = std::get_if<BinnedMixture>(&oracle.distribution());
    if (mix == nullptr || mix->bin_count() != bins)
        throw BadParams("test_cluster: oracle must be a binned mixture with N bins");

    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();

    const auto pool_size =
        static_cast<std::uint64_t>(std::ceil(cfg.c_n * static_cast<double>(bins) / eps));
    const std::vector<PointId> pool = oracle.draw_unlabeled(pool_size);
    std::vector<std::vector<PointId>> groups(bins);
    std::vector<std::uint32_t> group_of(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto bin = static_cast<std::uint32_t>(oracle.binned(pool[i]).bin_index - 1);
        group_of[i] = bin;
        groups[bin].push_back(pool[i]);
    }

    int rejects = 0;
    for (int b = 0; b < cfg.boost; ++b)
        if (detail::cluster_pass(oracle, pool, groups, group_of, eps) == Decision::Reject)
            ++rejects;

    TesterVerdict v;
    v.decision = 2 * rejects > cfg.boost ? Decision::Reject : Decision::Accept;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    v.statistic = static_cast<double>(rejects) / static_cast<double>(cfg.boost);
    v.threshold = 0.5;
    return v;
}

}  // namespace aptest
