#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"

namespace aptest {

// A tester for one component property, runnable at failure probability
// delta. labels_needed/points_needed give its q_delta / U_delta budgets.
struct SubTester {
    std::function<std::uint64_t(double eps, double delta)> labels_needed;
    std::function<std::uint64_t(double eps, double delta)> points_needed;
    std::function<Decision(ActiveOracle&, std::span<const PointId>, double eps, double delta)> run;
};

// Tester for the property {f == 0 or f == 1} on a component: look at
// ceil(ln(1/delta)/eps) labels and reject iff both labels appear. A function
// eps-far from constant survives with probability at most (1-eps)^q <= delta.
inline SubTester constant_subtester() {
    auto budget = [](double eps, double delta) {
        return static_cast<std::uint64_t>(std::ceil(std::log(1.0 / delta) / eps));
    };
    SubTester t;
    t.labels_needed = budget;
    t.points_needed = budget;
    t.run = [budget](ActiveOracle& oracle, std::span<const PointId> ids, double eps,
                     double delta) {
        const std::uint64_t want = std::min<std::uint64_t>(budget(eps, delta), ids.size());
        int first = -1;
        for (std::uint64_t i = 0; i < want; ++i) {
            const int l = oracle.query_label(ids[i]);
            if (first < 0)
                first = l;
            else if (l != first)
                return Decision::Reject;
        }
        return Decision::Accept;
    };
    return t;
}

struct DisjointUnionConfig {
    double c_rounds = 9.0;  // rounds per level: ceil(c_rounds*(eps'/eps)*log2(1/eps))
    double total_cap_factor = 8.0;  // bail-out after (8N/eps)*U_delta(eps') draws
};

// Appendix-style combinator: for the halving schedule eps' = 1/2, 1/4, ...,
// eps/2, repeatedly pick a random component, fill its sub-tester's unlabeled
// budget from the stream (with a global bail-out), and run the sub-tester at
// parameter eps' and failure probability delta = eps^2.
inline TesterVerdict test_disjoint_union(ActiveOracle& oracle,
                                         const std::vector<SubTester>& testers, std::size_t bins,
                                         double eps, const DisjointUnionConfig& cfg = {}) {
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("disjoint union: eps must be in (0,1)");
    const auto* mix = std::get_if<BinnedMixture>(&oracle.distribution());
    if (mix == nullptr || mix->bin_count() != bins || testers.size() != bins)
        throw BadParams("disjoint union: need a binned mixture and one tester per bin");

    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();
    const double delta = eps * eps;
    const double log_eps = std::max(1.0, std::log2(1.0 / eps));

    Decision decision = Decision::Accept;
    for (double eps_level = 0.5; decision == Decision::Accept; eps_level /= 2.0) {
        const auto rounds = static_cast<std::uint64_t>(
            std::ceil(cfg.c_rounds * (eps_level / eps) * log_eps));
        for (std::uint64_t round = 0; round < rounds && decision == Decision::Accept; ++round) {
            const PointId probe = oracle.draw_one();
            const int bin = oracle.binned(probe).bin_index;

            const std::size_t idx = static_cast<std::size_t>(bin - 1);
            const std::uint64_t want = testers[idx].points_needed(eps_level, delta);
            const auto cap = static_cast<std::uint64_t>(
                std::ceil(cfg.total_cap_factor * static_cast<double>(bins) / eps *
                          static_cast<double>(want)));

            std::vector<PointId> hits;
            hits.reserve(want);
            for (std::uint64_t drawn = 0; hits.size() < want && drawn < cap; ++drawn) {
                const PointId id = oracle.draw_one();
                if (oracle.binned(id).bin_index == bin) hits.push_back(id);
            }
            if (hits.size() < want) continue;  // light component; bail out of this round

            try {
                if (testers[idx].run(oracle, hits, eps_level, delta) == Decision::Reject)
                    decision = Decision::Reject;
            } catch (const std::exception& e) {
                throw SubTesterFailure(bin, e.what());
            }
        }
        if (eps_level <= eps / 2.0) break;
    }

    TesterVerdict v;
    v.decision = decision;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    return v;
}

}  // namespace aptest
