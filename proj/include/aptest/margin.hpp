#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "aptest/cluster_tester.hpp"
#include "aptest/errors.hpp"
#include "aptest/oracle.hpp"

namespace aptest {

// Axis-aligned grid cells covering the unit ball, each of diameter at most
// gamma/(2c).
struct RegionPartition {
    std::size_t dim = 0;
    double cell_side = 0.0;
    double gamma = 0.0;
    double c = 0.0;
    std::size_t cells_per_axis = 0;
    std::vector<std::vector<double>> lo;  // region id -> lower corner
    std::unordered_map<std::uint64_t, std::uint32_t> index;  // grid key -> region id

    std::size_t region_count() const { return lo.size(); }

    std::uint64_t grid_key(std::span<const std::int64_t> idx) const {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < idx.size(); ++k)
            key = key * (cells_per_axis + 1) + static_cast<std::uint64_t>(idx[k]);
        return key;
    }

    // region containing x, or -1 when x falls in a cell outside the cover
    std::int64_t locate(std::span<const double> x) const {
        std::vector<std::int64_t> idx(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            const auto i = static_cast<std::int64_t>(std::floor((x[k] + 1.0) / cell_side));
            if (i < 0 || i >= static_cast<std::int64_t>(cells_per_axis)) return -1;
            idx[k] = i;
        }
        const auto it = index.find(grid_key(idx));
        return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
    }

    // largest distance between any two points of cells i and j (box corners)
    double union_diameter(std::size_t i, std::size_t j) const {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double lo_k = std::min(lo[i][k], lo[j][k]);
            const double hi_k = std::max(lo[i][k], lo[j][k]) + cell_side;
            s += (hi_k - lo_k) * (hi_k - lo_k);
        }
        return std::sqrt(s);
    }

    // smallest distance between cells i and j
    double separation(std::size_t i, std::size_t j) const {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double gap =
                std::max({lo[i][k] - (lo[j][k] + cell_side), lo[j][k] - (lo[i][k] + cell_side), 0.0});
            s += gap * gap;
        }
        return std::sqrt(s);
    }
};

inline RegionPartition partition_unit_ball(std::size_t d, double gamma, double c,
                                           std::size_t region_cap = 1'000'000) {
    if (d < 1) throw BadParams("partition: d must be >= 1");
    if (!(gamma > 0.0)) throw BadParams("partition: gamma must be > 0");
    if (!(c > 1.0)) throw BadParams("partition: c must be > 1");

    RegionPartition p;
    p.dim = d;
    p.gamma = gamma;
    p.c = c;
    if (gamma >= 2.0) {
        // every pair of ball points is within gamma; one region covers it
        p.cell_side = 2.0;
        p.cells_per_axis = 1;
        p.lo.push_back(std::vector<double>(d, -1.0));
        std::vector<std::int64_t> zero(d, 0);
        p.index.emplace(p.grid_key(zero), 0u);
        return p;
    }
    p.cell_side = gamma / (2.0 * c * std::sqrt(static_cast<double>(d)));
    p.cells_per_axis = static_cast<std::size_t>(std::ceil(2.0 / p.cell_side));

    double total = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        total *= static_cast<double>(p.cells_per_axis);
        if (total > static_cast<double>(region_cap) * 4.0)
            throw RegionBlowup("partition: grid would exceed the region cap");
    }

    std::vector<std::int64_t> idx(d, 0);
    std::vector<double> corner(d);
    while (true) {
        // keep the cell iff its nearest point to the origin is inside the ball
        double near2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            corner[k] = -1.0 + static_cast<double>(idx[k]) * p.cell_side;
            const double lo_k = corner[k], hi_k = corner[k] + p.cell_side;
            if (lo_k > 0.0)
                near2 += lo_k * lo_k;
            else if (hi_k < 0.0)
                near2 += hi_k * hi_k;
        }
        if (near2 <= 1.0) {
            if (p.lo.size() >= region_cap) throw RegionBlowup("partition: region cap exceeded");
            p.index.emplace(p.grid_key(idx), static_cast<std::uint32_t>(p.lo.size()));
            p.lo.push_back(corner);
        }
        std::size_t k = 0;
        while (k < d && ++idx[k] == static_cast<std::int64_t>(p.cells_per_axis)) idx[k++] = 0;
        if (k == d) break;
    }
    return p;
}

struct RegionGraph {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // diam(R_i u R_j) < gamma
    std::vector<double> w_hat;                                   // min of empirical masses
    std::size_t max_degree = 0;
};

inline RegionGraph build_margin_graph(const RegionPartition& p,
                                      const std::vector<double>& region_mass) {
    if (region_mass.size() != p.region_count())
        throw BadParams("margin graph: one mass per region required");
    RegionGraph g;
    std::vector<std::size_t> degree(p.region_count(), 0);
    // cells further apart than gamma along any axis cannot form an edge,
    // so scan only nearby grid cells
    const auto reach = static_cast<std::int64_t>(std::ceil(p.gamma / p.cell_side));
    std::vector<std::int64_t> idx(p.dim), nb(p.dim);
    for (std::uint32_t i = 0; i < p.region_count(); ++i) {
        for (std::size_t k = 0; k < p.dim; ++k)
            idx[k] = static_cast<std::int64_t>(std::llround((p.lo[i][k] + 1.0) / p.cell_side));
        // enumerate neighbor offsets
        std::vector<std::int64_t> off(p.dim, -reach);
        while (true) {
            bool ok = true;
            for (std::size_t k = 0; k < p.dim; ++k) {
                nb[k] = idx[k] + off[k];
                if (nb[k] < 0 || nb[k] >= static_cast<std::int64_t>(p.cells_per_axis)) ok = false;
            }
            if (ok) {
                const auto it = p.index.find(p.grid_key(nb));
                if (it != p.index.end() && it->second > i &&
                    p.union_diameter(i, it->second) < p.gamma) {
                    g.edges.emplace_back(i, it->second);
                    g.w_hat.push_back(std::min(region_mass[i], region_mass[it->second]));
                    ++degree[i];
                    ++degree[it->second];
                }
            }
            std::size_t k = 0;
            while (k < p.dim && ++off[k] > reach) off[k++] = -reach;
            if (k == p.dim) break;
        }
    }
    for (std::size_t d : degree) g.max_degree = std::max(g.max_degree, d);
    return g;
}

struct MarginTesterConfig {
    double c_n = 4.0;          // cluster-stage pool factor
    double c_l = 8.0;          // edge-probe loop runs ceil(c_l/eps) steps
    double sample_scale = 4.0; // scales the 1/(gamma^(2d) eps^2) unlabeled budget
    int cluster_boost = 3;
    std::size_t region_cap = 1'000'000;
};

// Margin tester: reject if the per-region cluster check fails, then probe
// edges of the region graph proportionally to their estimated weight and
// reject on any cross-edge label disagreement.
inline TesterVerdict test_margin(ActiveOracle& oracle, double gamma, double c, double eps,
                                 std::size_t d, const MarginTesterConfig& cfg = {}) {
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("test_margin: eps must be in (0,1)");
    const RegionPartition partition = partition_unit_ball(d, gamma, c, cfg.region_cap);
    const std::size_t n_regions = partition.region_count();

    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();

    const double weight_budget =
        cfg.sample_scale / (std::pow(gamma, 2.0 * static_cast<double>(d)) * eps * eps);
    const auto pool_size = static_cast<std::uint64_t>(std::max(
        std::ceil(cfg.c_n * static_cast<double>(n_regions) / eps), std::ceil(weight_budget)));

    // one unlabeled pool serves both the cluster stage and weight estimation
    std::vector<PointId> pool = oracle.draw_unlabeled(pool_size);
    std::vector<std::vector<PointId>> by_region(n_regions);
    std::vector<std::uint32_t> region_of(pool.size(), 0);
    std::vector<PointId> covered;
    covered.reserve(pool.size());
    std::vector<std::uint32_t> covered_region;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto r = partition.locate(oracle.vec(pool[i]));
        if (r < 0) continue;  // numerically outside the covered grid
        covered.push_back(pool[i]);
        covered_region.push_back(static_cast<std::uint32_t>(r));
        by_region[static_cast<std::size_t>(r)].push_back(pool[i]);
    }

    TesterVerdict v;
    v.threshold = 0.0;

    // stage 1: cluster check over regions at distance parameter eps/4
    if (detail::cluster_majority(oracle, covered, by_region, covered_region, eps / 4.0,
                                 cfg.cluster_boost) == Decision::Reject) {
        v.decision = Decision::Reject;
        v.statistic = 1.0;
        v.unlabeled_used = oracle.unlabeled_count() - u0;
        v.labels_used = oracle.label_count() - l0;
        return v;
    }

    // stage 2: estimated edge weights and cross-edge probes
    std::vector<double> mass(n_regions, 0.0);
    const double unit = 1.0 / static_cast<double>(pool.size());
    for (std::size_t i = 0; i < covered.size(); ++i) mass[covered_region[i]] += unit;
    const RegionGraph graph = build_margin_graph(partition, mass);

    std::vector<double> cumulative;
    cumulative.reserve(graph.edges.size());
    double total = 0.0;
    for (double w : graph.w_hat) {
        total += w;
        cumulative.push_back(total);
    }

    Decision decision = Decision::Accept;
    if (total > 0.0) {
        const auto steps = static_cast<std::uint64_t>(std::ceil(cfg.c_l / eps));
        Rng& rng = oracle.rng();
        for (std::uint64_t s = 0; s < steps; ++s) {
            const double u = rng.uniform(0.0, total);
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            const auto e = std::min<std::size_t>(
                static_cast<std::size_t>(it - cumulative.begin()), graph.edges.size() - 1);
            const auto& [ri, rj] = graph.edges[e];
            const auto& side_i = by_region[ri];
            const auto& side_j = by_region[rj];
            if (side_i.empty() || side_j.empty()) continue;
            const PointId x = side_i[rng.below(side_i.size())];
            const PointId y = side_j[rng.below(side_j.size())];
            if (oracle.query_label(x) != oracle.query_label(y)) {
                decision = Decision::Reject;
                break;
            }
        }
    }

    v.decision = decision;
    v.statistic = decision == Decision::Reject ? 1.0 : 0.0;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    return v;
}

}  // namespace aptest
