#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "aptest/distribution.hpp"
#include "aptest/errors.hpp"
#include "aptest/interval_distance.hpp"
#include "aptest/piecewise.hpp"
#include "aptest/rng.hpp"
#include "aptest/target.hpp"

namespace aptest {

enum class IntervalKind { Member, FarFine, FarNoisy };

struct IntervalInstance {
    PiecewiseConstantFn fn;
    bool in_property = false;
    double certified_distance = 0.0;  // DP-oracle distance to <= d intervals
};

namespace detail {

// k positive intervals separated by gaps; all 2k+1 segment lengths bounded
// away from zero so block structure is well separated at tester scale
inline PiecewiseConstantFn random_union(std::size_t k, Rng& rng) {
    const std::size_t segments = 2 * k + 1;
    std::vector<double> lengths(segments);
    double total = 0.0;
    for (auto& l : lengths) {
        l = 0.25 + rng.uniform();
        total += l;
    }
    std::vector<double> breaks;
    std::vector<int> values;
    double at = 0.0;
    for (std::size_t i = 0; i < segments; ++i) {
        values.push_back(i % 2 == 0 ? 0 : 1);
        if (i + 1 < segments) {
            at += lengths[i] / total;
            breaks.push_back(at);
        }
    }
    return PiecewiseConstantFn(std::move(breaks), std::move(values));
}

// Carve opposite-value islands of the given width into blocks carrying
// `into`, left to right, until target mass is placed. Islands keep a gap of
// at least `width` from block edges and from each other. Returns the mass
// actually placed.
inline double carve_islands(std::vector<double>& breaks, std::vector<int>& values, int into,
                            double target_mass, double width) {
    const PiecewiseConstantFn f(breaks, values);
    std::vector<double> nb;
    std::vector<int> nv;
    double placed = 0.0;
    auto append = [&](double end, int v) {
        if (!nv.empty() && nv.back() == v) {
            if (end < 1.0)
                nb.back() = end;
            else
                nb.pop_back();
            return;
        }
        nv.push_back(v);
        if (end < 1.0) nb.push_back(end);
    };
    for (std::size_t i = 0; i < f.block_count(); ++i) {
        const double lo = f.block_start(i), hi = f.block_end(i);
        const int v = f.block_values()[i];
        if (v != into || hi - lo < 3.0 * width || placed >= target_mass) {
            append(hi, v);
            continue;
        }
        const auto slots = static_cast<std::size_t>(std::floor((hi - lo - width) / (2.0 * width)));
        double at = lo;
        for (std::size_t k = 0; k < slots && placed < target_mass; ++k) {
            const double island_lo = lo + width * (1.0 + 2.0 * static_cast<double>(k));
            append(island_lo, v);
            append(island_lo + width, 1 - v);
            placed += width;
            at = island_lo + width;
        }
        if (at < hi) append(hi, v);
    }
    breaks = std::move(nb);
    values = std::move(nv);
    return placed;
}

}  // namespace detail

// Member of the class plus controlled spurious-blip mass in its 0-regions.
// Blips are wide relative to the smoothing scale delta = eps^2/(32 d), so
// they survive smoothing and are removed by interval pruning rather than
// thresholding.
inline PiecewiseConstantFn gen_noisy_member(std::size_t d, double eps, double blip_mass,
                                            Rng& rng) {
    const double delta = eps * eps / (32.0 * static_cast<double>(d));
    const PiecewiseConstantFn base = detail::random_union(d, rng);
    std::vector<double> breaks = base.breakpoints();
    std::vector<int> values = base.block_values();
    const double width = std::max(8.0 * delta, blip_mass / 24.0);
    detail::carve_islands(breaks, values, 0, blip_mass, width);
    return PiecewiseConstantFn(std::move(breaks), std::move(values));
}

inline IntervalInstance gen_interval_instance(std::size_t d, double eps, IntervalKind kind,
                                              std::uint64_t seed, std::size_t retry_cap = 100) {
    if (d < 1) throw BadParams("gen_interval_instance: d must be >= 1");
    Rng rng(seed);
    for (std::size_t attempt = 0; attempt < retry_cap; ++attempt) {
        IntervalInstance inst;
        switch (kind) {
            case IntervalKind::Member: {
                const std::size_t k = 1 + static_cast<std::size_t>(rng.below(d));
                inst.fn = detail::random_union(k, rng);
                inst.in_property = true;
                inst.certified_distance = distance_to_interval_union(inst.fn, d);
                if (inst.certified_distance == 0.0) return inst;
                break;
            }
            case IntervalKind::FarFine: {
                const auto blocks = 2 * static_cast<std::size_t>(
                                        std::ceil(2.0 * static_cast<double>(d) / eps));
                std::vector<double> breaks;
                std::vector<int> values;
                std::vector<double> lengths(blocks);
                double total = 0.0;
                for (auto& l : lengths) {
                    l = 0.5 + rng.uniform();
                    total += l;
                }
                double at = 0.0;
                for (std::size_t i = 0; i < blocks; ++i) {
                    values.push_back(static_cast<int>(i % 2));
                    if (i + 1 < blocks) {
                        at += lengths[i] / total;
                        breaks.push_back(at);
                    }
                }
                inst.fn = PiecewiseConstantFn(std::move(breaks), std::move(values));
                inst.in_property = false;
                inst.certified_distance = distance_to_interval_union(inst.fn, d);
                if (inst.certified_distance >= eps) return inst;
                break;
            }
            case IntervalKind::FarNoisy: {
                // member plus flipped mass on both sides: spurious blips in
                // 0-regions and holes in 1-regions
                const double delta = eps * eps / (32.0 * static_cast<double>(d));
                const PiecewiseConstantFn base = detail::random_union(
                    1 + static_cast<std::size_t>(rng.below(d)), rng);
                std::vector<double> breaks = base.breakpoints();
                std::vector<int> values = base.block_values();
                const double target = 1.4 * eps;
                const double width = std::max(8.0 * delta, target / 40.0);
                const double blips =
                    detail::carve_islands(breaks, values, 0, 0.6 * target, width);
                detail::carve_islands(breaks, values, 1, target - blips, width);
                inst.fn = PiecewiseConstantFn(std::move(breaks), std::move(values));
                inst.in_property = false;
                inst.certified_distance = distance_to_interval_union(inst.fn, d);
                if (inst.certified_distance >= eps) return inst;
                break;
            }
        }
    }
    throw GenerationFailed("gen_interval_instance: retry cap exhausted");
}

// ---------------------------------------------------------------------------

enum class MarginKind { Margin, Far };

struct MarginInstance {
    std::size_t dim = 0;
    Empirical atoms{1, {0.0}, {1.0}};
    AtomTable labels;
    bool in_property = false;
    // margin kind: exact min distance between opposite-label atoms;
    // far kind: matching-based lower bound on the distance to margin gamma'
    double certificate = 0.0;
};

namespace detail {

inline double atom_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

inline double min_cross_distance(const Empirical& atoms, const std::vector<int>& labels) {
    double best = HUGE_VAL;
    for (std::size_t i = 0; i < atoms.atom_count(); ++i)
        for (std::size_t j = i + 1; j < atoms.atom_count(); ++j) {
            if (labels[i] == labels[j]) continue;
            best = std::min(best, atom_dist(atoms.atom(i), atoms.atom(j)));
        }
    return best;
}

// greedy maximal matching over opposite-label pairs closer than gamma';
// half its min-endpoint mass lower-bounds the distance to the margin property
inline double conflict_matching_bound(const Empirical& atoms, const std::vector<int>& labels,
                                      double gamma_prime) {
    std::vector<bool> used(atoms.atom_count(), false);
    double bound = 0.0;
    for (std::size_t i = 0; i < atoms.atom_count(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < atoms.atom_count(); ++j) {
            if (used[j] || labels[i] == labels[j]) continue;
            if (atom_dist(atoms.atom(i), atoms.atom(j)) < gamma_prime) {
                bound += 0.5 * std::min(atoms.weights[i], atoms.weights[j]);
                used[i] = used[j] = true;
                break;
            }
        }
    }
    return bound;
}

}  // namespace detail

inline MarginInstance gen_margin_instance(std::size_t d, double gamma, double c, double eps,
                                          MarginKind kind, std::uint64_t seed,
                                          std::size_t atom_target = 240,
                                          std::size_t retry_cap = 100) {
    if (d < 1) throw BadParams("gen_margin_instance: d must be >= 1");
    const double gamma_prime = gamma * (1.0 - 1.0 / c);
    Rng rng(seed);

    for (std::size_t attempt = 0; attempt < retry_cap; ++attempt) {
        std::vector<double> coords;
        std::vector<int> labels;

        if (kind == MarginKind::Margin) {
            // two axis-separated blobs with cross distance >= gamma by layout
            const double blob_r = 0.2;
            const double center = 0.5 * (gamma + 2.0 * blob_r) + 0.02;
            for (std::size_t i = 0; i < atom_target; ++i) {
                const int label = i % 2 == 0 ? 1 : 0;
                // rejection-sample a unit-cube offset into the blob ball
                std::vector<double> offset(d);
                while (true) {
                    double norm2 = 0.0;
                    for (auto& o : offset) {
                        o = rng.uniform(-blob_r, blob_r);
                        norm2 += o * o;
                    }
                    if (norm2 <= blob_r * blob_r) break;
                }
                offset[0] += label == 1 ? center : -center;
                coords.insert(coords.end(), offset.begin(), offset.end());
                labels.push_back(label);
            }
        } else {
            // interleaved opposite-label stripes at cross separation inside
            // (gamma/(2c), gamma'): regions stay pure but witness edges carry
            // mass. Atoms sit on a shared grid so every atom has an
            // opposite-label partner at exactly the stripe separation, which
            // makes the matching certificate tight.
            const double sep = 0.5 * (gamma / (2.0 * c) + gamma_prime);
            const double extent = 0.55;
            auto stripes = static_cast<std::size_t>(std::floor(2.0 * extent / sep));
            if (stripes % 2 == 1) --stripes;
            if (stripes < 2) throw GenerationFailed("gen_margin_instance: gamma too large");
            const std::size_t per_stripe = std::max<std::size_t>(atom_target / stripes, 2);
            for (std::size_t s = 0; s < stripes; ++s) {
                const double level = -extent + static_cast<double>(s) * sep;
                const int label = static_cast<int>(s % 2);
                for (std::size_t i = 0; i < per_stripe; ++i) {
                    std::vector<double> x(d, 0.0);
                    x[d - 1] = level;
                    const double grid = per_stripe > 1 ? -0.55 + 1.1 * static_cast<double>(i) /
                                                              static_cast<double>(per_stripe - 1)
                                                       : 0.0;
                    for (std::size_t k = 0; k + 1 < d; ++k) x[k] = grid;
                    coords.insert(coords.end(), x.begin(), x.end());
                    labels.push_back(label);
                }
            }
        }

        if (labels.size() < 2) continue;
        std::vector<double> weights(labels.size(),
                                    1.0 / static_cast<double>(labels.size()));
        MarginInstance inst;
        inst.dim = d;
        inst.atoms = Empirical(d, std::move(coords), std::move(weights));
        inst.labels = AtomTable{labels};

        if (kind == MarginKind::Margin) {
            inst.in_property = true;
            inst.certificate = detail::min_cross_distance(inst.atoms, labels);
            if (inst.certificate >= gamma) return inst;
        } else {
            inst.in_property = false;
            inst.certificate = detail::conflict_matching_bound(inst.atoms, labels, gamma_prime);
            if (inst.certificate >= eps) return inst;
        }
    }
    throw GenerationFailed("gen_margin_instance: retry cap exhausted");
}

// ---------------------------------------------------------------------------

struct ClusterInstance {
    BinnedMixture mixture{{{1.0, 0.0}}};
    BinnedTable table;
    double error = 0.0;  // cluster_error ground truth
};

// impure_mass of the total is spread over 50/50 bins, the rest stays pure
inline ClusterInstance make_cluster_instance(std::size_t bins, double impure_mass,
                                             std::uint64_t seed) {
    if (bins < 1) throw BadParams("make_cluster_instance: bins must be >= 1");
    Rng rng(seed);
    const std::size_t impure = impure_mass > 0.0 ? std::max<std::size_t>(bins / 2, 1) : 0;
    const double per_bin = 1.0 / static_cast<double>(bins);
    std::vector<std::pair<double, double>> table;
    table.reserve(bins);
    double total_err = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        if (i < impure) {
            const double mixed = impure_mass / static_cast<double>(impure);
            table.emplace_back(mixed / 2.0, mixed / 2.0);
            total_err += mixed / 2.0;
        } else {
            const double pure =
                (1.0 - impure_mass) / static_cast<double>(bins - impure);
            if (rng.coin())
                table.emplace_back(pure, 0.0);
            else
                table.emplace_back(0.0, pure);
        }
    }
    ClusterInstance inst;
    inst.mixture = BinnedMixture(table);
    inst.table = BinnedTable{table};
    inst.error = total_err;
    return inst;
}

}  // namespace aptest
