#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "aptest/distribution.hpp"
#include "aptest/errors.hpp"
#include "aptest/point.hpp"
#include "aptest/rng.hpp"
#include "aptest/target.hpp"

namespace aptest {

enum class Decision { Accept, Reject };

inline const char* to_string(Decision d) { return d == Decision::Accept ? "accept" : "reject"; }

struct TesterVerdict {
    Decision decision = Decision::Accept;
    std::uint64_t unlabeled_used = 0;
    std::uint64_t labels_used = 0;
    std::optional<double> statistic;
    std::optional<double> threshold;
};

// Meters the active-testing contract: unlabeled draws are i.i.d. from the
// distribution and label queries are only valid on previously drawn points.
// Single-writer; concurrent trials each construct their own oracle.
class ActiveOracle {
public:
    ActiveOracle(Distribution dist, TargetFunction target, std::uint64_t seed)
        : dist_(std::move(dist)),
          target_(std::move(target)),
          rng_(seed),
          label_key_(mix64(seed ^ 0x5bd1e995u)) {
        if (const auto* g = std::get_if<GaussianIsotropic>(&dist_)) {
            if (g->n < 1) throw BadParams("oracle: gaussian n must be >= 1");
            vec_dim_ = g->n;
        } else if (const auto* e = std::get_if<Empirical>(&dist_)) {
            vec_dim_ = e->dim;
        } else if (const auto* b = std::get_if<UnitBallUniform>(&dist_)) {
            if (b->d < 1) throw BadParams("oracle: ball dimension must be >= 1");
            vec_dim_ = b->d;
        }
    }

    PointId draw_one() {
        const PointId id = count_;
        std::visit([&](const auto& d) { sample(d); }, dist_);
        ++count_;
        ++unlabeled_count_;
        return id;
    }

    std::vector<PointId> draw_unlabeled(std::uint64_t k) {
        if (k < 1) throw BadParams("draw_unlabeled: k must be >= 1");
        std::vector<PointId> ids;
        ids.reserve(k);
        for (std::uint64_t i = 0; i < k; ++i) ids.push_back(draw_one());
        return ids;
    }

    int query_label(PointId id) {
        check_drawn(id);
        ++label_count_;
        return label_of(id);
    }

    // -- drawn-point accessors ------------------------------------------

    double unit(PointId id) const {
        check_drawn(id);
        return units_[id];
    }

    std::span<const double> vec(PointId id) const {
        check_drawn(id);
        if (const auto* e = std::get_if<Empirical>(&dist_)) return e->atom(atom_idx_[id]);
        return {vecs_.data() + id * vec_dim_, vec_dim_};
    }

    BinnedPoint binned(PointId id) const {
        check_drawn(id);
        return binned_[id];
    }

    std::size_t atom_index(PointId id) const {
        check_drawn(id);
        return atom_idx_[id];
    }

    Point point(PointId id) const {
        check_drawn(id);
        if (!units_.empty()) return UnitPoint{units_[id]};
        if (!binned_.empty()) return binned_[id];
        const auto v = vec(id);
        return VectorPoint{{v.begin(), v.end()}};
    }

    // -- bookkeeping -----------------------------------------------------

    std::uint64_t drawn_count() const { return count_; }
    std::uint64_t unlabeled_count() const { return unlabeled_count_; }
    std::uint64_t label_count() const { return label_count_; }

    const Distribution& distribution() const { return dist_; }
    const TargetFunction& target() const { return target_; }
    Rng& rng() { return rng_; }

private:
    void sample(const Uniform01&) { units_.push_back(rng_.uniform()); }

    void sample(const GaussianIsotropic& g) {
        for (std::size_t i = 0; i < g.n; ++i) vecs_.push_back(rng_.gaussian());
    }

    void sample(const BinnedMixture& b) {
        const int bin = static_cast<int>(categorical_draw(b.cumulative, rng_)) + 1;
        binned_.push_back(BinnedPoint{bin, rng_.uniform()});
    }

    void sample(const Empirical& e) {
        atom_idx_.push_back(static_cast<std::uint32_t>(categorical_draw(e.cumulative, rng_)));
    }

    void sample(const UnitPiecewiseDensity& d) {
        const std::size_t i = categorical_draw(d.cumulative, rng_);
        units_.push_back(rng_.uniform(d.block_lo(i), d.block_hi(i)));
    }

    void sample(const UnitBallUniform& b) {
        // gaussian direction scaled to radius U^(1/d)
        double norm2 = 0.0;
        const std::size_t base = vecs_.size();
        for (std::size_t i = 0; i < b.d; ++i) {
            const double g = rng_.gaussian();
            vecs_.push_back(g);
            norm2 += g * g;
        }
        const double r = std::pow(rng_.uniform(), 1.0 / static_cast<double>(b.d));
        const double scale = norm2 > 0.0 ? r / std::sqrt(norm2) : 0.0;
        for (std::size_t i = 0; i < b.d; ++i) vecs_[base + i] *= scale;
    }

    int label_of(PointId id) {
        if (const auto* t = std::get_if<IntervalUnionTarget>(&target_)) return t->fn.eval(units_[id]);
        if (const auto* t = std::get_if<LtfTarget>(&target_))
            return eval_pm(t->fn, vec(id)) > 0 ? 1 : 0;
        if (const auto* t = std::get_if<BinnedTable>(&target_)) {
            const auto& p = binned_[id];
            return t->label(p.bin_index, p.payload);
        }
        if (const auto* t = std::get_if<AtomTable>(&target_))
            return t->labels.at(atom_idx_[id]);
        // memoized_random: lazily assigned fair coin, stable per point id
        auto it = memo_.find(id);
        if (it != memo_.end()) return it->second;
        const int l = static_cast<int>(mix64(label_key_ ^ id) & 1u);
        memo_.emplace(id, l);
        return l;
    }

    void check_drawn(PointId id) const {
        if (id >= count_)
            throw UnknownPoint("label request for undrawn point id " + std::to_string(id));
    }

    Distribution dist_;
    TargetFunction target_;
    Rng rng_;
    std::uint64_t label_key_;

    std::uint64_t count_ = 0;
    std::uint64_t unlabeled_count_ = 0;
    std::uint64_t label_count_ = 0;

    std::size_t vec_dim_ = 0;
    std::vector<double> units_;
    std::vector<double> vecs_;
    std::vector<BinnedPoint> binned_;
    std::vector<std::uint32_t> atom_idx_;

    std::unordered_map<PointId, int> memo_;
};

// err(f) = sum_i min(p_i0, p_i1): mass that must flip to make each bin pure
inline double cluster_error(const std::vector<std::pair<double, double>>& bins) {
    double total = 0.0, err = 0.0;
    for (const auto& [p0, p1] : bins) {
        if (p0 < 0.0 || p1 < 0.0) throw BadSimplex("cluster_error: negative mass");
        total += p0 + p1;
        err += std::min(p0, p1);
    }
    if (std::abs(total - 1.0) > 1e-12) throw BadSimplex("cluster_error: masses must sum to 1");
    return err;
}

}  // namespace aptest
