#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "aptest/errors.hpp"

namespace aptest {

using Labeling = std::uint32_t;  // bit k = label of the k-th query point

// Distribution pi_S over labelings of a query set S induced by a prior over
// functions. Sparse except for the uniform (random-noise) law, which is kept
// implicit so q need not be tiny.
struct LabelLaw {
    std::size_t q = 0;
    bool is_uniform = false;
    std::map<Labeling, double> probs;  // empty when is_uniform
    bool exact = true;
    std::uint64_t mc_samples = 0;  // when !exact: sample count behind each mass

    static constexpr std::size_t kMaxQ = 22;

    static LabelLaw uniform(std::size_t q) {
        check_q(q);
        LabelLaw law;
        law.q = q;
        law.is_uniform = true;
        return law;
    }

    static void check_q(std::size_t q) {
        if (q > kMaxQ) throw TooManyQueries("label law: 2^q support exceeds the memory cap");
    }

    double mass(Labeling y) const {
        if (is_uniform) return std::ldexp(1.0, -static_cast<int>(q));
        const auto it = probs.find(y);
        return it == probs.end() ? 0.0 : it->second;
    }

    double total() const {
        if (is_uniform) return 1.0;
        double t = 0.0;
        for (const auto& [y, p] : probs) t += p;
        return t;
    }

    // materialize the uniform law (small q only)
    LabelLaw materialized() const {
        if (!is_uniform) return *this;
        check_q(q);
        LabelLaw law;
        law.q = q;
        law.exact = exact;
        law.mc_samples = mc_samples;
        const double u = std::ldexp(1.0, -static_cast<int>(q));
        for (Labeling y = 0; y < (Labeling{1} << q); ++y) law.probs.emplace(y, u);
        return law;
    }
};

struct DistanceEstimate {
    double value = 0.0;
    double se = 0.0;  // 0 for exact laws
    bool exact = true;
};

// d_S(pi, pi') = (1/2) sum_y |pi_S(y) - pi'_S(y)|
inline DistanceEstimate variation_distance(const LabelLaw& a, const LabelLaw& b) {
    if (a.q != b.q) throw DimMismatch("variation_distance: laws over different q");
    DistanceEstimate out;
    out.exact = a.exact && b.exact;

    auto se_of = [](const LabelLaw& law, double p) {
        if (law.exact || law.mc_samples == 0) return 0.0;
        return p * (1.0 - p) / static_cast<double>(law.mc_samples);
    };

    if (a.is_uniform && b.is_uniform) return out;

    const LabelLaw* sparse = &a;
    const LabelLaw* other = &b;
    if (sparse->is_uniform) std::swap(sparse, other);

    double l1 = 0.0, var = 0.0;
    if (other->is_uniform) {
        const double u = std::ldexp(1.0, -static_cast<int>(a.q));
        double seen = 0.0;
        for (const auto& [y, p] : sparse->probs) {
            l1 += std::abs(p - u);
            seen += 1.0;
            var += se_of(*sparse, p);
        }
        l1 += (std::ldexp(1.0, static_cast<int>(a.q)) - seen) * u;
    } else {
        auto ia = sparse->probs.begin();
        auto ib = other->probs.begin();
        while (ia != sparse->probs.end() || ib != other->probs.end()) {
            if (ib == other->probs.end() || (ia != sparse->probs.end() && ia->first < ib->first)) {
                l1 += ia->second;
                var += se_of(*sparse, ia->second);
                ++ia;
            } else if (ia == sparse->probs.end() || ib->first < ia->first) {
                l1 += ib->second;
                var += se_of(*other, ib->second);
                ++ib;
            } else {
                l1 += std::abs(ia->second - ib->second);
                var += se_of(*sparse, ia->second) + se_of(*other, ib->second);
                ++ia;
                ++ib;
            }
        }
    }
    out.value = 0.5 * l1;
    out.se = 0.5 * std::sqrt(var);
    return out;
}

// Fair(pi, pi', U): with probability 1/2 a labeling from pi_U tagged l=1,
// else one from pi'_U tagged l=0. Stored as the two component laws, so the
// l-marginal is exactly balanced.
struct FairLaw {
    LabelLaw from_property;  // l = 1 side
    LabelLaw from_far;       // l = 0 side

    std::size_t q() const { return from_property.q; }
};

inline FairLaw fair_law(const LabelLaw& pi, const LabelLaw& pi_prime) {
    if (pi.q != pi_prime.q) throw DimMismatch("fair_law: laws over different q");
    return {pi, pi_prime};
}

// Bayes error of guessing l from the full labeling: (1/2)(1 - d_U(pi, pi')).
inline double fair_bayes_error(const FairLaw& fair) {
    return 0.5 * (1.0 - variation_distance(fair.from_property, fair.from_far).value);
}

}  // namespace aptest
