#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/label_law.hpp"
#include "aptest/rng.hpp"

namespace aptest {

// uniform over the n coordinate projections f(x) = x_i
struct DictatorPrior {
    std::size_t n;
};

// i.i.d. fair label per point
struct RandomNoisePrior {};

// f = sgn(w . x) with w ~ N(0, I_n); label law estimated by Monte Carlo
struct GaussianLtfPrior {
    std::size_t n;
    std::uint64_t weight_draws = 100'000;
};

// explicit labelers over a finite universe of points
struct FinitePrior {
    std::vector<std::pair<std::vector<int>, double>> labelers;  // (labels per universe point, prob)
};

using FunctionPrior = std::variant<DictatorPrior, RandomNoisePrior, GaussianLtfPrior, FinitePrior>;

// A drawn query set in whichever representation the priors need: packed bit
// rows for the hypercube, real rows for Gaussian domains, or universe
// indices for finite priors.
struct QuerySet {
    std::size_t count = 0;
    std::size_t n = 0;                            // ambient dimension (bits/reals)
    std::vector<std::vector<std::uint64_t>> bits; // count rows of ceil(n/64) words
    std::vector<double> reals;                    // row-major count x n
    std::vector<std::uint32_t> indices;           // finite-universe points

    int bit(std::size_t row, std::size_t j) const {
        return static_cast<int>((bits[row][j >> 6] >> (j & 63)) & 1u);
    }
};

struct DomainSampler {
    enum class Kind { Hypercube, Gaussian, FiniteUniverse };
    Kind kind;
    std::size_t n = 0;         // hypercube/gaussian dimension
    std::size_t universe = 0;  // finite-universe size

    QuerySet draw(std::size_t count, Rng& rng) const {
        QuerySet qs;
        qs.count = count;
        qs.n = n;
        switch (kind) {
            case Kind::Hypercube: {
                const std::size_t words = (n + 63) / 64;
                qs.bits.resize(count);
                for (auto& row : qs.bits) {
                    row.resize(words);
                    for (auto& w : row) w = rng.raw();
                    if (n % 64 != 0) row.back() &= (std::uint64_t{1} << (n % 64)) - 1;
                }
                break;
            }
            case Kind::Gaussian:
                qs.reals.resize(count * n);
                for (auto& x : qs.reals) x = rng.gaussian();
                break;
            case Kind::FiniteUniverse:
                qs.indices.resize(count);
                for (auto& i : qs.indices)
                    i = static_cast<std::uint32_t>(rng.below(universe));
                break;
        }
        return qs;
    }
};

namespace detail {

inline LabelLaw dictator_law(const DictatorPrior& prior, const QuerySet& s) {
    if (s.bits.size() != s.count || s.n != prior.n)
        throw DimMismatch("dictator law: needs hypercube points of dimension n");
    LabelLaw::check_q(s.count);
    LabelLaw law;
    law.q = s.count;
    // pi_S(y) = |{i : c_i(S) = y}| / n, the column-counting closed form
    const double unit = 1.0 / static_cast<double>(prior.n);
    for (std::size_t j = 0; j < prior.n; ++j) {
        Labeling y = 0;
        for (std::size_t k = 0; k < s.count; ++k)
            y |= static_cast<Labeling>(s.bit(k, j)) << k;
        law.probs[y] += unit;
    }
    return law;
}

inline LabelLaw gaussian_ltf_law(const GaussianLtfPrior& prior, const QuerySet& s, Rng& rng) {
    if (s.reals.size() != s.count * prior.n)
        throw DimMismatch("gaussian ltf law: needs real points of dimension n");
    LabelLaw::check_q(s.count);
    LabelLaw law;
    law.q = s.count;
    law.exact = false;
    law.mc_samples = prior.weight_draws;
    const double unit = 1.0 / static_cast<double>(prior.weight_draws);
    std::vector<double> w(prior.n);
    for (std::uint64_t t = 0; t < prior.weight_draws; ++t) {
        for (auto& wi : w) wi = rng.gaussian();
        Labeling y = 0;
        for (std::size_t k = 0; k < s.count; ++k) {
            double dot = 0.0;
            for (std::size_t j = 0; j < prior.n; ++j) dot += w[j] * s.reals[k * prior.n + j];
            y |= static_cast<Labeling>(dot >= 0.0 ? 1 : 0) << k;
        }
        law.probs[y] += unit;
    }
    return law;
}

inline LabelLaw finite_law(const FinitePrior& prior, const QuerySet& s) {
    if (s.indices.size() != s.count) throw DimMismatch("finite law: needs universe indices");
    LabelLaw::check_q(s.count);
    LabelLaw law;
    law.q = s.count;
    for (const auto& [labels, prob] : prior.labelers) {
        Labeling y = 0;
        for (std::size_t k = 0; k < s.count; ++k)
            y |= static_cast<Labeling>(labels.at(s.indices[k]) & 1) << k;
        law.probs[y] += prob;
    }
    return law;
}

}  // namespace detail

// pi_S: exact column counting for dictators, implicit uniform for noise,
// exact enumeration for finite priors, Monte Carlo for Gaussian LTFs.
inline LabelLaw label_law(const FunctionPrior& prior, const QuerySet& s, Rng& rng) {
    if (const auto* d = std::get_if<DictatorPrior>(&prior)) return detail::dictator_law(*d, s);
    if (std::holds_alternative<RandomNoisePrior>(prior)) return LabelLaw::uniform(s.count);
    if (const auto* g = std::get_if<GaussianLtfPrior>(&prior))
        return detail::gaussian_ltf_law(*g, s, rng);
    return detail::finite_law(std::get<FinitePrior>(prior), s);
}

}  // namespace aptest
