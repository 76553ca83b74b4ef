#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/rng.hpp"

namespace aptest {

// Orthonormal (probabilists') Hermite polynomials: h_0 = 1, h_1 = x,
// h_2 = (x^2 - 1)/sqrt(2), with h_{k+1} = (x h_k - sqrt(k) h_{k-1})/sqrt(k+1).
inline double hermite_value(std::uint32_t k, double x) {
    if (k == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (std::uint32_t j = 1; j < k; ++j) {
        const double next =
            (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
        prev = cur;
        cur = next;
    }
    return cur;
}

// multi-index S in N^n with H_S(x) = prod_i h_{S_i}(x_i)
struct HermiteIndex {
    std::vector<std::uint32_t> index;

    std::uint32_t degree() const {
        std::uint32_t d = 0;
        for (auto s : index) d += s;
        return d;
    }

    double eval(std::span<const double> x) const {
        if (x.size() != index.size()) throw DimMismatch("hermite index: dimension mismatch");
        double v = 1.0;
        for (std::size_t i = 0; i < index.size(); ++i)
            if (index[i] != 0) v *= hermite_value(index[i], x[i]);
        return v;
    }
};

struct CoeffEstimate {
    double value = 0.0;
    double se = 0.0;
};

// Monte-Carlo estimate of the degree-1 coefficient fhat(e_i) = E[f(x) x_i]
// under the standard Gaussian; LabelFn maps a point to a +-1 label.
template <typename LabelFn>
inline CoeffEstimate hermite_coeff_degree1(LabelFn&& label_of, std::size_t n, std::size_t i,
                                           std::uint64_t samples, Rng& rng) {
    if (i < 1 || i > n) throw BadParams("hermite_coeff_degree1: i must be in 1..n");
    if (samples < 1) throw BadParams("hermite_coeff_degree1: samples must be >= 1");
    std::vector<double> x(n);
    long double sum = 0.0L, sumsq = 0.0L;
    for (std::uint64_t t = 0; t < samples; ++t) {
        for (std::size_t k = 0; k < n; ++k) x[k] = rng.gaussian();
        const double v = static_cast<double>(label_of(std::span<const double>(x))) * x[i - 1];
        sum += v;
        sumsq += static_cast<long double>(v) * v;
    }
    const auto s = static_cast<double>(samples);
    const double mean = static_cast<double>(sum / s);
    const double var = std::max(0.0, static_cast<double>(sumsq / s) - mean * mean);
    return {mean, std::sqrt(var / s)};
}

}  // namespace aptest
