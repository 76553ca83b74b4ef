#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/rng.hpp"

namespace aptest {

namespace detail {

// log det by Cholesky; throws on breakdown
inline double log_det_spd(std::vector<double> a, std::size_t k) {
    double logdet = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double d = a[j * k + j];
        for (std::size_t p = 0; p < j; ++p) d -= a[j * k + p] * a[j * k + p];
        if (!(d > 0.0) || !std::isfinite(d))
            throw SingularCovariance("log_det: covariance not positive definite");
        const double l = std::sqrt(d);
        a[j * k + j] = l;
        for (std::size_t i = j + 1; i < k; ++i) {
            double v = a[i * k + j];
            for (std::size_t p = 0; p < j; ++p) v -= a[i * k + p] * a[j * k + p];
            a[i * k + j] = v / l;
        }
        logdet += 2.0 * std::log(l);
    }
    return logdet;
}

}  // namespace detail

// KL-style label-law bound 2 sqrt((1/2) |log det Sigma|) with
// Sigma = (1/n) X X^T for a K x n data matrix X (row-major).
inline double gaussian_label_law_bound(std::span<const double> x, std::size_t k, std::size_t n) {
    if (k < 1 || n < 1 || x.size() != k * n) throw BadParams("label_law_bound: bad shape");
    if (k > n) throw BadParams("label_law_bound: requires K <= n");
    std::vector<double> sigma(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t p = 0; p < n; ++p) dot += x[i * n + p] * x[j * n + p];
            sigma[i * k + j] = sigma[j * k + i] = dot / static_cast<double>(n);
        }
    const double logdet = detail::log_det_spd(std::move(sigma), k);
    return 2.0 * std::sqrt(0.5 * std::abs(logdet));
}

struct SingularValueCheck {
    double frequency = 0.0;          // fraction of trials meeting the bound
    double theoretical_floor = 0.0;  // 1 - 2 exp(-t^2/2)
    double mean_norm = 0.0;
};

// operator norm (max |eigenvalue|) of a symmetric matrix via power iteration
inline double sym_operator_norm(const std::vector<double>& b, std::size_t m, Rng& rng,
                                double tol = 1e-6, std::size_t max_iters = 20'000) {
    std::vector<double> v(m), w(m);
    for (auto& x : v) x = rng.gaussian();
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += b[i * m + j] * v[j];
            w[i] = s;
            norm += s * s;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        double next = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            next += v[i] * w[i];  // Rayleigh quotient (v normalized)
            v[i] = w[i] / norm;
        }
        if (std::abs(std::abs(next) - std::abs(lambda)) < tol * std::max(1.0, std::abs(next)) &&
            it > 2)
            return std::abs(next);
        lambda = next;
    }
    return std::abs(lambda);
}

// Empirical check of the random-matrix bound ||(1/n) A^T A - I|| <= 3(sqrt(m)+t)/sqrt(n),
// which holds with probability at least 1 - 2 exp(-t^2/2).
inline SingularValueCheck singular_value_check(std::size_t n, std::size_t m, double t,
                                               std::size_t trials, std::uint64_t seed) {
    if (m >= n) throw BadParams("singular_value_check: requires m < n");
    const double root_n = std::sqrt(static_cast<double>(n));
    const double root_m = std::sqrt(static_cast<double>(m));
    if (!(t > 0.0 && t < root_n - root_m))
        throw BadParams("singular_value_check: need 0 < t < sqrt(n) - sqrt(m)");

    const double bound = 3.0 * (root_m + t) / root_n;
    std::size_t ok = 0;
    double norm_sum = 0.0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(trial_seed(seed, trial));
        std::vector<double> a(n * m);
        for (auto& x : a) x = rng.gaussian();
        // b = (1/n) A^T A - I
        std::vector<double> b(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                double dot = 0.0;
                for (std::size_t p = 0; p < n; ++p) dot += a[p * m + i] * a[p * m + j];
                dot /= static_cast<double>(n);
                if (i == j) dot -= 1.0;
                b[i * m + j] = b[j * m + i] = dot;
            }
        const double norm = sym_operator_norm(b, m, rng);
        norm_sum += norm;
        if (norm <= bound) ++ok;
    }
    SingularValueCheck out;
    out.frequency = static_cast<double>(ok) / static_cast<double>(trials);
    out.theoretical_floor = 1.0 - 2.0 * std::exp(-t * t / 2.0);
    out.mean_norm = norm_sum / static_cast<double>(trials);
    return out;
}

}  // namespace aptest
