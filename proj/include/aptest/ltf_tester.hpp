#pragma once

#include <cmath>
#include <cstdint>

#include "aptest/errors.hpp"
#include "aptest/ltf.hpp"
#include "aptest/oracle.hpp"
#include "aptest/ustat.hpp"

namespace aptest {

struct LtfTesterConfig {
    double c_m1 = 800.0;  // scales the tau/eps^3 term of m
    double c_m2 = 32.0;   // scales the 1/eps^6 term of m
    std::uint64_t pair_cap = 5'000'000;
};

inline double ltf_truncation_threshold(std::size_t n, double eps) {
    const double e3 = eps * eps * eps;
    return std::sqrt(4.0 * static_cast<double>(n) * std::log(4.0 * static_cast<double>(n) / e3));
}

inline std::uint64_t ltf_sample_size(std::size_t n, double eps, const LtfTesterConfig& cfg = {}) {
    const double e3 = eps * eps * eps;
    const double m = cfg.c_m1 * ltf_truncation_threshold(n, eps) / e3 + cfg.c_m2 / (e3 * e3);
    return static_cast<std::uint64_t>(std::ceil(m));
}

// Accept iff |rho~ - W(mu~)| <= 2 eps^3, with rho~ the truncated pair
// U-statistic and mu~ the label mean. Uses exactly m label requests on m
// unlabeled draws.
inline TesterVerdict test_ltf(ActiveOracle& oracle, std::size_t n, double eps,
                              const LtfTesterConfig& cfg = {}) {
    if (!(eps > 0.0 && eps < 1.0)) throw BadParams("test_ltf: eps must be in (0,1)");
    const auto* g = std::get_if<GaussianIsotropic>(&oracle.distribution());
    if (g == nullptr || g->n != n) throw DimMismatch("test_ltf: oracle must be gaussian of dim n");

    const double tau = ltf_truncation_threshold(n, eps);
    const std::uint64_t m = ltf_sample_size(n, eps, cfg);
    if (m < 2) throw BadParams("test_ltf: constants give m < 2");

    const std::uint64_t u0 = oracle.unlabeled_count();
    const std::uint64_t l0 = oracle.label_count();
    const SelfCorrelationEstimate est =
        estimate_self_correlation(oracle, UStatConfig(tau, m), cfg.pair_cap);

    const double statistic = std::abs(est.rho - w_function(est.mu));
    const double threshold = 2.0 * eps * eps * eps;
    TesterVerdict v;
    v.decision = statistic <= threshold ? Decision::Accept : Decision::Reject;
    v.unlabeled_used = oracle.unlabeled_count() - u0;
    v.labels_used = oracle.label_count() - l0;
    v.statistic = statistic;
    v.threshold = threshold;
    return v;
}

}  // namespace aptest
