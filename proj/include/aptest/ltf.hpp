#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "aptest/errors.hpp"
#include "aptest/stats.hpp"

namespace aptest {

// f(x) = sgn(w.x - theta) with sgn(z) = +1 iff z >= 0, output in {-1,+1}.
struct LinearThreshold {
    std::vector<double> w;
    double theta = 0.0;

    LinearThreshold() = default;
    LinearThreshold(std::vector<double> weights, double t) : w(std::move(weights)), theta(t) {
        if (w.empty()) throw BadParams("ltf: empty weight vector");
        double norm = 0.0;
        for (double wi : w) norm += wi * wi;
        if (!(norm > 0.0)) throw BadParams("ltf: zero weight vector");
    }

    std::size_t dim() const { return w.size(); }
};

inline int eval_pm(const LinearThreshold& f, std::span<const double> x) {
    if (x.size() != f.w.size()) throw DimMismatch("eval_pm: dimension mismatch");
    double z = -f.theta;
    for (std::size_t i = 0; i < x.size(); ++i) z += f.w[i] * x[i];
    return z >= 0.0 ? 1 : -1;
}

// The level-1 weight of an LTF as a function of its mean: for f = sgn(g - t)
// with g ~ N(0,1), sum_i fhat(e_i)^2 = 4 phi(t)^2 = (2/pi) exp(-t^2) where
// t = Phi^{-1}((1-mu)/2). Peaks at W(0) = 2/pi, vanishes at mu = +-1.
inline double w_function(double mu) {
    if (!(mu >= -1.0 && mu <= 1.0)) throw BadParams("w_function: |mu| must be <= 1");
    if (mu == 1.0 || mu == -1.0) return 0.0;
    const double t = normal_quantile((1.0 - mu) / 2.0);
    return (2.0 / 3.14159265358979323846) * std::exp(-t * t);
}

}  // namespace aptest
