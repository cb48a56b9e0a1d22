#pragma once

#include "radiomap/types.hpp"

#include <cstdint>

namespace radiomap {

// Piecewise-constant mean sequence with isotropic noise: x_i = mu(i) + eps_i,
// eps_i ~ N(0, noise_var I).
struct ProxyInstance {
    Mat mus;                  // one row per true segment
    std::vector<long> t;      // true boundaries t_1..t_{J-1}
    long N = 0;
    double noise_var = 0.0;   // s^2 per coordinate

    long D() const { return static_cast<long>(mus.cols()); }
    // 0-based true segment containing sample i (1-based).
    int segment_of(long i) const;
    void validate() const;
};

// Expected value of the d = 0 sub-cost f_k over the noise, in closed form.
// Valid for any placement of true boundaries inside (tau_{k-1}, tau_{k+1}].
double cost_Fk_proxy(const ProxyInstance& inst, int k, const Segmentation& tau, double beta);

// Expected unsplit cost (1/N) E sum_{i=a+1}^{b} ||x_i - mean(a, b]||^2.
double proxy_unsplit(const ProxyInstance& inst, long a, long b);

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};

// Monte Carlo estimate of E{f_k} from fresh noise draws.
McEstimate cost_Fk_monte_carlo(const ProxyInstance& inst, int k, const Segmentation& tau, double beta, int draws,
                               std::uint64_t seed);

}  // namespace radiomap
