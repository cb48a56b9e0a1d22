#pragma once

#include "radiomap/types.hpp"

namespace radiomap {

// sigma_beta(x) = 1 / (1 + exp(-(x - 1/2) / beta))
double sigmoid_beta(double x, double beta);

// 1 if a < i <= b else 0. Requires a < b.
double window_rect(long i, long a, long b);

// sigma_beta(i - a) - sigma_beta(i - b). Requires a < b, beta > 0.
double window_smooth(long i, long a, long b, double beta);

double window(long i, long a, long b, const WindowParams& win);

// Gaussian log-density of x under C = U diag(sigma2) U^T + s^2 I, evaluated
// through the eigenstructure of C.
double log_density(const Vec& x, const SubspaceFeature& feat);

// log|C| and the quadratic form separately; used by the general segment cost.
double log_det_cov(const SubspaceFeature& feat);
double mahalanobis_sq(const Vec& x, const SubspaceFeature& feat);

// (1/N) sum_i sum_k z_i(tau_{k-1}, tau_k) log p_k(x_i).
double log_likelihood(const RssSequence& seq, const ModelParams& theta, const Segmentation& tau,
                      const WindowParams& win);

}  // namespace radiomap
