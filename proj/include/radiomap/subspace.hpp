#pragma once

#include "radiomap/types.hpp"

namespace radiomap {

struct WeightedStats {
    Vec mean;
    Mat cov;
    double weight_sum = 0.0;
};

// Per-region subspace dimension rule.
struct DimPolicy {
    std::vector<int> explicit_dims;  // empty: use the energy rule
    double energy = 0.97;
    int d_max = 3;

    static DimPolicy fixed(int d, int K) { return DimPolicy{std::vector<int>(static_cast<size_t>(K), d)}; }
    bool is_explicit() const { return !explicit_dims.empty(); }
    // Largest dimension any region may take under this policy.
    int max_dim() const;
    // max(2, max_dim + 1)
    long min_seg_len() const;
};

// k is the 1-based segment index.
Vec weighted_mean(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win);
Mat weighted_cov(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win, const Vec& mu);
WeightedStats weighted_stats(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win);

// Eigenvalues of the symmetrized covariance in descending order, with matching
// eigenvectors normalized so the largest-magnitude component is positive.
struct EigenSystem {
    Vec values;
    Mat vectors;
};
EigenSystem sorted_eigen(const Mat& S);

SubspaceFeature fit_subspace(const WeightedStats& stats, int dim);

// Smallest d whose leading eigenvalues hold the energy fraction, capped at
// min(d_max, D - 1, seg_len - 1).
int choose_dim(const Vec& eigenvalues_desc, const DimPolicy& policy, long seg_len);

ModelParams fit_all(const RssSequence& seq, const Segmentation& tau, const DimPolicy& dims, const WindowParams& win);

// Objective maximized by the ML noise/eigen selection for a chosen index set:
// -(sum_{j in sel} log l_j + (D-d) log s^2 + (1/s^2) sum_{j not in sel} l_j + d)
double ml_pca_objective(const Vec& eigenvalues, const std::vector<int>& selected);

}  // namespace radiomap
