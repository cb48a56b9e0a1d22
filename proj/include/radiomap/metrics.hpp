#pragma once

#include "radiomap/types.hpp"

namespace radiomap {

enum class NmiNorm { Geometric, Arithmetic };

// Best-match accuracy: maximum over label bijections of the agreement rate,
// solved by optimal assignment on the contingency matrix.
double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm = NmiNorm::Geometric);

struct PairScores {
    double f1 = 0.0;
    double ari = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Pair counting with same-cluster pairs as positives. Precision is 0 when no pair
// is predicted positive; F1 is 0 when precision + recall is 0.
PairScores pairwise_scores(const std::vector<int>& pred, const std::vector<int>& truth);

// Normalized projector overlap of the bases augmented by the out-of-span offset.
double subspace_similarity(const SubspaceFeature& a, const SubspaceFeature& b);

// Minimum-cost assignment for a square cost matrix; returns col index per row.
std::vector<int> hungarian(const Mat& cost);

}  // namespace radiomap
