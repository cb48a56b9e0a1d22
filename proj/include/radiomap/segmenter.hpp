#pragma once

#include "radiomap/subspace.hpp"
#include "radiomap/types.hpp"

#include <cstdint>
#include <memory>

namespace radiomap {

struct SegmenterConfig {
    int K = 2;
    double beta = 1.0;
    DimPolicy dims = DimPolicy::fixed(0, 2);
    int max_iters = 1000;
    bool random_init = false;
    std::uint64_t seed = 0;
    int jobs = 1;

    long min_seg_len() const { return dims.min_seg_len(); }
};

struct TraceRow {
    int phase = 1;  // 1: d=0 merge-and-split, 2: alternating refinement
    int iteration = 0;
    double cost = 0.0;
    int merge_k = 0;  // 0 on the initial row
    int split_j = 0;
    std::vector<long> tau;
};

struct SegmentationTrace {
    std::vector<TraceRow> rows;
};

// Literal f_k for d = 0 with hard segment means, k in 0..K. Reference evaluation.
double cost_fk_d0(const RssSequence& seq, int k, const Segmentation& tau, double beta);

// Literal general cost with log|C| + Mahalanobis terms, k in 0..K.
double cost_Fk_general(const RssSequence& seq, const ModelParams& theta, int k, const Segmentation& tau, double beta);

// (1/N) sum_i sum_k z_i(tau_{k-1}, tau_k) ||x_i - mu_hat_k||^2 with windowed means.
double hardened_objective(const RssSequence& seq, const Segmentation& tau, double beta);

// Fast evaluation of the sub-costs. The sigmoid weight is taken as exactly 0 or 1
// more than max(1, ceil(40 beta)) samples away from the split point, where it
// differs from the saturated value by less than exp(-40).
class CostEvaluator {
public:
    virtual ~CostEvaluator() = default;
    long N() const { return n_; }
    double beta() const { return beta_; }

    // (1/N) sum_{i=a+1}^{b} (1 - sigma(i - t)) g(i | (a, t], comp)
    virtual double part_left(long a, long t, long b, int comp) const = 0;
    // (1/N) sum_{i=a+1}^{b} sigma(i - t) g(i | (t, b], comp)
    virtual double part_right(long a, long t, long b, int comp) const = 0;
    // (1/N) sum_{i=a+1}^{b} g(i | (a, b], comp)
    virtual double unsplit(long a, long b, int comp) const = 0;

    // full = (0, tau_1, ..., tau_{K-1}, N); k in 0..K.
    double sub_cost(int k, const std::vector<long>& full) const;
    // (1/2) sum_{k=0}^{K} sub_cost(k)
    double total(const std::vector<long>& full) const;
    double total(const Segmentation& tau) const;

protected:
    CostEvaluator(long n, double beta);
    long band() const { return band_; }

private:
    long n_;
    double beta_;
    long band_;
};

std::unique_ptr<CostEvaluator> make_d0_cost(const RssSequence& seq, double beta);
std::unique_ptr<CostEvaluator> make_general_cost(const RssSequence& seq, const ModelParams& theta, double beta);

struct SplitResult {
    long tau = 0;
    double cost = 0.0;
};

// Exhaustive scan of tau in [a + min_len, b - min_len] minimizing
// part_left(a, tau, b, j) + part_right(a, tau, b, j + 1); lowest tau on ties.
SplitResult optimal_split(const CostEvaluator& cost, long a, long b, int j, long min_len);

struct IterResult {
    Segmentation tau;
    double cost = 0.0;  // total cost of the returned segmentation
    bool moved = false;
    int merge_k = 0;
    int split_j = 0;
};

IterResult merge_and_split_iter(const CostEvaluator& cost, const Segmentation& tau, long min_len, int jobs = 1);

Segmentation uniform_init(long N, int K);
// Uniform over all segmentations whose segments have at least min_len samples.
Segmentation random_init(long N, int K, long min_len, std::uint64_t seed);

struct Alg1Result {
    Segmentation tau;
    SegmentationTrace trace;
};

struct Alg2Result {
    Segmentation tau;
    ModelParams theta;
    SegmentationTrace trace;
};

Alg1Result run_alg1(const RssSequence& seq, const SegmenterConfig& cfg);
Alg2Result run_alg2(const RssSequence& seq, const SegmenterConfig& cfg);

// (1/N) sum_k max(|tau_k - t_k| - eps N, 0)
double epsilon_error(const Segmentation& tau, const Segmentation& truth, double eps);

// Sample i gets label k iff tau_{k-1} < i <= tau_k (1-based labels).
std::vector<int> labels_from_segmentation(const Segmentation& tau);

}  // namespace radiomap
