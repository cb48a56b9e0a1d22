#pragma once

#include "radiomap/types.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace testutil {

using radiomap::Mat;
using radiomap::Vec;

// Piecewise-constant means plus isotropic Gaussian noise.
inline radiomap::RssSequence step_sequence(const Mat& means, const std::vector<long>& bounds, long N, double noise_sd,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat X(N, means.cols());
    size_t s = 0;
    for (long i = 1; i <= N; ++i) {
        while (s < bounds.size() && i > bounds[s]) ++s;
        for (long d = 0; d < means.cols(); ++d) X(i - 1, d) = means(static_cast<long>(s), d) + noise_sd * g(rng);
    }
    return radiomap::RssSequence(X);
}

inline Mat random_means(int K, long D, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    Mat M(K, D);
    for (int k = 0; k < K; ++k)
        for (long d = 0; d < D; ++d) M(k, d) = g(rng);
    return M;
}

// Calls f on every boundary vector with segments of at least min_len samples.
inline void for_each_segmentation(long N, int K, long min_len, const std::function<void(const std::vector<long>&)>& f) {
    std::vector<long> b(static_cast<size_t>(K - 1));
    std::function<void(int, long)> rec = [&](int idx, long lo) {
        if (idx == K - 1) {
            if (N - (K > 1 ? b.back() : 0) >= min_len) f(b);
            return;
        }
        for (long v = lo; v <= N - min_len * (K - 1 - idx); ++v) {
            b[static_cast<size_t>(idx)] = v;
            rec(idx + 1, v + min_len);
        }
    };
    rec(0, min_len);
}

// Dense Gaussian log-density with C = U diag(s) U^T + s2 I.
inline double dense_log_density(const Vec& x, const Vec& mu, const Mat& U, const Vec& sig, double s2) {
    const long D = mu.size();
    Mat C = s2 * Mat::Identity(D, D);
    if (U.cols() > 0) C += U * sig.asDiagonal() * U.transpose();
    Eigen::LLT<Mat> llt(C);
    Vec r = x - mu;
    double q = r.dot(llt.solve(r));
    double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(D) * std::log(2.0 * std::numbers::pi) + ld + q);
}

inline Mat random_orthonormal(long D, int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat G(D, std::max(d, 1));
    for (long r = 0; r < D; ++r)
        for (long c = 0; c < G.cols(); ++c) G(r, c) = g(rng);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat Q = qr.householderQ() * Mat::Identity(D, G.cols());
    return Q.leftCols(d);
}

}  // namespace testutil
