#include "radiomap/subspace.hpp"

#include "radiomap/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radiomap {

namespace {

constexpr double kNoiseFloor = 1e-12;

void check_segment(const RssSequence& seq, int k, const Segmentation& tau) {
    if (tau.N != seq.N()) throw input_error("segment statistics: segmentation length mismatch");
    if (k < 1 || k > tau.K()) throw input_error("segment statistics: segment index out of range");
}

std::vector<double> segment_weights(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win,
                                    double& total) {
    check_segment(seq, k, tau);
    std::vector<double> w(static_cast<size_t>(seq.N()));
    total = 0.0;
    const long a = tau.tau(k - 1), b = tau.tau(k);
    for (long i = 1; i <= seq.N(); ++i) {
        double z = window(i, a, b, win);
        w[static_cast<size_t>(i - 1)] = z;
        total += z;
    }
    if (!(total > 1e-9)) throw quality_error("segment statistics: degenerate window mass");
    return w;
}

}  // namespace

int DimPolicy::max_dim() const {
    if (is_explicit()) return *std::max_element(explicit_dims.begin(), explicit_dims.end());
    return d_max;
}

long DimPolicy::min_seg_len() const { return std::max<long>(2, max_dim() + 1); }

Vec weighted_mean(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win) {
    double total = 0.0;
    auto w = segment_weights(seq, k, tau, win, total);
    Vec m = Vec::Zero(seq.D());
    for (long i = 1; i <= seq.N(); ++i) {
        double z = w[static_cast<size_t>(i - 1)];
        if (z != 0.0) m += z * seq.x(i);
    }
    return m / total;
}

Mat weighted_cov(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win, const Vec& mu) {
    if (mu.size() != seq.D()) throw input_error("weighted_cov: mean dimension mismatch");
    double total = 0.0;
    auto w = segment_weights(seq, k, tau, win, total);
    Mat S = Mat::Zero(seq.D(), seq.D());
    for (long i = 1; i <= seq.N(); ++i) {
        double z = w[static_cast<size_t>(i - 1)];
        if (z == 0.0) continue;
        Vec r = seq.x(i) - mu;
        S.noalias() += z * r * r.transpose();
    }
    return S / total;
}

WeightedStats weighted_stats(const RssSequence& seq, int k, const Segmentation& tau, const WindowParams& win) {
    WeightedStats st;
    double total = 0.0;
    segment_weights(seq, k, tau, win, total);
    st.mean = weighted_mean(seq, k, tau, win);
    st.cov = weighted_cov(seq, k, tau, win, st.mean);
    st.weight_sum = total;
    return st;
}

EigenSystem sorted_eigen(const Mat& S) {
    Mat sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    if (es.info() != Eigen::Success) throw quality_error("eigendecomposition failed");
    const long D = S.rows();
    EigenSystem out;
    out.values.resize(D);
    out.vectors.resize(D, D);
    // Solver returns ascending order; reverse it.
    for (long j = 0; j < D; ++j) {
        out.values(j) = es.eigenvalues()(D - 1 - j);
        Vec v = es.eigenvectors().col(D - 1 - j);
        Eigen::Index idx = 0;
        v.cwiseAbs().maxCoeff(&idx);
        if (v(idx) < 0.0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

SubspaceFeature fit_subspace(const WeightedStats& stats, int dim) {
    const long D = stats.cov.rows();
    if (stats.cov.cols() != D || stats.mean.size() != D) throw input_error("fit_subspace: shape mismatch");
    if (dim < 0 || dim >= D) throw input_error("fit_subspace: need 0 <= d < D");
    double scale = std::max(1.0, stats.cov.norm());
    if ((stats.cov - stats.cov.transpose()).norm() > 1e-9 * scale)
        throw input_error("fit_subspace: covariance is not symmetric");

    EigenSystem es = sorted_eigen(stats.cov);
    double tail = 0.0;
    for (long j = dim; j < D; ++j) tail += es.values(j);
    double s2 = std::max(tail / static_cast<double>(D - dim), kNoiseFloor);

    SubspaceFeature f;
    f.mu = stats.mean;
    f.basis = es.vectors.leftCols(dim);
    f.sigma2.resize(dim);
    for (int j = 0; j < dim; ++j) f.sigma2(j) = std::max(es.values(j) - s2, 0.0);
    f.noise_var = s2;
    return f;
}

int choose_dim(const Vec& ev, const DimPolicy& policy, long seg_len) {
    const long D = ev.size();
    long cap = std::min<long>({static_cast<long>(policy.d_max), D - 1, seg_len - 1});
    cap = std::max<long>(cap, 0);
    double total = 0.0;
    for (long j = 0; j < D; ++j) total += std::max(ev(j), 0.0);
    if (!(total > 0.0)) return 0;
    double acc = 0.0;
    for (long d = 0; d <= cap; ++d) {
        if (acc >= policy.energy * total) return static_cast<int>(d);
        acc += std::max(ev(d), 0.0);
    }
    return static_cast<int>(cap);
}

ModelParams fit_all(const RssSequence& seq, const Segmentation& tau, const DimPolicy& dims, const WindowParams& win) {
    const int K = tau.K();
    if (dims.is_explicit() && static_cast<int>(dims.explicit_dims.size()) != K)
        throw input_error("fit_all: explicit dims must have K entries");
    ModelParams theta;
    theta.reserve(static_cast<size_t>(K));
    for (int k = 1; k <= K; ++k) {
        long len = tau.segment_length(k);
        WeightedStats st = weighted_stats(seq, k, tau, win);
        int d = 0;
        if (dims.is_explicit()) {
            d = dims.explicit_dims[static_cast<size_t>(k - 1)];
            if (len < std::max<long>(2, d + 1)) throw input_error("fit_all: segment too short for its dimension");
        } else {
            d = choose_dim(sorted_eigen(st.cov).values, dims, len);
        }
        theta.push_back(fit_subspace(st, d));
    }
    return theta;
}

double ml_pca_objective(const Vec& ev, const std::vector<int>& selected) {
    const long D = ev.size();
    const long d = static_cast<long>(selected.size());
    std::vector<bool> in(static_cast<size_t>(D), false);
    for (int j : selected) in[static_cast<size_t>(j)] = true;
    double rest = 0.0, logsel = 0.0;
    for (long j = 0; j < D; ++j) {
        if (in[static_cast<size_t>(j)]) logsel += std::log(ev(j));
        else rest += ev(j);
    }
    double s2 = rest / static_cast<double>(D - d);
    return -(logsel + static_cast<double>(D - d) * std::log(s2) + rest / s2 + static_cast<double>(d));
}

}  // namespace radiomap
