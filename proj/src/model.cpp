#include "radiomap/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace radiomap {

RssSequence::RssSequence(Mat s) : samples(std::move(s)) {
    if (samples.rows() < 1 || samples.cols() < 1) throw input_error("RSS sequence needs N >= 1 and D >= 1");
    if (!samples.allFinite()) throw quality_error("RSS sequence contains non-finite values");
}

long Segmentation::tau(int k) const {
    if (k <= 0) return 0;
    if (k >= K()) return N;
    return boundaries[static_cast<size_t>(k - 1)];
}

void Segmentation::validate(long min_len) const {
    if (N < 1) throw input_error("segmentation: N must be positive");
    long prev = 0;
    for (int k = 1; k <= K(); ++k) {
        long t = tau(k);
        if (t - prev < min_len) {
            std::ostringstream os;
            os << "segmentation: segment " << k << " has length " << (t - prev) << " < " << min_len;
            throw input_error(os.str());
        }
        prev = t;
    }
}

void SubspaceFeature::validate() const {
    long d = basis.cols();
    if (basis.rows() != mu.size() && d > 0) throw input_error("feature: basis rows must equal D");
    if (sigma2.size() != d) throw input_error("feature: sigma2 length must equal basis columns");
    if (d > mu.size()) throw input_error("feature: dim exceeds D");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) throw input_error("feature: noise_var must be positive");
    for (long j = 0; j < d; ++j)
        if (sigma2(j) < 0.0 || !std::isfinite(sigma2(j))) throw input_error("feature: sigma2 must be nonnegative");
    if (d > 0) {
        Mat g = basis.transpose() * basis - Mat::Identity(d, d);
        if (g.cwiseAbs().maxCoeff() > 1e-9) throw input_error("feature: basis is not orthonormal");
    }
}

void RadioMap::validate() const {
    if (features.empty()) throw input_error("radio map has no features");
    long D = features.front().D();
    for (const auto& f : features) {
        f.validate();
        if (f.D() != D) throw input_error("radio map features disagree on D");
    }
    if (region_ids && static_cast<int>(region_ids->size()) != K())
        throw input_error("radio map region_ids length must equal K");
}

double sigmoid_beta(double x, double beta) {
    double t = (x - 0.5) / beta;
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

double window_rect(long i, long a, long b) {
    if (a >= b) throw input_error("window: requires a < b");
    return (a < i && i <= b) ? 1.0 : 0.0;
}

double window_smooth(long i, long a, long b, double beta) {
    if (a >= b) throw input_error("window: requires a < b");
    if (!(beta > 0.0)) throw input_error("window: beta must be positive");
    return sigmoid_beta(static_cast<double>(i - a), beta) - sigmoid_beta(static_cast<double>(i - b), beta);
}

double window(long i, long a, long b, const WindowParams& win) {
    return win.mode == WindowMode::Rectangle ? window_rect(i, a, b) : window_smooth(i, a, b, win.beta);
}

namespace {

void check_density_args(const Vec& x, const SubspaceFeature& feat) {
    if (x.size() != feat.D()) throw input_error("log_density: dimension mismatch");
    if (!x.allFinite()) throw quality_error("log_density: non-finite input");
    if (!(feat.noise_var > 0.0)) throw input_error("log_density: singular covariance (noise_var <= 0)");
}

}  // namespace

double log_det_cov(const SubspaceFeature& feat) {
    const double s2 = feat.noise_var;
    const int d = feat.dim();
    double ld = static_cast<double>(feat.D() - d) * std::log(s2);
    for (int j = 0; j < d; ++j) ld += std::log(feat.sigma2(j) + s2);
    return ld;
}

double mahalanobis_sq(const Vec& x, const SubspaceFeature& feat) {
    check_density_args(x, feat);
    const double s2 = feat.noise_var;
    Vec r = x - feat.mu;
    double q = r.squaredNorm() / s2;
    const int d = feat.dim();
    if (d > 0) {
        Vec p = feat.basis.transpose() * r;
        for (int j = 0; j < d; ++j) {
            double l = feat.sigma2(j);
            q -= p(j) * p(j) * l / (s2 * (l + s2));
        }
    }
    return q;
}

double log_density(const Vec& x, const SubspaceFeature& feat) {
    double q = mahalanobis_sq(x, feat);
    double D = static_cast<double>(feat.D());
    return -0.5 * (D * std::log(2.0 * std::numbers::pi) + log_det_cov(feat) + q);
}

double log_likelihood(const RssSequence& seq, const ModelParams& theta, const Segmentation& tau,
                      const WindowParams& win) {
    const int K = tau.K();
    if (static_cast<int>(theta.size()) != K) throw input_error("log_likelihood: theta size must equal K");
    if (tau.N != seq.N()) throw input_error("log_likelihood: segmentation length mismatch");
    tau.validate();
    double acc = 0.0;
    for (long i = 1; i <= seq.N(); ++i) {
        Vec xi = seq.x(i);
        for (int k = 1; k <= K; ++k) {
            double z = window(i, tau.tau(k - 1), tau.tau(k), win);
            if (z == 0.0) continue;
            acc += z * log_density(xi, theta[static_cast<size_t>(k - 1)]);
        }
    }
    return acc / static_cast<double>(seq.N());
}

}  // namespace radiomap
