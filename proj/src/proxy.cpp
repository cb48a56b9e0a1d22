#include "radiomap/proxy.hpp"

#include "radiomap/model.hpp"
#include "radiomap/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace radiomap {

int ProxyInstance::segment_of(long i) const {
    return static_cast<int>(std::lower_bound(t.begin(), t.end(), i) - t.begin());
}

void ProxyInstance::validate() const {
    if (static_cast<long>(t.size()) + 1 != mus.rows()) throw input_error("proxy: need one mean per true segment");
    long prev = 0;
    for (long b : t) {
        if (b <= prev) throw input_error("proxy: true boundaries must increase");
        prev = b;
    }
    if (prev >= N) throw input_error("proxy: true boundaries must lie below N");
    if (noise_var < 0.0) throw input_error("proxy: noise variance must be nonnegative");
}

namespace {

// Average of the true means over (p, q].
Vec range_mean(const ProxyInstance& inst, long p, long q) {
    Vec m = Vec::Zero(inst.D());
    long lo = p;
    for (int s = inst.segment_of(p + 1); lo < q; ++s) {
        long end = (s < static_cast<int>(inst.t.size())) ? std::min(q, inst.t[static_cast<size_t>(s)]) : q;
        m += static_cast<double>(end - lo) * inst.mus.row(s).transpose();
        lo = end;
    }
    return m / static_cast<double>(q - p);
}

// (1/N) sum_{i=a+1}^{b} w(i) E||x_i - mean(seg)||^2 where seg = (p, q] and w is the
// left (1 - sigma(i - t)) or right sigma(i - t) weight.
double expected_part(const ProxyInstance& inst, long a, long t, long b, long p, long q, bool left, double beta) {
    if (q <= p) throw input_error("proxy: empty segment");
    Vec m = range_mean(inst, p, q);
    std::vector<double> dist(static_cast<size_t>(inst.mus.rows()));
    for (long s = 0; s < inst.mus.rows(); ++s) dist[static_cast<size_t>(s)] = (inst.mus.row(s).transpose() - m).squaredNorm();
    const double s0 = static_cast<double>(inst.D()) * inst.noise_var;
    const double n = static_cast<double>(q - p);
    double acc = 0.0;
    for (long i = a + 1; i <= b; ++i) {
        double sg = sigmoid_beta(static_cast<double>(i - t), beta);
        double w = left ? 1.0 - sg : sg;
        double inside = (p < i && i <= q) ? 1.0 : 0.0;
        acc += w * (dist[static_cast<size_t>(inst.segment_of(i))] + s0 * (1.0 + 1.0 / n - 2.0 * inside / n));
    }
    return acc / static_cast<double>(inst.N);
}

}  // namespace

double cost_Fk_proxy(const ProxyInstance& inst, int k, const Segmentation& tau, double beta) {
    inst.validate();
    if (tau.N != inst.N) throw input_error("proxy: segmentation length mismatch");
    if (k < 0 || k > tau.K()) throw input_error("proxy: index out of range");
    tau.validate();
    const int K = tau.K();
    if (k == 0) return expected_part(inst, 0, 0, tau.tau(1), 0, tau.tau(1), false, beta);
    if (k == K) {
        long a = tau.tau(K - 1);
        return expected_part(inst, a, inst.N, inst.N, a, inst.N, true, beta);
    }
    long a = tau.tau(k - 1), t = tau.tau(k), b = tau.tau(k + 1);
    return expected_part(inst, a, t, b, a, t, true, beta) + expected_part(inst, a, t, b, t, b, false, beta);
}

double proxy_unsplit(const ProxyInstance& inst, long a, long b) {
    inst.validate();
    if (!(0 <= a && a < b && b <= inst.N)) throw input_error("proxy: invalid range");
    Vec m = range_mean(inst, a, b);
    const double s0 = static_cast<double>(inst.D()) * inst.noise_var;
    const double n = static_cast<double>(b - a);
    double acc = 0.0;
    for (long i = a + 1; i <= b; ++i)
        acc += (inst.mus.row(inst.segment_of(i)).transpose() - m).squaredNorm() + s0 * (1.0 - 1.0 / n);
    return acc / static_cast<double>(inst.N);
}

McEstimate cost_Fk_monte_carlo(const ProxyInstance& inst, int k, const Segmentation& tau, double beta, int draws,
                               std::uint64_t seed) {
    inst.validate();
    if (draws < 2) throw input_error("monte carlo: need at least two draws");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(inst.noise_var));
    Mat X(inst.N, inst.D());
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < draws; ++r) {
        for (long i = 1; i <= inst.N; ++i) {
            int s = inst.segment_of(i);
            for (long d = 0; d < inst.D(); ++d) X(i - 1, d) = inst.mus(s, d) + gauss(rng);
        }
        RssSequence seq;
        seq.samples = X;
        double v = cost_fk_d0(seq, k, tau, beta);
        sum += v;
        sum2 += v * v;
    }
    double n = static_cast<double>(draws);
    double mean = sum / n;
    double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

}  // namespace radiomap
