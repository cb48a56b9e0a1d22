#include "radiomap/segmenter.hpp"

#include "radiomap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace radiomap {

namespace {

constexpr double kStopTol = 1e-12;

std::vector<long> full_bounds(const Segmentation& tau) {
    std::vector<long> f;
    f.reserve(tau.boundaries.size() + 2);
    f.push_back(0);
    f.insert(f.end(), tau.boundaries.begin(), tau.boundaries.end());
    f.push_back(tau.N);
    return f;
}

Segmentation from_full(const std::vector<long>& f) {
    return Segmentation(std::vector<long>(f.begin() + 1, f.end() - 1), f.back());
}

Vec hard_mean(const RssSequence& seq, long a, long b) {
    if (b <= a) throw input_error("segment mean over an empty range");
    Vec m = Vec::Zero(seq.D());
    for (long i = a + 1; i <= b; ++i) m += seq.x(i);
    return m / static_cast<double>(b - a);
}

void check_cost_args(const RssSequence& seq, int k, const Segmentation& tau) {
    if (tau.N != seq.N()) throw input_error("segment cost: segmentation length mismatch");
    if (k < 0 || k > tau.K()) throw input_error("segment cost: index out of range");
    tau.validate();
}

// Centered prefix sums for the d = 0 cost.
class D0Cost final : public CostEvaluator {
public:
    D0Cost(const RssSequence& seq, double beta)
        : CostEvaluator(seq.N(), beta), D_(seq.D()), y_(seq.N(), seq.D()) {
        Vec center = seq.samples.colwise().mean().transpose();
        for (long i = 0; i < seq.N(); ++i) y_.row(i) = (seq.samples.row(i) - center.transpose());
        const long n = seq.N();
        p1_.assign(static_cast<size_t>((n + 1) * D_), 0.0L);
        p2_.assign(static_cast<size_t>(n + 1), 0.0L);
        for (long i = 1; i <= n; ++i) {
            long double s2 = 0.0L;
            for (long d = 0; d < D_; ++d) {
                long double v = y_(i - 1, d);
                p1_[idx(i, d)] = p1_[idx(i - 1, d)] + v;
                s2 += v * v;
            }
            p2_[static_cast<size_t>(i)] = p2_[static_cast<size_t>(i - 1)] + s2;
        }
    }

    double part_left(long a, long t, long b, int) const override {
        std::vector<long double> m = mean(a, t);
        long double acc = range_sq(a + 1, std::min(b, t - band()), m);
        acc += band_sum(std::max(a + 1, t - band() + 1), std::min(b, t + band()), t, m, true);
        return static_cast<double>(acc / static_cast<long double>(N()));
    }

    double part_right(long a, long t, long b, int) const override {
        std::vector<long double> m = mean(t, b);
        long double acc = range_sq(std::max(a + 1, t + band() + 1), b, m);
        acc += band_sum(std::max(a + 1, t - band() + 1), std::min(b, t + band()), t, m, false);
        return static_cast<double>(acc / static_cast<long double>(N()));
    }

    double unsplit(long a, long b, int) const override {
        std::vector<long double> m = mean(a, b);
        return static_cast<double>(range_sq(a + 1, b, m) / static_cast<long double>(N()));
    }

private:
    size_t idx(long i, long d) const { return static_cast<size_t>(i * D_ + d); }

    std::vector<long double> mean(long a, long b) const {
        if (b <= a) throw input_error("segment mean over an empty range");
        std::vector<long double> m(static_cast<size_t>(D_));
        long double n = static_cast<long double>(b - a);
        for (long d = 0; d < D_; ++d) m[static_cast<size_t>(d)] = (p1_[idx(b, d)] - p1_[idx(a, d)]) / n;
        return m;
    }

    // sum_{i=lo}^{hi} ||y_i - m||^2
    long double range_sq(long lo, long hi, const std::vector<long double>& m) const {
        if (hi < lo) return 0.0L;
        long double n = static_cast<long double>(hi - lo + 1);
        long double s2 = p2_[static_cast<size_t>(hi)] - p2_[static_cast<size_t>(lo - 1)];
        long double cross = 0.0L, mm = 0.0L;
        for (long d = 0; d < D_; ++d) {
            long double md = m[static_cast<size_t>(d)];
            cross += md * (p1_[idx(hi, d)] - p1_[idx(lo - 1, d)]);
            mm += md * md;
        }
        long double v = s2 - 2.0L * cross + n * mm;
        return v < 0.0L ? 0.0L : v;
    }

    long double band_sum(long lo, long hi, long t, const std::vector<long double>& m, bool left) const {
        long double acc = 0.0L;
        for (long i = lo; i <= hi; ++i) {
            double s = sigmoid_beta(static_cast<double>(i - t), beta());
            double w = left ? 1.0 - s : s;
            if (w == 0.0) continue;
            long double q = 0.0L;
            for (long d = 0; d < D_; ++d) {
                long double r = static_cast<long double>(y_(i - 1, d)) - m[static_cast<size_t>(d)];
                q += r * r;
            }
            acc += static_cast<long double>(w) * q;
        }
        return acc;
    }

    long D_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> y_;
    std::vector<long double> p1_;
    std::vector<long double> p2_;
};

// Per-point costs log|C_c| + Mahalanobis_c(x_i) with prefix sums per component.
class GeneralCost final : public CostEvaluator {
public:
    GeneralCost(const RssSequence& seq, const ModelParams& theta, double beta)
        : CostEvaluator(seq.N(), beta), K_(static_cast<int>(theta.size())) {
        const long n = seq.N();
        g_.resize(n, K_);
        for (int c = 0; c < K_; ++c) {
            const auto& f = theta[static_cast<size_t>(c)];
            if (f.D() != seq.D()) throw input_error("general cost: feature dimension mismatch");
            double ld = log_det_cov(f);
            for (long i = 1; i <= n; ++i) g_(i - 1, c) = ld + mahalanobis_sq(seq.x(i), f);
        }
        p_.assign(static_cast<size_t>((n + 1) * K_), 0.0L);
        for (long i = 1; i <= n; ++i)
            for (int c = 0; c < K_; ++c) p_[idx(i, c)] = p_[idx(i - 1, c)] + g_(i - 1, c);
    }

    double part_left(long a, long t, long b, int comp) const override {
        int c = check(comp);
        long double acc = range(a + 1, std::min(b, t - band()), c);
        acc += band_sum(std::max(a + 1, t - band() + 1), std::min(b, t + band()), t, c, true);
        return static_cast<double>(acc / static_cast<long double>(N()));
    }

    double part_right(long a, long t, long b, int comp) const override {
        int c = check(comp);
        long double acc = range(std::max(a + 1, t + band() + 1), b, c);
        acc += band_sum(std::max(a + 1, t - band() + 1), std::min(b, t + band()), t, c, false);
        return static_cast<double>(acc / static_cast<long double>(N()));
    }

    double unsplit(long a, long b, int comp) const override {
        int c = check(comp);
        return static_cast<double>(range(a + 1, b, c) / static_cast<long double>(N()));
    }

private:
    int check(int comp) const {
        if (comp < 1 || comp > K_) throw input_error("general cost: component out of range");
        return comp - 1;
    }
    size_t idx(long i, int c) const { return static_cast<size_t>(i * K_ + c); }

    long double range(long lo, long hi, int c) const {
        if (hi < lo) return 0.0L;
        return p_[idx(hi, c)] - p_[idx(lo - 1, c)];
    }

    long double band_sum(long lo, long hi, long t, int c, bool left) const {
        long double acc = 0.0L;
        for (long i = lo; i <= hi; ++i) {
            double s = sigmoid_beta(static_cast<double>(i - t), beta());
            double w = left ? 1.0 - s : s;
            acc += static_cast<long double>(w) * g_(i - 1, c);
        }
        return acc;
    }

    int K_;
    Mat g_;
    std::vector<long double> p_;
};

}  // namespace

CostEvaluator::CostEvaluator(long n, double beta) : n_(n), beta_(beta) {
    if (!(beta > 0.0)) throw input_error("segment cost: beta must be positive");
    band_ = std::max<long>(1, static_cast<long>(std::ceil(40.0 * beta)));
}

double CostEvaluator::sub_cost(int k, const std::vector<long>& f) const {
    const int K = static_cast<int>(f.size()) - 1;
    if (k == 0) return part_right(0, 0, f[1], 1);
    if (k == K) return part_left(f[static_cast<size_t>(K - 1)], f[static_cast<size_t>(K)], f[static_cast<size_t>(K)], K);
    long a = f[static_cast<size_t>(k - 1)], t = f[static_cast<size_t>(k)], b = f[static_cast<size_t>(k + 1)];
    return part_left(a, t, b, k) + part_right(a, t, b, k + 1);
}

double CostEvaluator::total(const std::vector<long>& f) const {
    const int K = static_cast<int>(f.size()) - 1;
    double acc = 0.0;
    for (int k = 0; k <= K; ++k) acc += sub_cost(k, f);
    return 0.5 * acc;
}

double CostEvaluator::total(const Segmentation& tau) const { return total(full_bounds(tau)); }

std::unique_ptr<CostEvaluator> make_d0_cost(const RssSequence& seq, double beta) {
    return std::make_unique<D0Cost>(seq, beta);
}

std::unique_ptr<CostEvaluator> make_general_cost(const RssSequence& seq, const ModelParams& theta, double beta) {
    return std::make_unique<GeneralCost>(seq, theta, beta);
}

double cost_fk_d0(const RssSequence& seq, int k, const Segmentation& tau, double beta) {
    check_cost_args(seq, k, tau);
    const int K = tau.K();
    const double N = static_cast<double>(seq.N());
    double acc = 0.0;
    if (k == 0) {
        Vec m = hard_mean(seq, 0, tau.tau(1));
        for (long i = 1; i <= tau.tau(1); ++i)
            acc += sigmoid_beta(static_cast<double>(i), beta) * (seq.x(i) - m).squaredNorm();
        return acc / N;
    }
    if (k == K) {
        long a = tau.tau(K - 1);
        Vec m = hard_mean(seq, a, seq.N());
        for (long i = a + 1; i <= seq.N(); ++i)
            acc += (1.0 - sigmoid_beta(static_cast<double>(i - seq.N()), beta)) * (seq.x(i) - m).squaredNorm();
        return acc / N;
    }
    long a = tau.tau(k - 1), t = tau.tau(k), b = tau.tau(k + 1);
    Vec mL = hard_mean(seq, a, t), mR = hard_mean(seq, t, b);
    for (long i = a + 1; i <= b; ++i) {
        double s = sigmoid_beta(static_cast<double>(i - t), beta);
        acc += (1.0 - s) * (seq.x(i) - mL).squaredNorm() + s * (seq.x(i) - mR).squaredNorm();
    }
    return acc / N;
}

double cost_Fk_general(const RssSequence& seq, const ModelParams& theta, int k, const Segmentation& tau, double beta) {
    check_cost_args(seq, k, tau);
    const int K = tau.K();
    if (static_cast<int>(theta.size()) != K) throw input_error("general cost: theta size must equal K");
    const double N = static_cast<double>(seq.N());
    auto g = [&](long i, int c) {
        const auto& f = theta[static_cast<size_t>(c - 1)];
        return log_det_cov(f) + mahalanobis_sq(seq.x(i), f);
    };
    double acc = 0.0;
    if (k == 0) {
        for (long i = 1; i <= tau.tau(1); ++i) acc += sigmoid_beta(static_cast<double>(i), beta) * g(i, 1);
        return acc / N;
    }
    if (k == K) {
        for (long i = tau.tau(K - 1) + 1; i <= seq.N(); ++i)
            acc += (1.0 - sigmoid_beta(static_cast<double>(i - seq.N()), beta)) * g(i, K);
        return acc / N;
    }
    long a = tau.tau(k - 1), t = tau.tau(k), b = tau.tau(k + 1);
    for (long i = a + 1; i <= b; ++i) {
        double s = sigmoid_beta(static_cast<double>(i - t), beta);
        acc += (1.0 - s) * g(i, k) + s * g(i, k + 1);
    }
    return acc / N;
}

double hardened_objective(const RssSequence& seq, const Segmentation& tau, double beta) {
    if (tau.N != seq.N()) throw input_error("hardened objective: segmentation length mismatch");
    tau.validate();
    WindowParams win{beta, WindowMode::Smooth};
    const int K = tau.K();
    std::vector<Vec> mu;
    for (int k = 1; k <= K; ++k) mu.push_back(weighted_mean(seq, k, tau, win));
    double acc = 0.0;
    for (long i = 1; i <= seq.N(); ++i) {
        Vec xi = seq.x(i);
        for (int k = 1; k <= K; ++k) {
            double z = window_smooth(i, tau.tau(k - 1), tau.tau(k), beta);
            if (z != 0.0) acc += z * (xi - mu[static_cast<size_t>(k - 1)]).squaredNorm();
        }
    }
    return acc / static_cast<double>(seq.N());
}

SplitResult optimal_split(const CostEvaluator& cost, long a, long b, int j, long min_len) {
    if (b - a < 2 * min_len) throw input_error("optimal_split: interval too short");
    SplitResult best{0, std::numeric_limits<double>::infinity()};
    for (long t = a + min_len; t <= b - min_len; ++t) {
        double c = cost.part_left(a, t, b, j) + cost.part_right(a, t, b, j + 1);
        if (c < best.cost) best = {t, c};
    }
    return best;
}

namespace {

struct MergeCandidate {
    bool valid = false;
    std::vector<long> full;
    double total = std::numeric_limits<double>::infinity();
    int j = 0;
};

MergeCandidate evaluate_merge(const CostEvaluator& cost, const std::vector<long>& f, int k, long min_len) {
    const int K = static_cast<int>(f.size()) - 1;
    std::vector<long> merged = f;
    merged.erase(merged.begin() + k);
    MergeCandidate out;
    double best_gain = -std::numeric_limits<double>::infinity();
    SplitResult best_split;
    for (int j = 1; j <= K - 1; ++j) {
        long a = merged[static_cast<size_t>(j - 1)], b = merged[static_cast<size_t>(j)];
        if (b - a < 2 * min_len) continue;
        SplitResult s = optimal_split(cost, a, b, j, min_len);
        double gain = cost.unsplit(a, b, j + 1) - s.cost;
        if (gain > best_gain) {
            best_gain = gain;
            best_split = s;
            out.j = j;
            out.valid = true;
        }
    }
    if (!out.valid) return out;
    out.full = merged;
    out.full.insert(out.full.begin() + out.j, best_split.tau);
    out.total = cost.total(out.full);
    return out;
}

}  // namespace

IterResult merge_and_split_iter(const CostEvaluator& cost, const Segmentation& tau, long min_len, int jobs) {
    if (tau.N != cost.N()) throw input_error("merge_and_split: segmentation length mismatch");
    tau.validate(min_len);
    const std::vector<long> f = full_bounds(tau);
    const int K = tau.K();
    IterResult res{tau, cost.total(f), false, 0, 0};
    if (K < 2) return res;

    std::vector<MergeCandidate> cands(static_cast<size_t>(K));
    int workers = std::clamp(jobs, 1, K - 1);
    if (workers == 1) {
        for (int k = 1; k <= K - 1; ++k) cands[static_cast<size_t>(k)] = evaluate_merge(cost, f, k, min_len);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int k = 1 + w; k <= K - 1; k += workers)
                    cands[static_cast<size_t>(k)] = evaluate_merge(cost, f, k, min_len);
            });
        }
        for (auto& t : pool) t.join();
    }

    int best_k = 0;
    for (int k = 1; k <= K - 1; ++k) {
        const auto& c = cands[static_cast<size_t>(k)];
        if (c.valid && (best_k == 0 || c.total < cands[static_cast<size_t>(best_k)].total)) best_k = k;
    }
    if (best_k == 0) return res;
    const auto& best = cands[static_cast<size_t>(best_k)];
    if (best.total < res.cost - kStopTol) {
        res.tau = from_full(best.full);
        res.cost = best.total;
        res.moved = true;
        res.merge_k = best_k;
        res.split_j = best.j;
    }
    return res;
}

Segmentation uniform_init(long N, int K) {
    std::vector<long> b;
    for (int k = 1; k < K; ++k) b.push_back(static_cast<long>((static_cast<long long>(k) * N) / K));
    return Segmentation(b, N);
}

Segmentation random_init(long N, int K, long min_len, std::uint64_t seed) {
    long slack = N - static_cast<long>(K) * min_len;
    if (slack < 0) throw input_error("random_init: N too small for K segments");
    std::mt19937_64 rng(seed);
    // Choose K-1 sorted distinct values c from {0, ..., slack + K - 2}; y_k = c_k - (k - 1)
    // is then a uniform nondecreasing sequence in [0, slack].
    long pool = slack + K - 1;
    std::vector<long> chosen;
    std::vector<long> all(static_cast<size_t>(pool));
    for (long v = 0; v < pool; ++v) all[static_cast<size_t>(v)] = v;
    for (int k = 0; k < K - 1; ++k) {
        std::uniform_int_distribution<long> pick(k, pool - 1);
        std::swap(all[static_cast<size_t>(k)], all[static_cast<size_t>(pick(rng))]);
        chosen.push_back(all[static_cast<size_t>(k)]);
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<long> b;
    for (int k = 1; k < K; ++k) b.push_back(chosen[static_cast<size_t>(k - 1)] - (k - 1) + k * min_len);
    return Segmentation(b, N);
}

namespace {

void check_feasible(const RssSequence& seq, const SegmenterConfig& cfg) {
    if (cfg.K < 2) throw input_error("segmenter: K must be at least 2");
    if (cfg.max_iters < 1) throw input_error("segmenter: max_iters must be at least 1");
    if (seq.N() < cfg.K * cfg.min_seg_len()) throw input_error("segmenter: N too small for K segments");
}

TraceRow make_row(int phase, int it, const IterResult& r) {
    return TraceRow{phase, it, r.cost, r.merge_k, r.split_j, r.tau.boundaries};
}

}  // namespace

Alg1Result run_alg1(const RssSequence& seq, const SegmenterConfig& cfg) {
    check_feasible(seq, cfg);
    const long L = cfg.min_seg_len();
    Segmentation tau = cfg.random_init ? random_init(seq.N(), cfg.K, L, cfg.seed) : uniform_init(seq.N(), cfg.K);
    tau.validate(L);
    auto cost = make_d0_cost(seq, cfg.beta);
    Alg1Result out;
    out.trace.rows.push_back(TraceRow{1, 0, cost->total(tau), 0, 0, tau.boundaries});
    for (int it = 1; it <= cfg.max_iters; ++it) {
        IterResult r = merge_and_split_iter(*cost, tau, L, cfg.jobs);
        if (!r.moved) break;
        tau = r.tau;
        out.trace.rows.push_back(make_row(1, it, r));
    }
    out.tau = tau;
    return out;
}

Alg2Result run_alg2(const RssSequence& seq, const SegmenterConfig& cfg) {
    Alg1Result init = run_alg1(seq, cfg);
    const long L = cfg.min_seg_len();
    const WindowParams win{cfg.beta, WindowMode::Smooth};
    Alg2Result out;
    out.trace = init.trace;
    Segmentation tau = init.tau;
    ModelParams theta = fit_all(seq, tau, cfg.dims, win);
    auto cost = make_general_cost(seq, theta, cfg.beta);
    double prev = cost->total(tau);
    out.trace.rows.push_back(TraceRow{2, 0, prev, 0, 0, tau.boundaries});
    for (int it = 1; it <= cfg.max_iters; ++it) {
        IterResult r = merge_and_split_iter(*cost, tau, L, cfg.jobs);
        if (!r.moved) break;
        tau = r.tau;
        out.trace.rows.push_back(make_row(2, it, r));
        prev = r.cost;
        ModelParams refit = fit_all(seq, tau, cfg.dims, win);
        auto next = make_general_cost(seq, refit, cfg.beta);
        double c = next->total(tau);
        // The refit must not raise the cost at the new boundaries; otherwise stop here.
        if (c > prev + kStopTol) break;
        theta = std::move(refit);
        cost = std::move(next);
        prev = c;
    }
    out.tau = tau;
    out.theta = fit_all(seq, tau, cfg.dims, win);
    return out;
}

double epsilon_error(const Segmentation& tau, const Segmentation& truth, double eps) {
    if (tau.K() != truth.K()) throw input_error("epsilon_error: K mismatch");
    if (tau.N != truth.N) throw input_error("epsilon_error: N mismatch");
    const double tol = eps * static_cast<double>(tau.N);
    double acc = 0.0;
    for (size_t k = 0; k < tau.boundaries.size(); ++k) {
        double dev = std::fabs(static_cast<double>(tau.boundaries[k] - truth.boundaries[k]));
        acc += std::max(dev - tol, 0.0);
    }
    return acc / static_cast<double>(tau.N);
}

std::vector<int> labels_from_segmentation(const Segmentation& tau) {
    std::vector<int> lab(static_cast<size_t>(tau.N));
    for (int k = 1; k <= tau.K(); ++k)
        for (long i = tau.tau(k - 1) + 1; i <= tau.tau(k); ++i) lab[static_cast<size_t>(i - 1)] = k;
    return lab;
}

}  // namespace radiomap
