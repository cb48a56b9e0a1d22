#include "radiomap/synth.hpp"

#include "radiomap/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace radiomap {

int SynthSpec::dim_of(int k) const {
    if (dims.empty()) return dim;
    return dims[static_cast<size_t>(k - 1)];
}

void SynthSpec::validate() const {
    if (K < 1) throw input_error("spec.K: must be at least 1");
    if (D < 1) throw input_error("spec.D: must be at least 1");
    if (N < K) throw input_error("spec.N: must be at least K");
    if (!dims.empty() && static_cast<int>(dims.size()) != K) throw input_error("spec.dims: need K entries");
    for (int k = 1; k <= K; ++k)
        if (dim_of(k) < 0 || dim_of(k) >= D) throw input_error("spec.dims: need 0 <= d < D");
    if (!(ratio > 0.0)) throw input_error("spec.ratio: must be positive");
    if (!(noise_var >= 0.0)) throw input_error("spec.noise_var: must be nonnegative");
    if (!(sigma_lo >= 0.0 && sigma_hi >= sigma_lo)) throw input_error("spec.sigma_range: need 0 <= lo <= hi");
    if (!fractions.empty()) {
        if (static_cast<int>(fractions.size()) != K) throw input_error("spec.fractions: need K entries");
        double s = 0.0;
        for (double f : fractions) {
            if (!(f > 0.0)) throw input_error("spec.fractions: entries must be positive");
            s += f;
        }
        if (std::fabs(s - 1.0) > 1e-9) throw input_error("spec.fractions: must sum to 1");
    }
    if (transition_len < 0) throw input_error("spec.transition_len: must be nonnegative");
    if (!(area_w > 0.0 && area_h > 0.0)) throw input_error("spec.area: must be positive");
    if (!(cell_fill > 0.0 && cell_fill <= 1.0)) throw input_error("spec.cell_fill: must lie in (0, 1]");
    if (queries < 0) throw input_error("spec.queries: must be nonnegative");
    if (edges_target < 0) throw input_error("spec.edges_target: must be nonnegative");
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& purpose) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : purpose) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    std::uint32_t out[2];
    ss.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Segmentation truth_boundaries(const SynthSpec& spec) {
    std::vector<long> b;
    double acc = 0.0;
    for (int k = 1; k < spec.K; ++k) {
        acc += spec.fractions.empty() ? 1.0 / spec.K : spec.fractions[static_cast<size_t>(k - 1)];
        b.push_back(std::llround(acc * static_cast<double>(spec.N)));
    }
    Segmentation t(b, spec.N);
    t.validate();
    for (int k = 1; k <= t.K(); ++k)
        if (spec.transition_len >= t.segment_length(k)) throw input_error("spec.transition_len: longer than a segment");
    return t;
}

GeneratedModel gen_model(const SynthSpec& spec) {
    spec.validate();
    if (spec.K > spec.D) throw input_error("spec: K > D, region means cannot be linearly independent");
    std::mt19937_64 rng(stream_seed(spec.seed, "model"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(spec.sigma_lo, spec.sigma_hi);
    const long D = spec.D;
    const double s2 = spec.noise_var;

    GeneratedModel gm;
    Mat delta(spec.K, D);
    for (int k = 0; k < spec.K; ++k)
        for (long j = 0; j < D; ++j) delta(k, j) = gauss(rng);
    double min_d2 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < spec.K; ++a)
        for (int b = a + 1; b < spec.K; ++b) min_d2 = std::min(min_d2, (delta.row(a) - delta.row(b)).squaredNorm());
    double scale = 1.0;
    if (spec.K > 1) {
        // With s^2 = 0 the ratio is undefined; keep unit-scale separation instead.
        double target = s2 > 0.0 ? spec.ratio * s2 : spec.ratio;
        scale = std::sqrt(target / min_d2);
    }
    Mat means = Mat::Constant(spec.K, D, spec.mean_level) + scale * delta;
    Eigen::FullPivLU<Mat> lu(means);
    lu.setThreshold(1e-10);
    if (lu.rank() != spec.K) throw input_error("spec: region means are not linearly independent");

    for (int k = 1; k <= spec.K; ++k) {
        int d = spec.dim_of(k);
        SubspaceFeature f;
        f.mu = means.row(k - 1).transpose();
        Mat G(D, std::max(d, 1));
        for (long r = 0; r < D; ++r)
            for (long c = 0; c < G.cols(); ++c) G(r, c) = gauss(rng);
        Eigen::HouseholderQR<Mat> qr(G);
        Mat Q = qr.householderQ() * Mat::Identity(D, G.cols());
        f.basis = Q.leftCols(d);
        f.sigma2.resize(d);
        for (int j = 0; j < d; ++j) f.sigma2(j) = unif(rng) * s2;
        f.noise_var = s2 > 0.0 ? s2 : 1e-12;
        gm.theta.push_back(f);
    }
    gm.truth = truth_boundaries(spec);
    return gm;
}

GeneratedSequence gen_sequence(const GeneratedModel& model, const SynthSpec& spec) {
    spec.validate();
    const Segmentation& t = model.truth;
    const long D = spec.D;
    if (static_cast<int>(model.theta.size()) != t.K()) throw input_error("gen_sequence: model and truth disagree on K");
    std::mt19937_64 rng(stream_seed(spec.seed, "sequence"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = std::sqrt(spec.noise_var);

    GeneratedSequence out;
    out.truth = t;
    out.labels = labels_from_segmentation(t);
    Mat X(t.N, D);
    const long L = spec.transition_len;
    for (long i = 1; i <= t.N; ++i) {
        int k = out.labels[static_cast<size_t>(i - 1)];
        const auto& f = model.theta[static_cast<size_t>(k - 1)];
        Vec mean = f.mu;
        // Linear cross-fade of the means inside the transition windows.
        for (int b = 1; b < t.K() && L > 0; ++b) {
            long lo = t.tau(b) - L / 2;
            if (i > lo && i <= lo + L) {
                double lam = (static_cast<double>(i - lo) - 0.5) / static_cast<double>(L);
                mean = (1.0 - lam) * model.theta[static_cast<size_t>(b - 1)].mu + lam * model.theta[static_cast<size_t>(b)].mu;
            }
        }
        Vec x = mean;
        for (int j = 0; j < f.dim(); ++j) x += f.basis.col(j) * (std::sqrt(f.sigma2(j)) * gauss(rng));
        for (long d = 0; d < D; ++d) x(d) += s * gauss(rng);
        X.row(i - 1) = x.transpose();
    }
    out.seq.samples = X;
    return out;
}

Layout gen_layout(int K, double area_w, double area_h, long D, std::uint64_t seed) {
    if (K < 1 || D < 1) throw input_error("gen_layout: K and D must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(K) * area_w / area_h))));
    int rows = (K + cols - 1) / cols;
    double cw = area_w / cols, ch = area_h / rows;

    // Cells in snake order: row 0 left to right, row 1 right to left, ...
    std::vector<Point> visit_center, visit_half;
    for (int k = 0; k < K; ++k) {
        int r = k / cols, c = k % cols;
        if (r % 2 == 1) c = cols - 1 - c;
        Point ctr((c + 0.5) * cw, (r + 0.5) * ch);
        ctr.x() += (u01(rng) - 0.5) * 0.4 * cw;
        ctr.y() += (u01(rng) - 0.5) * 0.4 * ch;
        visit_center.push_back(ctr);
        visit_half.push_back(Point(0.5 * cw, 0.5 * ch));
    }
    Layout out;
    out.route.resize(static_cast<size_t>(K));
    std::iota(out.route.begin(), out.route.end(), 1);
    std::shuffle(out.route.begin(), out.route.end(), rng);
    out.centers.resize(static_cast<size_t>(K));
    out.cell_half.resize(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
        out.centers[static_cast<size_t>(out.route[static_cast<size_t>(k)] - 1)] = visit_center[static_cast<size_t>(k)];
        out.cell_half[static_cast<size_t>(out.route[static_cast<size_t>(k)] - 1)] = visit_half[static_cast<size_t>(k)];
    }
    for (long j = 0; j < D; ++j) {
        Point p;
        if (D >= K && j < K) {
            const Point& c = out.centers[static_cast<size_t>(j)];
            const Point& h = out.cell_half[static_cast<size_t>(j)];
            p = Point(c.x() + (2.0 * u01(rng) - 1.0) * 0.5 * h.x(), c.y() + (2.0 * u01(rng) - 1.0) * 0.5 * h.y());
        } else {
            p = Point(u01(rng) * area_w, u01(rng) * area_h);
        }
        out.sensors.positions.push_back(p);
    }
    return out;
}

namespace {

Point walker_position(const Layout& lay, int region, double fill, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Point& c = lay.centers[static_cast<size_t>(region - 1)];
    const Point& h = lay.cell_half[static_cast<size_t>(region - 1)];
    double dx = u(rng), dy = u(rng);
    return Point(c.x() + dx * fill * h.x(), c.y() + dy * fill * h.y());
}

Vec path_loss(const Point& p, const Layout& lay, const Mat& shadow, int region, const SynthSpec& spec) {
    const long D = lay.sensors.D();
    Vec x(D);
    for (long j = 0; j < D; ++j) {
        double dist = std::max(1.0, (p - lay.sensors.positions[static_cast<size_t>(j)]).norm());
        x(j) = spec.ref_db - 10.0 * spec.exponent * std::log10(dist) + shadow(region - 1, j);
    }
    return x;
}

}  // namespace

Dataset gen_dataset(const SynthSpec& spec) {
    spec.validate();
    Dataset ds;
    ds.spec = spec;
    ds.layout = gen_layout(spec.K, spec.area_w, spec.area_h, spec.D, stream_seed(spec.seed, "layout"));
    const int K = spec.K;

    GraphOptions gopt;
    if (spec.anchor_route) gopt.required_route = ds.layout.route;
    int target = spec.edges_target > 0 ? spec.edges_target : 2 * (K - 1);
    if (K > 1) {
        long pairs = static_cast<long>(K) * (K - 1) / 2;
        target = static_cast<int>(std::min<long>(target, pairs));
        ds.graph = random_region_graph(ds.layout.centers, target, stream_seed(spec.seed, "graph"), gopt);
    } else {
        ds.graph.K = 1;
        ds.graph.centers = ds.layout.centers;
    }

    std::mt19937_64 qrng(stream_seed(spec.seed, "queries"));
    std::uniform_int_distribution<int> pick_visit(1, K);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double s = std::sqrt(spec.noise_var);

    if (spec.mode == SynthMode::Model) {
        GeneratedModel gm = gen_model(spec);
        GeneratedSequence gs = gen_sequence(gm, spec);
        ds.seq = gs.seq;
        ds.truth = gs.truth;
        ds.labels = gs.labels;
        ds.theta = gm.theta;
        ds.queries.resize(spec.queries, spec.D);
        for (long q = 0; q < spec.queries; ++q) {
            int k = pick_visit(qrng);
            const auto& f = gm.theta[static_cast<size_t>(k - 1)];
            Vec x = f.mu;
            for (int j = 0; j < f.dim(); ++j) x += f.basis.col(j) * (std::sqrt(f.sigma2(j)) * gauss(qrng));
            for (long d = 0; d < spec.D; ++d) x(d) += s * gauss(qrng);
            ds.queries.row(q) = x.transpose();
            int region = ds.layout.route[static_cast<size_t>(k - 1)];
            ds.query_regions.push_back(region);
            ds.query_positions.push_back(ds.layout.centers[static_cast<size_t>(region - 1)]);
        }
        return ds;
    }

    // Path-loss mode: a walker moves inside each region's cell in visit order.
    ds.truth = truth_boundaries(spec);
    ds.labels = labels_from_segmentation(ds.truth);
    std::mt19937_64 mrng(stream_seed(spec.seed, "model"));
    Mat shadow(K, spec.D);
    for (int r = 0; r < K; ++r)
        for (long j = 0; j < spec.D; ++j) shadow(r, j) = spec.shadow_std * gauss(mrng);
    std::mt19937_64 srng(stream_seed(spec.seed, "sequence"));
    Mat X(spec.N, spec.D);
    const long L = spec.transition_len;
    for (long i = 1; i <= spec.N; ++i) {
        int k = ds.labels[static_cast<size_t>(i - 1)];
        int region = ds.layout.route[static_cast<size_t>(k - 1)];
        Point p = walker_position(ds.layout, region, spec.cell_fill, srng);
        Vec x = path_loss(p, ds.layout, shadow, region, spec);
        for (int b = 1; b < ds.truth.K() && L > 0; ++b) {
            long lo = ds.truth.tau(b) - L / 2;
            if (i > lo && i <= lo + L) {
                double lam = (static_cast<double>(i - lo) - 0.5) / static_cast<double>(L);
                int ra = ds.layout.route[static_cast<size_t>(b - 1)], rb = ds.layout.route[static_cast<size_t>(b)];
                Point pa = ds.layout.centers[static_cast<size_t>(ra - 1)], pb = ds.layout.centers[static_cast<size_t>(rb - 1)];
                Point pm = (1.0 - lam) * pa + lam * pb;
                x = (1.0 - lam) * path_loss(pm, ds.layout, shadow, ra, spec) + lam * path_loss(pm, ds.layout, shadow, rb, spec);
            }
        }
        for (long d = 0; d < spec.D; ++d) x(d) += s * gauss(srng);
        X.row(i - 1) = x.transpose();
    }
    ds.seq.samples = X;
    ds.queries.resize(spec.queries, spec.D);
    for (long q = 0; q < spec.queries; ++q) {
        int k = pick_visit(qrng);
        int region = ds.layout.route[static_cast<size_t>(k - 1)];
        Point p = walker_position(ds.layout, region, spec.cell_fill, qrng);
        Vec x = path_loss(p, ds.layout, shadow, region, spec);
        for (long d = 0; d < spec.D; ++d) x(d) += s * gauss(qrng);
        ds.queries.row(q) = x.transpose();
        ds.query_regions.push_back(region);
        ds.query_positions.push_back(p);
    }
    return ds;
}

}  // namespace radiomap
