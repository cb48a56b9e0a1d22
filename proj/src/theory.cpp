#include "radiomap/theory.hpp"

#include "radiomap/matcher.hpp"
#include "radiomap/proxy.hpp"
#include "radiomap/segmenter.hpp"
#include "radiomap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>

namespace radiomap {

using io::json;

namespace {

template <class T>
T param(const json& p, const char* key, T def) {
    if (!p.contains(key)) return def;
    try {
        return p.at(key).get<T>();
    } catch (const json::exception&) {
        throw input_error(std::string("theory.") + key + ": wrong type");
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double literal_total(const RssSequence& seq, const Segmentation& tau, double beta) {
    double acc = 0.0;
    for (int k = 0; k <= tau.K(); ++k) acc += cost_fk_d0(seq, k, tau, beta);
    return 0.5 * acc;
}

ProxyInstance proxy_from(const GeneratedModel& gm, const SynthSpec& spec) {
    ProxyInstance inst;
    inst.mus = Mat(spec.K, spec.D);
    for (int k = 0; k < spec.K; ++k) inst.mus.row(k) = gm.theta[static_cast<size_t>(k)].mu.transpose();
    inst.t = gm.truth.boundaries;
    inst.N = spec.N;
    inst.noise_var = spec.noise_var;
    return inst;
}

// F(tau) for the cluster (0, N] split at tau, tau in [lo, hi].
std::vector<double> scan_proxy(const ProxyInstance& inst, long lo, long hi, double beta) {
    std::vector<double> F;
    for (long t = lo; t <= hi; ++t) F.push_back(cost_Fk_proxy(inst, 1, Segmentation({t}, inst.N), beta));
    return F;
}

TheoryResult hardening(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-4);
    const int seeds = param(p, "seeds", 10), taus = param(p, "taus", 100);
    const double tol = param(p, "tol", 1e-6);
    SynthSpec spec;
    spec.K = param(p, "K", 3);
    spec.D = param(p, "D", 5L);
    spec.N = param(p, "N", 60L);
    r.columns = {"seed", "max_deviation"};
    double worst = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        spec.seed = static_cast<std::uint64_t>(s);
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        double dev = 0.0;
        for (int q = 0; q < taus; ++q) {
            Segmentation tau = random_init(spec.N, spec.K, 2, stream_seed(spec.seed, "tau" + std::to_string(q)));
            dev = std::max(dev, std::fabs(hardened_objective(gs.seq, tau, beta) - literal_total(gs.seq, tau, beta)));
        }
        worst = std::max(worst, dev);
        r.rows.push_back({static_cast<double>(s), dev});
    }
    r.pass = worst <= tol;
    r.summary = json{{"max_deviation", worst}, {"tol", tol}};
    return r;
}

TheoryResult consistency(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-4);
    const int seeds = param(p, "seeds", 50);
    const double gamma = param(p, "gamma", 0.3), factor = param(p, "factor", 1.5);
    auto Ns = param(p, "N", std::vector<long>{250, 1000, 4000});
    SynthSpec spec;
    spec.K = 2;
    spec.D = param(p, "D", 10L);
    spec.ratio = param(p, "ratio", 0.2);
    spec.fractions = {gamma, 1.0 - gamma};
    r.columns = {"N", "median_abs_error", "ratio_to_previous"};
    bool ok = true;
    double prev = 0.0;
    for (size_t n = 0; n < Ns.size(); ++n) {
        spec.N = Ns[n];
        std::vector<double> err;
        for (int s = 1; s <= seeds; ++s) {
            spec.seed = static_cast<std::uint64_t>(s);
            auto gm = gen_model(spec);
            auto gs = gen_sequence(gm, spec);
            auto cost = make_d0_cost(gs.seq, beta);
            // By unimodality the closed-form minimizer is the true boundary.
            SplitResult sr = optimal_split(*cost, 0, spec.N, 1, 2);
            err.push_back(std::fabs(static_cast<double>(sr.tau - gm.truth.tau(1))) / static_cast<double>(spec.N));
        }
        double med = median(err);
        double ratio = n == 0 ? 0.0 : (med > 0.0 ? prev / med : (prev > 0.0 ? INFINITY : 0.0));
        if (n > 0 && !(ratio >= factor)) ok = false;
        r.rows.push_back({static_cast<double>(spec.N), med, ratio});
        prev = med;
    }
    r.pass = ok;
    r.summary = json{{"factor", factor}};
    return r;
}

// Single-boundary instance with boundary fraction drawn per seed.
SynthSpec single_boundary_spec(const json& p, int s, long N_def) {
    SynthSpec spec;
    spec.K = 2;
    spec.D = param(p, "D", 40L);
    spec.N = param(p, "N", N_def);
    spec.ratio = param(p, "ratio", 2.5);
    spec.seed = static_cast<std::uint64_t>(s);
    std::mt19937_64 rng(stream_seed(spec.seed, "gamma"));
    double g = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    spec.fractions = {g, 1.0 - g};
    return spec;
}

TheoryResult unimodality(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-3);
    const int seeds = param(p, "seeds", 50);
    r.columns = {"seed", "t", "sign_changes", "change_at", "argmin"};
    int bad = 0;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec = single_boundary_spec(p, s, 200);
        auto gm = gen_model(spec);
        ProxyInstance inst = proxy_from(gm, spec);
        const long lo = 1, hi = spec.N - 1;
        auto F = scan_proxy(inst, lo, hi, beta);
        if (s == 1)
            for (size_t i = 0; i < F.size(); ++i) r.curve.emplace_back(lo + static_cast<long>(i), F[i]);
        // dF(tau) = F(tau) - F(tau - 1) for tau in (lo, hi]
        int changes = 0;
        long at = 0;
        int prev_sign = 0;
        bool pattern = true;
        const long t = gm.truth.tau(1);
        for (long tau = lo + 1; tau <= hi; ++tau) {
            double d = F[static_cast<size_t>(tau - lo)] - F[static_cast<size_t>(tau - 1 - lo)];
            int sg = d < 0.0 ? -1 : (d > 0.0 ? 1 : 0);
            if ((tau <= t && sg >= 0) || (tau > t && sg <= 0)) pattern = false;
            if (prev_sign != 0 && sg != prev_sign) {
                ++changes;
                at = tau - 1;
            }
            prev_sign = sg;
        }
        long arg = lo + static_cast<long>(std::min_element(F.begin(), F.end()) - F.begin());
        if (!pattern || changes != 1 || at != t || arg != t) ++bad;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(t), static_cast<double>(changes),
                          static_cast<double>(at), static_cast<double>(arg)});
    }
    r.pass = bad == 0;
    r.summary = json{{"violations", bad}};
    return r;
}

double max_abs_diff(const std::vector<double>& F) {
    double m = 0.0;
    for (size_t i = 1; i < F.size(); ++i) m = std::max(m, std::fabs(F[i] - F[i - 1]));
    return m;
}

TheoryResult flatness(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-4);
    const int seeds = param(p, "seeds", 50);
    const double tol = param(p, "tol", 1e-3);
    r.columns = {"seed", "max_dF_flat", "max_dF_boundary", "ratio"};
    int bad = 0;
    double worst = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec = single_boundary_spec(p, s, 200);
        auto gm = gen_model(spec);
        ProxyInstance with = proxy_from(gm, spec);
        ProxyInstance flat = with;
        flat.mus = with.mus.topRows(1);
        flat.t.clear();
        double a = max_abs_diff(scan_proxy(flat, 1, spec.N - 1, beta));
        double b = max_abs_diff(scan_proxy(with, 1, spec.N - 1, beta));
        double ratio = a / b;
        worst = std::max(worst, ratio);
        if (!(ratio <= tol)) ++bad;
        r.rows.push_back({static_cast<double>(s), a, b, ratio});
    }
    r.pass = bad == 0;
    r.summary = json{{"violations", bad}, {"max_ratio", worst}, {"tol", tol}};
    return r;
}

TheoryResult monotonicity(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-3);
    const int seeds = param(p, "seeds", 50);
    const int J = param(p, "boundaries", 2);
    r.columns = {"seed", "t_first", "t_last", "argmin", "violations"};
    int bad = 0;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec;
        spec.K = J + 1;
        spec.D = param(p, "D", 40L);
        spec.N = param(p, "N", 300L);
        spec.ratio = param(p, "ratio", 2.5);
        spec.seed = static_cast<std::uint64_t>(s);
        std::mt19937_64 rng(stream_seed(spec.seed, "fractions"));
        std::uniform_real_distribution<double> u(0.5, 1.5);
        double tot = 0.0;
        for (int k = 0; k < spec.K; ++k) tot += spec.fractions.emplace_back(u(rng));
        for (double& f : spec.fractions) f /= tot;
        // Renormalize the last entry so the fractions sum to 1 exactly.
        double head = 0.0;
        for (int k = 0; k + 1 < spec.K; ++k) head += spec.fractions[static_cast<size_t>(k)];
        spec.fractions.back() = 1.0 - head;
        auto gm = gen_model(spec);
        ProxyInstance inst = proxy_from(gm, spec);
        const long lo = 1, hi = spec.N - 1;
        auto F = scan_proxy(inst, lo, hi, beta);
        if (s == 1)
            for (size_t i = 0; i < F.size(); ++i) r.curve.emplace_back(lo + static_cast<long>(i), F[i]);
        const long t1 = gm.truth.tau(1), tJ = gm.truth.tau(J);
        int viol = 0;
        for (long tau = lo + 1; tau <= hi; ++tau) {
            double d = F[static_cast<size_t>(tau - lo)] - F[static_cast<size_t>(tau - 1 - lo)];
            if (tau <= t1 && !(d < 0.0)) ++viol;
            if (tau > tJ && !(d > 0.0)) ++viol;
        }
        long arg = lo + static_cast<long>(std::min_element(F.begin(), F.end()) - F.begin());
        if (arg < t1 || arg > tJ) ++viol;
        if (viol) ++bad;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(t1), static_cast<double>(tJ),
                          static_cast<double>(arg), static_cast<double>(viol)});
    }
    r.pass = bad == 0;
    r.summary = json{{"violations", bad}};
    return r;
}

// Best proxy gain from splitting (a, b]: unsplit minus the minimal split cost.
double proxy_gain(const ProxyInstance& inst, long a, long b, double beta) {
    double best = INFINITY;
    for (long t = a + 1; t < b; ++t) {
        std::vector<long> bnd;
        if (a > 0) bnd.push_back(a);
        bnd.push_back(t);
        if (b < inst.N) bnd.push_back(b);
        int k = a > 0 ? 2 : 1;
        best = std::min(best, cost_Fk_proxy(inst, k, Segmentation(bnd, inst.N), beta));
    }
    return proxy_unsplit(inst, a, b) - best;
}

TheoryResult cost_reduction(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-3);
    const int seeds = param(p, "seeds", 50);
    r.columns = {"seed", "t", "m", "gain_with_boundary", "gain_without"};
    int bad = 0;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec = single_boundary_spec(p, s, 200);
        auto gm = gen_model(spec);
        ProxyInstance inst = proxy_from(gm, spec);
        const long t = gm.truth.tau(1);
        // Cluster (0, m] holds the boundary; (m, N] holds none.
        long m = t + (spec.N - t) / 2;
        double ga = proxy_gain(inst, 0, m, beta), gb = proxy_gain(inst, m, spec.N, beta);
        if (!(ga > gb)) ++bad;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(t), static_cast<double>(m), ga, gb});
    }
    r.pass = bad == 0;
    r.summary = json{{"violations", bad}};
    return r;
}

TheoryResult optimality(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-3);
    const int seeds = param(p, "seeds", 50);
    const long Nmax = param(p, "N", 40L);
    const int Kmax = param(p, "K", 3);
    r.columns = {"seed", "K", "N", "alg1_cost", "exhaustive_min", "rel_diff"};
    int bad = 0;
    double worst = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec;
        std::mt19937_64 rng(stream_seed(static_cast<std::uint64_t>(s), "optimality"));
        spec.K = std::uniform_int_distribution<int>(2, Kmax)(rng);
        spec.N = std::uniform_int_distribution<long>(std::min(Nmax, 4L * spec.K), Nmax)(rng);
        spec.D = param(p, "D", 5L);
        spec.ratio = param(p, "ratio", 2.5);
        spec.seed = static_cast<std::uint64_t>(s);
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        SegmenterConfig cfg;
        cfg.K = spec.K;
        cfg.beta = beta;
        cfg.dims = DimPolicy::fixed(0, spec.K);
        auto res = run_alg1(gs.seq, cfg);
        double got = literal_total(gs.seq, res.tau, beta);
        // Enumerate every segmentation with segments of at least two samples.
        double best = INFINITY;
        std::vector<long> b(static_cast<size_t>(spec.K - 1));
        std::function<void(int, long)> rec = [&](int idx, long start) {
            if (idx == spec.K - 1) {
                if (spec.N - (idx ? b[static_cast<size_t>(idx - 1)] : 0) < 2) return;
                best = std::min(best, literal_total(gs.seq, Segmentation(b, spec.N), beta));
                return;
            }
            for (long v = start; v <= spec.N - 2 * (spec.K - 1 - idx); ++v) {
                b[static_cast<size_t>(idx)] = v;
                rec(idx + 1, v + 2);
            }
        };
        rec(0, 2);
        double rel = std::fabs(got - best) / std::max(1e-300, std::fabs(best));
        worst = std::max(worst, rel);
        if (rel > 1e-9) ++bad;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(spec.K), static_cast<double>(spec.N), got, best, rel});
    }
    r.pass = bad == 0;
    r.summary = json{{"mismatches", bad}, {"max_rel_diff", worst}};
    return r;
}

TheoryResult theorem1(const json& p) {
    TheoryResult r;
    const double beta = param(p, "beta", 1e-3);
    const int seeds = param(p, "seeds", 100);
    r.columns = {"seed", "K", "N", "exact"};
    int hits = 0;
    for (int s = 1; s <= seeds; ++s) {
        std::mt19937_64 rng(stream_seed(static_cast<std::uint64_t>(s), "theorem1"));
        SynthSpec spec;
        spec.K = std::uniform_int_distribution<int>(2, 6)(rng);
        spec.N = std::uniform_int_distribution<long>(60, 600)(rng);
        spec.D = param(p, "D", 10L);
        spec.noise_var = 0.0;
        spec.seed = static_cast<std::uint64_t>(s);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        double tot = 0.0;
        for (int k = 0; k < spec.K; ++k) tot += spec.fractions.emplace_back(u(rng));
        double head = 0.0;
        for (int k = 0; k + 1 < spec.K; ++k) head += (spec.fractions[static_cast<size_t>(k)] /= tot);
        spec.fractions.back() = 1.0 - head;
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        SegmenterConfig cfg;
        cfg.K = spec.K;
        cfg.beta = beta;
        cfg.dims = DimPolicy::fixed(0, spec.K);
        bool exact = run_alg1(gs.seq, cfg).tau == gm.truth;
        hits += exact;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(spec.K), static_cast<double>(spec.N),
                          exact ? 1.0 : 0.0});
    }
    r.pass = hits == seeds;
    r.summary = json{{"exact", hits}, {"seeds", seeds}};
    return r;
}

TheoryResult matching(const json& p) {
    TheoryResult r;
    const int seeds = param(p, "seeds", 100);
    const int Kmax = param(p, "K", 7);
    const double noise = param(p, "centroid_noise", 2.0);
    r.columns = {"seed", "K", "edges", "viterbi_cost", "brute_cost", "equal"};
    int bad = 0;
    for (int s = 1; s <= seeds; ++s) {
        std::mt19937_64 rng(stream_seed(static_cast<std::uint64_t>(s), "matching"));
        int K = std::uniform_int_distribution<int>(2, Kmax)(rng);
        Layout lay = gen_layout(K, 30.0, 16.0, K, stream_seed(static_cast<std::uint64_t>(s), "layout"));
        int target = std::min(2 * (K - 1), K * (K - 1) / 2);
        GraphOptions opt;
        opt.required_route = lay.route;
        RegionGraph g = random_region_graph(lay.centers, target, stream_seed(static_cast<std::uint64_t>(s), "graph"), opt);
        std::normal_distribution<double> gauss(0.0, noise);
        std::vector<Point> cent;
        for (int k = 0; k < K; ++k) {
            Point c = lay.centers[static_cast<size_t>(lay.route[static_cast<size_t>(k)] - 1)];
            cent.emplace_back(c.x() + gauss(rng), c.y() + gauss(rng));
        }
        RouteMatch v = viterbi_match(cent, g), b = brute_force_match(cent, g);
        bool eq = v.feasible == b.feasible && v.cost == b.cost;
        if (!eq) ++bad;
        r.rows.push_back({static_cast<double>(s), static_cast<double>(K), static_cast<double>(g.edges.size()), v.cost,
                          b.cost, eq ? 1.0 : 0.0});
    }
    r.pass = bad == 0;
    r.summary = json{{"mismatches", bad}};
    return r;
}

const std::map<std::string, std::function<TheoryResult(const json&)>>& registry() {
    static const std::map<std::string, std::function<TheoryResult(const json&)>> reg = {
        {"hardening", hardening},   {"consistency", consistency},       {"unimodality", unimodality},
        {"flatness", flatness},     {"monotonicity", monotonicity},     {"cost_reduction", cost_reduction},
        {"optimality", optimality}, {"theorem1", theorem1},             {"matching", matching}};
    return reg;
}

}  // namespace

const std::vector<std::string>& theory_checks() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

TheoryResult run_theory(const std::string& name, const json& params) {
    auto it = registry().find(name);
    if (it == registry().end()) throw input_error("theory: unknown check '" + name + "'");
    if (!params.is_object()) throw input_error("theory: params must be a JSON object");
    TheoryResult r = it->second(params);
    r.name = name;
    return r;
}

std::string theory_table_csv(const TheoryResult& r) {
    std::string out;
    for (size_t c = 0; c < r.columns.size(); ++c) out += (c ? "," : "") + r.columns[c];
    out += "\n";
    char buf[40];
    for (const auto& row : r.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", row[c]);
            out += (c ? "," : "") + std::string(buf);
        }
        out += "\n";
    }
    return out;
}

}  // namespace radiomap
