// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include "helpers.hpp"
#include "radiomap/io.hpp"
#include "radiomap/metrics.hpp"
#include "radiomap/pipeline.hpp"
#include "radiomap/segmenter.hpp"
#include "radiomap/subspace.hpp"
#include "radiomap/synth.hpp"
#include "radiomap/theory.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace radiomap;
using io::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double literal_total(const RssSequence& seq, const Segmentation& tau, double beta) {
    double acc = 0.0;
    for (int k = 0; k <= tau.K(); ++k) acc += cost_fk_d0(seq, k, tau, beta);
    return 0.5 * acc;
}

double critical_residual(const WeightedStats& st, const SubspaceFeature& f) {
    const long D = f.D();
    if (f.dim() == 0) return 0.0;
    Mat W = f.basis * f.sigma2.cwiseSqrt().asDiagonal();
    Mat C = f.noise_var * Mat::Identity(D, D) + W * W.transpose();
    Mat lhs = st.cov * C.inverse() * W;
    return (lhs - W).norm() / std::max(1.0, W.norm());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Noiseless d = 0 data: exact recovery of every boundary.
void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    TheoryResult r = run_theory("theorem1", json{{"seeds", 100}, {"beta", 1e-3}, {"D", 10}});
    double secs = seconds_since(t0);
    int exact = r.summary["exact"].get<int>();
    report(1, exact == 100 && secs <= 60.0, fmt("exact %.0f/100, K in 2..6, N in 60..600, %.2f s (limit 60 s)", exact, secs));
}

// 2. D=40, K=10, N=2000, ratio 2.5: both algorithms and random initialization reach E_0.003 = 0.
void criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    int ok1 = 0, ok2 = 0, okr = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SynthSpec spec;
        spec.K = 10;
        spec.D = 40;
        spec.N = 2000;
        spec.ratio = 2.5;
        spec.seed = seed;
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        SegmenterConfig cfg;
        cfg.K = 10;
        cfg.beta = 1e-3;
        cfg.dims = DimPolicy::fixed(0, 10);
        ok1 += epsilon_error(run_alg1(gs.seq, cfg).tau, gm.truth, 0.003) == 0.0;
        SegmenterConfig c2 = cfg;
        c2.dims = DimPolicy{};
        ok2 += epsilon_error(run_alg2(gs.seq, c2).tau, gm.truth, 0.003) == 0.0;
        SegmenterConfig cr = cfg;
        cr.random_init = true;
        cr.seed = 1000 + seed;
        okr += epsilon_error(run_alg1(gs.seq, cr).tau, gm.truth, 0.003) == 0.0;
    }
    double secs = seconds_since(t0);
    report(2, ok1 >= 19 && ok2 >= 19 && okr >= 19 && secs <= 300.0,
           fmt("E_0.003=0: alg1 %.0f/20, alg2 %.0f/20, random init %.0f/20 (need 19), %.1f s", ok1, ok2, okr, secs));
}

void theory_criterion(int n, const std::string& name, const json& params, const std::string& what) {
    TheoryResult r = run_theory(name, params);
    report(n, r.pass, what + " " + r.summary.dump());
}

// 7. Algorithm 1 equals the exhaustive minimum of the literal cost.
void criterion7() {
    int equal = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 rng(stream_seed(seed, "acceptance7"));
        SynthSpec spec;
        spec.K = std::uniform_int_distribution<int>(2, 3)(rng);
        spec.N = std::uniform_int_distribution<long>(12, 40)(rng);
        spec.D = 5;
        spec.ratio = 2.5;
        spec.seed = seed;
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        SegmenterConfig cfg;
        cfg.K = spec.K;
        cfg.beta = 1e-3;
        cfg.dims = DimPolicy::fixed(0, spec.K);
        double got = literal_total(gs.seq, run_alg1(gs.seq, cfg).tau, 1e-3);
        double best = INFINITY;
        testutil::for_each_segmentation(spec.N, spec.K, 2, [&](const std::vector<long>& b) {
            best = std::min(best, literal_total(gs.seq, Segmentation(b, spec.N), 1e-3));
        });
        ++total;
        equal += got == best;
    }
    report(7, equal == total, fmt("alg1 cost == exhaustive minimum (bitwise) on %.0f/%.0f instances, N<=40, K<=3", equal, total));
}

// 8. Viterbi equals brute force; sparser graphs give lower matching error on the 10-region layout.
void criterion8() {
    TheoryResult r = run_theory("matching", json{{"seeds", 100}, {"K", 7}});
    double sum18 = 0.0, sum27 = 0.0;
    const int seeds = 200;
    for (int s = 1; s <= seeds; ++s) {
        SynthSpec spec;
        spec.K = 10;
        spec.D = 21;
        spec.N = 2000;
        spec.mode = SynthMode::PathLoss;
        spec.noise_var = 4.0;
        spec.seed = static_cast<std::uint64_t>(s);
        Dataset ds = gen_dataset(spec);
        std::vector<Point> cent;
        for (int k = 1; k <= spec.K; ++k)
            cent.push_back(wcl_centroid(ds.seq, ds.truth.tau(k - 1), ds.truth.tau(k), ds.layout.sensors, 1.0));
        GraphOptions opt;
        opt.required_route = ds.layout.route;
        for (int edges : {18, 27}) {
            RegionGraph g = random_region_graph(ds.layout.centers, edges, stream_seed(spec.seed, "acceptance8"), opt);
            RouteMatch m = viterbi_match(cent, g);
            double e = m.feasible ? matching_error(m.pi, ds.layout.route) : 1.0;
            (edges == 18 ? sum18 : sum27) += e;
        }
    }
    double m18 = sum18 / seeds, m27 = sum27 / seeds;
    report(8, r.pass && m18 <= m27,
           "viterbi==brute " + r.summary.dump() + fmt(", mean E_m |E|=18: %.4f, |E|=27: %.4f (200 seeds)", m18, m27));
}

// 9. ML subspace fit: critical-point residual and the eigenvector-subset oracle.
void criterion9() {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    int oracle_ok = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const long D = 5;
        const int d = 2;
        Mat A(D, D);
        for (long r = 0; r < D; ++r)
            for (long c = 0; c < D; ++c) A(r, c) = g(rng);
        WeightedStats st{Vec::Zero(D), A * A.transpose() / 5.0 + 0.1 * Mat::Identity(D, D), 1.0};
        SubspaceFeature f = fit_subspace(st, d);
        worst = std::max(worst, critical_residual(st, f));
        EigenSystem es = sorted_eigen(st.cov);
        double best = -INFINITY;
        std::vector<int> arg;
        std::vector<bool> mask(D, false);
        std::fill(mask.begin(), mask.begin() + d, true);
        do {
            std::vector<int> sel;
            double tail = 0.0;
            for (long j = 0; j < D; ++j)
                if (mask[static_cast<size_t>(j)]) sel.push_back(static_cast<int>(j));
                else tail += es.values(j);
            double s2 = tail / static_cast<double>(D - d);
            Mat C = s2 * Mat::Identity(D, D);
            bool admissible = true;
            for (int j : sel) {
                double l = es.values(j) - s2;
                admissible &= l >= 0.0;
                C += l * es.vectors.col(j) * es.vectors.col(j).transpose();
            }
            if (!admissible) continue;
            Eigen::LLT<Mat> llt(C);
            double v = -(2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() + llt.solve(st.cov).trace());
            if (v > best) {
                best = v;
                arg = sel;
            }
        } while (std::prev_permutation(mask.begin(), mask.end()));
        bool same_noise = std::fabs(f.noise_var - (es.values(2) + es.values(3) + es.values(4)) / 3.0) <= 1e-12;
        oracle_ok += (arg == std::vector<int>{0, 1}) && same_noise;
    }
    // Fits on windowed statistics of generated sequences.
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SynthSpec spec;
        spec.K = 4;
        spec.D = 10;
        spec.N = 800;
        spec.dim = static_cast<int>(seed % 4);
        spec.seed = seed;
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        WindowParams win{1e-3, WindowMode::Smooth};
        for (int k = 1; k <= 4; ++k) {
            WeightedStats st = weighted_stats(gs.seq, k, gm.truth, win);
            worst = std::max(worst, critical_residual(st, fit_subspace(st, 3)));
        }
    }
    report(9, worst <= 1e-6 && oracle_ok == 50,
           fmt("max critical-point residual %.2e (limit 1e-6), subset oracle %.0f/50 (D=5, d=2)", worst, oracle_ok));
}

// 10. Subspace recovery at N/K = 500 with true boundaries.
void criterion10() {
    double sum = 0.0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SynthSpec spec;
        spec.K = 5;
        spec.D = 10;
        spec.N = 2500;
        spec.dim = 2;
        spec.ratio = 2.5;
        spec.seed = seed;
        auto gm = gen_model(spec);
        auto gs = gen_sequence(gm, spec);
        ModelParams fit = fit_all(gs.seq, gm.truth, DimPolicy::fixed(2, 5), WindowParams{1e-3, WindowMode::Smooth});
        for (int k = 0; k < 5; ++k) {
            sum += subspace_similarity(fit[static_cast<size_t>(k)], gm.theta[static_cast<size_t>(k)]);
            ++n;
        }
    }
    double mean = sum / n;
    report(10, mean >= 0.95, fmt("mean subspace similarity %.4f over %.0f fits (need >= 0.95), D=10, d=2, N/K=500", mean, n));
}

// 11. Path-loss benchmark: region localization error of the map vs MR and WCL.
void criterion11() {
    fs::path root = fs::temp_directory_path() / "radiomap_acceptance11";
    double prop = 0.0, mr = 0.0, wcl = 0.0;
    int used = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        fs::remove_all(root);
        SynthSpec spec;
        spec.K = 10;
        spec.D = 21;
        spec.N = 2000;
        spec.mode = SynthMode::PathLoss;
        spec.noise_var = 4.0;
        spec.queries = 200;
        spec.seed = seed;
        cmd_generate(spec, root.string());
        PipelineConfig cfg;
        cmd_build(root.string(), root.string(), cfg);
        std::ostringstream notes;
        cmd_evaluate(root.string(), (root / "radiomap.json").string(), "", (root / "report.json").string(), cfg, notes);
        json rep = io::read_json((root / "report.json").string());
        if (!rep.contains("localization")) continue;
        prop += rep["localization"]["proposed"].get<double>();
        mr += rep["localization"]["mr"].get<double>();
        wcl += rep["localization"]["wcl"].get<double>();
        ++used;
    }
    fs::remove_all(root);
    bool ok = used == 20 && prop <= wcl && prop <= mr;
    report(11, ok, fmt("mean region error over %.0f seeds: proposed %.3f m, WCL %.3f m, MR %.3f m", used, prop / std::max(used, 1),
                       wcl / std::max(used, 1), mr / std::max(used, 1)));
}

// 12. Byte-identical outputs on rerun for generate, build, localize, and evaluate.
void criterion12() {
    fs::path root = fs::temp_directory_path() / "radiomap_acceptance12";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream(root / "spec.json") << R"({"K": 5, "D": 12, "N": 600, "mode": "pathloss", "queries": 30, "seed": 8})";
    }
    const std::string cli = RADIOMAP_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
        int st = std::system(cmd.c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    };
    bool ok = true;
    std::vector<std::string> compared;
    for (const char* run_id : {"a", "b"}) {
        fs::path d = root / run_id;
        ok &= run("generate --spec " + (root / "spec.json").string() + " --out " + d.string()) == 0;
        ok &= run("build --dataset " + d.string()) == 0;
        ok &= run("localize --map " + (d / "radiomap.json").string() + " --queries " + (d / "queries.csv").string() + " --out " +
                  (d / "assignments.csv").string()) == 0;
        ok &= run("evaluate --dataset " + d.string() + " --map " + (d / "radiomap.json").string() + " --assignments " +
                  (d / "assignments.csv").string() + " --out " + (d / "report.json").string()) == 0;
    }
    for (const auto& e : fs::directory_iterator(root / "a")) {
        std::string name = e.path().filename().string();
        bool same = slurp(e.path()) == slurp(root / "b" / name);
        ok &= same;
        compared.push_back(name + (same ? "" : "(differs)"));
    }
    fs::remove_all(root);
    std::string list;
    for (const auto& c : compared) list += (list.empty() ? "" : " ") + c;
    report(12, ok && compared.size() >= 9, "identical reruns of generate/build/localize/evaluate: " + list);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    theory_criterion(3, "unimodality", json{{"seeds", 50}, {"beta", 1e-3}},
                     "single sign change at t_j, 50 seeds, beta=1e-3:");
    theory_criterion(4, "flatness", json{{"seeds", 50}, {"beta", 1e-4}, {"tol", 1e-3}},
                     "max|dF| flat / max|dF| boundary <= 1e-3, 50 seeds, beta=1e-4:");
    theory_criterion(5, "hardening", json{{"seeds", 10}, {"taus", 100}, {"beta", 1e-4}, {"tol", 1e-6}},
                     "|f~ - (1/2) sum f_k| <= 1e-6, 10 seeds x 100 tau, beta=1e-4:");
    theory_criterion(6, "consistency", json{{"seeds", 50}, {"N", {250, 1000, 4000}}, {"factor", 1.5}},
                     "median |gamma_hat - gamma*| shrinks by >= 1.5 per step, 50 seeds:");
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
