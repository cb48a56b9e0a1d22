#include "radiomap/pipeline.hpp"

#include "radiomap/localizer.hpp"
#include "radiomap/metrics.hpp"
#include "radiomap/model.hpp"
#include "radiomap/segmenter.hpp"
#include "radiomap/subspace.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

namespace radiomap {

namespace fs = std::filesystem;
using io::json;

json PipelineConfig::to_json() const {
    return json{{"beta", beta},       {"max_iters", max_iters}, {"random_init", random_init}, {"seed", seed},
                {"energy", energy},   {"d_max", d_max},         {"dims", dims},               {"d0", d0},
                {"wcl_alpha", wcl_alpha}, {"jobs", jobs},       {"eps", eps},                 {"nmi", nmi}};
}

void PipelineConfig::overlay(const json& j) {
    if (!j.is_object()) throw input_error("config: expected a JSON object");
    const std::set<std::string> known = {"beta", "max_iters", "random_init", "seed", "energy", "d_max",
                                         "dims", "d0",        "wcl_alpha",   "jobs", "eps",    "nmi"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw input_error("config." + it.key() + ": unknown field");
    auto opt = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        try {
            dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        } catch (const json::exception&) {
            throw input_error(std::string("config.") + key + ": wrong type");
        }
    };
    // Validate on a copy so a rejected overlay leaves *this untouched.
    PipelineConfig c = *this;
    opt("beta", c.beta);
    opt("max_iters", c.max_iters);
    opt("random_init", c.random_init);
    opt("seed", c.seed);
    opt("energy", c.energy);
    opt("d_max", c.d_max);
    opt("dims", c.dims);
    opt("d0", c.d0);
    opt("wcl_alpha", c.wcl_alpha);
    opt("jobs", c.jobs);
    opt("eps", c.eps);
    opt("nmi", c.nmi);
    if (!(c.beta > 0.0)) throw input_error("config.beta: must be positive");
    if (c.max_iters < 1) throw input_error("config.max_iters: must be at least 1");
    if (!(c.energy > 0.0 && c.energy <= 1.0)) throw input_error("config.energy: must lie in (0, 1]");
    if (c.d_max < 0) throw input_error("config.d_max: must be nonnegative");
    if (c.jobs < 1) throw input_error("config.jobs: must be at least 1");
    if (!(c.wcl_alpha > 0.0)) throw input_error("config.wcl_alpha: must be positive");
    if (!(c.eps >= 0.0)) throw input_error("config.eps: must be nonnegative");
    if (c.nmi != "geometric" && c.nmi != "arithmetic") throw input_error("config.nmi: expected geometric or arithmetic");
    *this = std::move(c);
}

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("RADIOMAP_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    unsigned long long s = std::strtoull(v, &end, 10);
    if (*end != '\0') throw input_error("RADIOMAP_SEED: expected an unsigned integer");
    return static_cast<std::uint64_t>(s);
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw input_error("cannot create directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json header(const std::string& hash) { return json{{"schema_version", io::kSchemaVersion}, {"config_hash", hash}}; }

}  // namespace

void cmd_generate(const SynthSpec& spec, const std::string& out_dir) {
    spec.validate();
    Dataset ds = gen_dataset(spec);
    ensure_dir(out_dir);
    json sj = io::to_json(spec);
    std::string hash = io::config_hash(sj);

    io::write_text(join(out_dir, "measurements.csv"), io::measurements_csv(ds.seq.samples));

    json sensors = header(hash);
    sensors.update(io::to_json(ds.layout.sensors));
    io::write_json(join(out_dir, "sensors.json"), sensors);

    json regions = header(hash);
    regions["K"] = spec.K;
    regions["centers"] = io::points_json(ds.layout.centers);
    regions["cell_half"] = io::points_json(ds.layout.cell_half);
    io::write_json(join(out_dir, "regions.json"), regions);

    json graph = header(hash);
    graph.update(io::to_json(ds.graph));
    io::write_json(join(out_dir, "graph.json"), graph);

    json truth = header(hash);
    truth["spec"] = sj;
    truth["N"] = spec.N;
    truth["boundaries"] = ds.truth.boundaries;
    truth["labels"] = ds.labels;
    truth["route"] = ds.layout.route;
    truth["query_regions"] = ds.query_regions;
    truth["query_positions"] = io::points_json(ds.query_positions);
    if (!ds.theta.empty()) {
        json th = json::array();
        for (const auto& f : ds.theta) th.push_back(io::to_json(f));
        truth["theta"] = th;
    }
    io::write_json(join(out_dir, "truth.json"), truth);

    if (spec.queries > 0) io::write_text(join(out_dir, "queries.csv"), io::measurements_csv(ds.queries));
}

Bundle read_bundle(const std::string& dir) {
    Bundle b;
    Mat X = io::read_measurements_csv(join(dir, "measurements.csv"));
    if (X.rows() == 0) throw input_error("measurements.csv: no samples");
    if (!X.allFinite()) throw quality_error("measurements.csv: non-finite values");
    b.seq = RssSequence(X);
    json sensors = io::read_json(join(dir, "sensors.json"));
    b.sensors = io::sensors_from_json(sensors);
    if (b.sensors.D() != b.seq.D()) throw input_error("sensors.json: sensor count differs from measurement columns");
    json regions = io::read_json(join(dir, "regions.json"));
    b.centers = io::points_from_json(io::field(regions, "centers", "regions"), "regions.centers");
    b.graph = io::graph_from_json(io::read_json(join(dir, "graph.json")));
    if (b.graph.K != static_cast<int>(b.centers.size())) throw input_error("graph.json: K differs from regions.json");
    if (fs::exists(join(dir, "truth.json"))) b.truth = io::read_json(join(dir, "truth.json"));
    b.dataset_hash = sensors.value("config_hash", std::string());
    return b;
}

int cmd_build(const std::string& dataset_dir, const std::string& out_dir, const PipelineConfig& cfg) {
    Bundle b = read_bundle(dataset_dir);
    const int K = b.graph.K;
    if (K < 2) throw input_error("build: need at least two regions");

    SegmenterConfig sc;
    sc.K = K;
    sc.beta = cfg.beta;
    sc.max_iters = cfg.max_iters;
    sc.random_init = cfg.random_init;
    sc.seed = cfg.seed;
    sc.jobs = cfg.jobs;
    sc.dims = DimPolicy{};
    sc.dims.energy = cfg.energy;
    sc.dims.d_max = cfg.d_max;
    if (!cfg.dims.empty()) {
        if (static_cast<int>(cfg.dims.size()) != K) throw input_error("config.dims: need one entry per region");
        sc.dims.explicit_dims = cfg.dims;
    }
    if (b.seq.N() < K * sc.min_seg_len()) throw input_error("build: too few samples for K regions");

    Segmentation tau;
    ModelParams theta;
    SegmentationTrace trace;
    WindowParams win{cfg.beta, WindowMode::Smooth};
    if (cfg.d0) {
        auto r = run_alg1(b.seq, sc);
        tau = r.tau;
        trace = r.trace;
        theta = fit_all(b.seq, tau, sc.dims, win);
    } else {
        auto r = run_alg2(b.seq, sc);
        tau = r.tau;
        theta = r.theta;
        trace = r.trace;
    }

    std::vector<Point> centroids;
    for (int k = 1; k <= K; ++k)
        centroids.push_back(wcl_centroid(b.seq, tau.tau(k - 1), tau.tau(k), b.sensors, cfg.wcl_alpha));
    RouteMatch m = viterbi_match(centroids, b.graph);

    json cj = cfg.to_json();
    cj.erase("eps");
    cj.erase("nmi");
    cj.erase("jobs");  // worker count does not change results
    RadioMap map;
    map.features = theta;
    if (m.feasible) map.region_ids = m.pi;
    map.config_hash = io::config_hash(json{{"config", cj}, {"dataset", b.dataset_hash}});
    map.seed = cfg.seed;

    json out = io::radiomap_json(map);
    out["config"] = cj;
    out["N"] = b.seq.N();
    out["boundaries"] = tau.boundaries;
    out["centroids"] = io::points_json(centroids);
    out["route"] = io::to_json(m);
    ensure_dir(out_dir);
    io::write_json(join(out_dir, "radiomap.json"), out);
    io::write_text(join(out_dir, "trace.csv"), io::trace_csv(trace));
    return m.feasible ? 0 : static_cast<int>(ErrorKind::Infeasible);
}

int cmd_localize(const std::string& radiomap_path, const std::string& queries_path, const std::string& out_path) {
    RadioMap map = io::radiomap_from_json(io::read_json(radiomap_path));
    Mat Q = io::read_measurements_csv(queries_path);
    const long D = map.features.front().D();
    if (Q.rows() > 0 && Q.cols() != D)
        throw input_error("queries: " + std::to_string(Q.cols()) + " columns but the map has D = " + std::to_string(D));
    std::string out = "q,region,r1,ll1,r2,ll2,r3,ll3,status\n";
    bool flagged = false;
    for (long q = 0; q < Q.rows(); ++q) {
        Vec x = Q.row(q).transpose();
        out += std::to_string(q + 1);
        if (!x.allFinite()) {
            flagged = true;
            out += ",,,,,,,,nonfinite\n";
            continue;
        }
        auto ranked = rank_regions(x, map);
        out += "," + std::to_string(ranked.front().region);
        for (size_t r = 0; r < 3; ++r) {
            if (r < ranked.size())
                out += "," + std::to_string(ranked[r].region) + "," + io::format_num(ranked[r].loglik);
            else
                out += ",,";
        }
        out += ",ok\n";
    }
    io::write_text(out_path, out);
    return flagged ? static_cast<int>(ErrorKind::DataQuality) : 0;
}

namespace {

// Region ids from assignments.csv rows; 0 marks a flagged row.
std::vector<int> read_assignments(const std::string& path) {
    std::string text = io::read_text(path);
    std::vector<int> out;
    size_t pos = text.find('\n');
    if (pos == std::string::npos) return out;
    while (pos + 1 < text.size()) {
        size_t next = text.find('\n', pos + 1);
        std::string line = text.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
        pos = next == std::string::npos ? text.size() : next;
        if (line.empty()) continue;
        size_t c1 = line.find(','), c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) throw input_error("assignments.csv: malformed row");
        std::string cell = line.substr(c1 + 1, c2 - c1 - 1);
        out.push_back(cell.empty() ? 0 : std::stoi(cell));
    }
    return out;
}

}  // namespace

void cmd_evaluate(const std::string& dataset_dir, const std::string& radiomap_path, const std::string& assignments_path,
                  const std::string& out_path, const PipelineConfig& cfg, std::ostream& notices) {
    Bundle b = read_bundle(dataset_dir);
    json mj = io::read_json(radiomap_path);
    RadioMap map = io::radiomap_from_json(mj);
    Segmentation tau(io::field(mj, "boundaries", "radiomap").get<std::vector<long>>(), b.seq.N());
    tau.validate();

    json rep = header(io::config_hash(json{{"eps", cfg.eps}, {"nmi", cfg.nmi}, {"wcl_alpha", cfg.wcl_alpha},
                                           {"map", map.config_hash}, {"dataset", b.dataset_hash}}));
    rep["epsilon"] = cfg.eps;
    json notes = json::array();
    auto notice = [&](const std::string& s) {
        notes.push_back(s);
        notices << "notice: " << s << "\n";
    };

    if (!b.truth) {
        notice("truth.json not found; clustering, E_eps, E_m and localization metrics omitted");
        rep["notices"] = notes;
        io::write_json(out_path, rep);
        return;
    }
    const json& t = *b.truth;
    Segmentation truth(io::field(t, "boundaries", "truth").get<std::vector<long>>(), b.seq.N());
    truth.validate();
    if (truth.K() != tau.K()) throw input_error("evaluate: map and truth disagree on K");
    auto pred = labels_from_segmentation(tau);
    auto lab = io::field(t, "labels", "truth").get<std::vector<int>>();
    PairScores ps = pairwise_scores(pred, lab);
    rep["clustering"] = json{{"acc", clustering_accuracy(pred, lab)},
                             {"nmi", nmi(pred, lab, cfg.nmi == "arithmetic" ? NmiNorm::Arithmetic : NmiNorm::Geometric)},
                             {"f1", ps.f1},
                             {"ari", ps.ari},
                             {"precision", ps.precision}};
    rep["E_eps"] = epsilon_error(tau, truth, cfg.eps);

    auto route = io::field(t, "route", "truth").get<std::vector<int>>();
    if (map.region_ids)
        rep["E_m"] = matching_error(*map.region_ids, route);
    else
        notice("radio map has no region ids (matching infeasible); E_m omitted");

    auto qreg = t.value("query_regions", std::vector<int>{});
    std::string qpath = join(dataset_dir, "queries.csv");
    if (qreg.empty() || !fs::exists(qpath)) {
        notice("no queries in the dataset; localization errors omitted");
    } else if (!map.region_ids) {
        notice("radio map has no region ids; localization errors omitted");
    } else {
        Mat Q = io::read_measurements_csv(qpath);
        if (Q.rows() != static_cast<long>(qreg.size())) throw input_error("queries.csv: row count differs from truth");
        std::vector<int> est;
        if (!assignments_path.empty()) {
            est = read_assignments(assignments_path);
            if (est.size() != qreg.size()) throw input_error("assignments: row count differs from queries");
        } else {
            for (long q = 0; q < Q.rows(); ++q) {
                Vec x = Q.row(q).transpose();
                est.push_back(x.allFinite() ? assign_region(x, map) : 0);
            }
        }
        std::vector<std::pair<int, int>> prop, mr, wcl;
        for (long q = 0; q < Q.rows(); ++q) {
            Vec x = Q.row(q).transpose();
            int tr = qreg[static_cast<size_t>(q)];
            if (!x.allFinite() || est[static_cast<size_t>(q)] == 0) continue;
            prop.emplace_back(est[static_cast<size_t>(q)], tr);
            mr.emplace_back(snap_to_region(baseline_mr(x, b.sensors), b.centers), tr);
            wcl.emplace_back(snap_to_region(baseline_wcl_point(x, b.sensors, cfg.wcl_alpha), b.centers), tr);
        }
        if (prop.empty()) {
            notice("no usable queries; localization errors omitted");
        } else {
            rep["localization"] = json{{"queries", prop.size()},
                                       {"proposed", region_loc_error(prop, b.centers)},
                                       {"mr", region_loc_error(mr, b.centers)},
                                       {"wcl", region_loc_error(wcl, b.centers)}};
        }
    }
    rep["notices"] = notes;
    io::write_json(out_path, rep);
}

}  // namespace radiomap
