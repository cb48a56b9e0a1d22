#include "radiomap/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace radiomap::io {

std::string config_hash(const json& config) {
    std::string s = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw input_error("cannot write " + path);
}

json read_json(const std::string& path) {
    std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(path + ": invalid JSON: " + e.what());
    }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string measurements_csv(const Mat& X) {
    std::string out = "t";
    for (long j = 1; j <= X.cols(); ++j) out += ",s" + std::to_string(j);
    out += "\n";
    for (long i = 0; i < X.rows(); ++i) {
        out += std::to_string(i + 1);
        for (long j = 0; j < X.cols(); ++j) out += "," + format_num(X(i, j));
        out += "\n";
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& s, long row, long col) {
    const char* b = s.c_str();
    char* end = nullptr;
    double v = std::strtod(b, &end);
    if (s.empty() || end == b || *end != '\0')
        throw input_error("csv row " + std::to_string(row) + " column " + std::to_string(col) + ": not a number");
    return v;
}

}  // namespace

Mat parse_measurements_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_line(line).size() == 1 && split_line(line)[0].empty()) return Mat(0, 0);
    auto head = split_line(line);
    if (head.size() < 2 || head[0] != "t") throw input_error("csv header: expected t,s1,...,sD");
    const long D = static_cast<long>(head.size()) - 1;
    for (long j = 1; j <= D; ++j)
        if (head[static_cast<size_t>(j)] != "s" + std::to_string(j)) throw input_error("csv header: expected s" + std::to_string(j));
    std::vector<std::vector<double>> rows;
    long r = 0;
    while (std::getline(in, line)) {
        ++r;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (static_cast<long>(cells.size()) != D + 1)
            throw input_error("csv row " + std::to_string(r) + ": expected " + std::to_string(D + 1) + " columns");
        std::vector<double> v(static_cast<size_t>(D));
        for (long j = 0; j < D; ++j) v[static_cast<size_t>(j)] = parse_cell(cells[static_cast<size_t>(j + 1)], r, j + 1);
        rows.push_back(std::move(v));
    }
    Mat X(static_cast<long>(rows.size()), D);
    for (size_t i = 0; i < rows.size(); ++i)
        for (long j = 0; j < D; ++j) X(static_cast<long>(i), j) = rows[i][static_cast<size_t>(j)];
    return X;
}

Mat read_measurements_csv(const std::string& path) { return parse_measurements_csv(read_text(path)); }

const json& field(const json& j, const std::string& name, const std::string& where) {
    if (!j.is_object() || !j.contains(name)) throw input_error(where + ": missing required field '" + name + "'");
    return j.at(name);
}

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vec vec_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw input_error(where + ": expected an array");
    Vec v(static_cast<long>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw input_error(where + ": expected numbers");
        v(static_cast<long>(i)) = j[i].get<double>();
    }
    return v;
}

template <class T>
T get_as(const json& j, const std::string& where) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw input_error(where + ": wrong type");
    }
}

}  // namespace

json to_json(const SubspaceFeature& f) {
    json basis = json::array();
    for (int c = 0; c < f.dim(); ++c) basis.push_back(vec_json(f.basis.col(c)));
    return json{{"mu", vec_json(f.mu)}, {"basis", basis}, {"sigma2", vec_json(f.sigma2)}, {"noise_var", f.noise_var}};
}

SubspaceFeature feature_from_json(const json& j) {
    SubspaceFeature f;
    f.mu = vec_from_json(field(j, "mu", "feature"), "feature.mu");
    const json& b = field(j, "basis", "feature");
    if (!b.is_array()) throw input_error("feature.basis: expected an array of columns");
    f.basis = Mat(f.mu.size(), static_cast<long>(b.size()));
    for (size_t c = 0; c < b.size(); ++c) {
        Vec col = vec_from_json(b[c], "feature.basis");
        if (col.size() != f.mu.size()) throw input_error("feature.basis: column length differs from D");
        f.basis.col(static_cast<long>(c)) = col;
    }
    f.sigma2 = vec_from_json(field(j, "sigma2", "feature"), "feature.sigma2");
    f.noise_var = get_as<double>(field(j, "noise_var", "feature"), "feature.noise_var");
    f.validate();
    return f;
}

json points_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(json::array({p.x(), p.y()}));
    return a;
}

std::vector<Point> points_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw input_error(where + ": expected an array of [x, y]");
    std::vector<Point> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw input_error(where + ": expected [x, y] pairs");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

json to_json(const RegionGraph& g) {
    json e = json::array();
    for (auto [a, b] : g.edges) e.push_back(json::array({a, b}));
    return json{{"K", g.K}, {"centers", points_json(g.centers)}, {"edges", e}};
}

RegionGraph graph_from_json(const json& j) {
    RegionGraph g;
    g.K = get_as<int>(field(j, "K", "graph"), "graph.K");
    g.centers = points_from_json(field(j, "centers", "graph"), "graph.centers");
    const json& e = field(j, "edges", "graph");
    if (!e.is_array()) throw input_error("graph.edges: expected an array");
    for (const auto& p : e) {
        if (!p.is_array() || p.size() != 2) throw input_error("graph.edges: expected [j, k] pairs");
        int a = get_as<int>(p[0], "graph.edges"), b = get_as<int>(p[1], "graph.edges");
        g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    g.validate();
    return g;
}

json to_json(const SensorLayout& s) { return json{{"D", s.D()}, {"positions", points_json(s.positions)}}; }

SensorLayout sensors_from_json(const json& j) {
    SensorLayout s;
    s.positions = points_from_json(field(j, "positions", "sensors"), "sensors.positions");
    return s;
}

json to_json(const RouteMatch& m) {
    return json{{"pi", m.pi}, {"cost", m.cost}, {"feasible", m.feasible}, {"reversal_ambiguous", m.reversal_ambiguous}};
}

json to_json(const SynthSpec& s) {
    return json{{"K", s.K},
                {"D", s.D},
                {"N", s.N},
                {"dims", s.dims},
                {"dim", s.dim},
                {"mean_level", s.mean_level},
                {"ratio", s.ratio},
                {"noise_var", s.noise_var},
                {"sigma_lo", s.sigma_lo},
                {"sigma_hi", s.sigma_hi},
                {"fractions", s.fractions},
                {"transition_len", s.transition_len},
                {"seed", s.seed},
                {"mode", s.mode == SynthMode::Model ? "model" : "pathloss"},
                {"area_w", s.area_w},
                {"area_h", s.area_h},
                {"ref_db", s.ref_db},
                {"exponent", s.exponent},
                {"shadow_std", s.shadow_std},
                {"cell_fill", s.cell_fill},
                {"edges_target", s.edges_target},
                {"anchor_route", s.anchor_route},
                {"queries", s.queries}};
}

SynthSpec spec_from_json(const json& j) {
    if (!j.is_object()) throw input_error("spec: expected a JSON object");
    SynthSpec s;
    const std::set<std::string> known = {"K", "D", "N", "dims", "dim", "mean_level", "ratio", "noise_var",
                                         "sigma_lo", "sigma_hi", "fractions", "transition_len", "seed", "mode",
                                         "area_w", "area_h", "ref_db", "exponent", "shadow_std", "cell_fill",
                                         "edges_target", "anchor_route", "queries"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw input_error("spec." + it.key() + ": unknown field");
    s.K = get_as<int>(field(j, "K", "spec"), "spec.K");
    s.D = get_as<long>(field(j, "D", "spec"), "spec.D");
    s.N = get_as<long>(field(j, "N", "spec"), "spec.N");
    auto opt = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = get_as<std::decay_t<decltype(dst)>>(j.at(key), std::string("spec.") + key);
    };
    opt("dims", s.dims);
    opt("dim", s.dim);
    opt("mean_level", s.mean_level);
    opt("ratio", s.ratio);
    opt("noise_var", s.noise_var);
    opt("sigma_lo", s.sigma_lo);
    opt("sigma_hi", s.sigma_hi);
    opt("fractions", s.fractions);
    opt("transition_len", s.transition_len);
    opt("seed", s.seed);
    opt("area_w", s.area_w);
    opt("area_h", s.area_h);
    opt("ref_db", s.ref_db);
    opt("exponent", s.exponent);
    opt("shadow_std", s.shadow_std);
    opt("cell_fill", s.cell_fill);
    opt("edges_target", s.edges_target);
    opt("anchor_route", s.anchor_route);
    opt("queries", s.queries);
    if (j.contains("mode")) {
        std::string m = get_as<std::string>(j.at("mode"), "spec.mode");
        if (m == "model") s.mode = SynthMode::Model;
        else if (m == "pathloss") s.mode = SynthMode::PathLoss;
        else throw input_error("spec.mode: expected \"model\" or \"pathloss\"");
    }
    s.validate();
    return s;
}

json radiomap_json(const RadioMap& map) {
    json feats = json::array();
    for (const auto& f : map.features) feats.push_back(to_json(f));
    json j{{"schema_version", kSchemaVersion},
           {"config_hash", map.config_hash},
           {"seed", map.seed},
           {"K", map.K()},
           {"D", map.K() > 0 ? map.features.front().D() : 0},
           {"features", feats}};
    j["region_ids"] = map.region_ids ? json(*map.region_ids) : json(nullptr);
    return j;
}

RadioMap radiomap_from_json(const json& j) {
    RadioMap m;
    int v = get_as<int>(field(j, "schema_version", "radiomap"), "radiomap.schema_version");
    if (v != kSchemaVersion) throw input_error("radiomap.schema_version: unsupported version " + std::to_string(v));
    m.config_hash = get_as<std::string>(field(j, "config_hash", "radiomap"), "radiomap.config_hash");
    m.seed = get_as<std::uint64_t>(field(j, "seed", "radiomap"), "radiomap.seed");
    const json& feats = field(j, "features", "radiomap");
    if (!feats.is_array()) throw input_error("radiomap.features: expected an array");
    for (const auto& f : feats) m.features.push_back(feature_from_json(f));
    const json& ids = field(j, "region_ids", "radiomap");
    if (!ids.is_null()) m.region_ids = get_as<std::vector<int>>(ids, "radiomap.region_ids");
    m.validate();
    return m;
}

std::string trace_csv(const SegmentationTrace& trace) {
    std::string out = "phase,iteration,cost,merge_k,split_j,tau\n";
    char buf[64];
    for (const auto& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.cost);
        out += std::to_string(r.phase) + "," + std::to_string(r.iteration) + "," + buf + "," +
               std::to_string(r.merge_k) + "," + std::to_string(r.split_j) + ",";
        for (size_t i = 0; i < r.tau.size(); ++i) out += (i ? " " : "") + std::to_string(r.tau[i]);
        out += "\n";
    }
    return out;
}

}  // namespace radiomap::io
