#include "radiomap/matcher.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace radiomap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tol(double v) { return 1e-12 * std::max(1.0, std::fabs(v)); }

std::vector<std::vector<double>> cost_table(const std::vector<Point>& centroids, const RegionGraph& g,
                                            const PointCost& cost) {
    const int K = g.K;
    if (static_cast<int>(centroids.size()) != K) throw input_error("matching: need one centroid per region");
    std::vector<std::vector<double>> c(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(K)));
    for (int k = 0; k < K; ++k)
        for (int r = 0; r < K; ++r) c[static_cast<size_t>(k)][static_cast<size_t>(r)] = cost(centroids[static_cast<size_t>(k)], g.centers[static_cast<size_t>(r)]);
    return c;
}

double route_cost(const std::vector<std::vector<double>>& c, const std::vector<int>& pi0) {
    double acc = 0.0;
    for (size_t k = 0; k < pi0.size(); ++k) acc += c[k][static_cast<size_t>(pi0[k])];
    return acc;
}

void finish(RouteMatch& m, const std::vector<std::vector<double>>& c, std::vector<int> pi0) {
    m.feasible = true;
    m.cost = route_cost(c, pi0);
    std::vector<int> rev(pi0.rbegin(), pi0.rend());
    if (rev != pi0) {
        double rc = route_cost(c, rev);
        m.reversal_ambiguous = std::fabs(rc - m.cost) <= tie_tol(m.cost);
    }
    m.pi.clear();
    for (int r : pi0) m.pi.push_back(r + 1);
}

}  // namespace

bool RegionGraph::has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) != edges.end();
}

void RegionGraph::validate() const {
    if (K < 1) throw input_error("graph: K must be positive");
    if (static_cast<int>(centers.size()) != K) throw input_error("graph: need K centers");
    for (const auto& c : centers)
        if (!c.allFinite()) throw input_error("graph: centers must be finite");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u == v) throw input_error("graph: self-loop");
        if (u < 1 || v < 1 || u > K || v > K) throw input_error("graph: edge endpoint out of range");
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw input_error("graph: duplicate edge");
    }
}

std::vector<std::uint32_t> RegionGraph::adjacency() const {
    if (K > 32) throw input_error("graph: adjacency masks support at most 32 nodes");
    std::vector<std::uint32_t> adj(static_cast<size_t>(K), 0u);
    for (auto [u, v] : edges) {
        adj[static_cast<size_t>(u - 1)] |= 1u << (v - 1);
        adj[static_cast<size_t>(v - 1)] |= 1u << (u - 1);
    }
    return adj;
}

double euclidean_cost(const Point& a, const Point& b) { return (a - b).norm(); }

Point wcl_point(const Vec& x, const SensorLayout& layout, double alpha) {
    if (x.size() != layout.D() || x.size() == 0) throw input_error("wcl: dimension mismatch");
    if (!(alpha > 0.0)) throw input_error("wcl: alpha must be positive");
    if (!x.allFinite()) throw quality_error("wcl: non-finite input");
    double mx = x.maxCoeff();
    Point acc = Point::Zero();
    double wsum = 0.0;
    for (long j = 0; j < x.size(); ++j) {
        // Shifting by the maximum leaves the weight ratios unchanged.
        double w = std::pow(10.0, alpha * (x(j) - mx) / 10.0);
        acc += w * layout.positions[static_cast<size_t>(j)];
        wsum += w;
    }
    return acc / wsum;
}

Point wcl_centroid(const RssSequence& seq, long a, long b, const SensorLayout& layout, double alpha) {
    if (!(0 <= a && a < b && b <= seq.N())) throw input_error("wcl: empty cluster");
    Point acc = Point::Zero();
    for (long i = a + 1; i <= b; ++i) acc += wcl_point(seq.x(i), layout, alpha);
    return acc / static_cast<double>(b - a);
}

RouteMatch viterbi_match(const std::vector<Point>& centroids, const RegionGraph& graph, const PointCost& cost,
                         int max_k) {
    graph.validate();
    const int K = graph.K;
    if (K > max_k) throw input_error("viterbi_match: K exceeds the configured cap");
    auto c = cost_table(centroids, graph, cost);
    auto adj = graph.adjacency();
    const std::uint32_t full = (K == 32) ? ~0u : ((1u << K) - 1u);
    const size_t S = static_cast<size_t>(full) + 1;
    // g[mask * K + r]: least cost of assigning the remaining clusters given the set of
    // used regions and the last region r.
    std::vector<double> g(S * static_cast<size_t>(K), kInf);
    for (int r = 0; r < K; ++r) g[static_cast<size_t>(full) * K + r] = 0.0;
    for (long long mask = static_cast<long long>(full) - 1; mask >= 1; --mask) {
        std::uint32_t m = static_cast<std::uint32_t>(mask);
        int step = std::popcount(m);
        for (int r = 0; r < K; ++r) {
            if (!(m >> r & 1u)) continue;
            double best = kInf;
            std::uint32_t cand = adj[static_cast<size_t>(r)] & ~m;
            while (cand) {
                int q = std::countr_zero(cand);
                cand &= cand - 1;
                double v = c[static_cast<size_t>(step)][static_cast<size_t>(q)] + g[static_cast<size_t>(m | (1u << q)) * K + q];
                if (v < best) best = v;
            }
            g[static_cast<size_t>(m) * K + r] = best;
        }
    }
    double opt = kInf;
    for (int r = 0; r < K; ++r) opt = std::min(opt, c[0][static_cast<size_t>(r)] + g[(static_cast<size_t>(1) << r) * K + r]);
    RouteMatch out;
    if (!std::isfinite(opt)) return out;

    std::vector<int> pi0;
    double rem = opt;
    std::uint32_t mask = 0;
    int last = -1;
    for (int step = 0; step < K; ++step) {
        std::uint32_t cand = (step == 0) ? full : (adj[static_cast<size_t>(last)] & ~mask);
        int pick = -1;
        double pick_rest = 0.0;
        while (cand) {
            int q = std::countr_zero(cand);
            cand &= cand - 1;
            double rest = g[static_cast<size_t>(mask | (1u << q)) * K + q];
            double v = c[static_cast<size_t>(step)][static_cast<size_t>(q)] + rest;
            if (v <= rem + tie_tol(opt)) {
                pick = q;
                pick_rest = rest;
                break;
            }
        }
        if (pick < 0) throw std::logic_error("viterbi_match: reconstruction failed");
        pi0.push_back(pick);
        mask |= 1u << pick;
        last = pick;
        rem = pick_rest;
    }
    finish(out, c, pi0);
    return out;
}

RouteMatch brute_force_match(const std::vector<Point>& centroids, const RegionGraph& graph, const PointCost& cost) {
    graph.validate();
    const int K = graph.K;
    if (K > 9) throw input_error("brute_force_match: K must be at most 9");
    auto c = cost_table(centroids, graph, cost);
    auto feasible = [&](const std::vector<int>& p) {
        for (int k = 0; k + 1 < K; ++k)
            if (!graph.has_edge(p[static_cast<size_t>(k)] + 1, p[static_cast<size_t>(k + 1)] + 1)) return false;
        return true;
    };
    std::vector<int> p(static_cast<size_t>(K));
    std::iota(p.begin(), p.end(), 0);
    double best = kInf;
    do {
        if (feasible(p)) best = std::min(best, route_cost(c, p));
    } while (std::next_permutation(p.begin(), p.end()));
    RouteMatch out;
    if (!std::isfinite(best)) return out;
    std::iota(p.begin(), p.end(), 0);
    do {
        if (feasible(p) && route_cost(c, p) <= best + tie_tol(best)) break;
    } while (std::next_permutation(p.begin(), p.end()));
    finish(out, c, p);
    return out;
}

long long count_routes(const RegionGraph& graph) {
    graph.validate();
    const int K = graph.K;
    if (K > 24) throw input_error("count_routes: K too large");
    auto adj = graph.adjacency();
    const size_t S = static_cast<size_t>(1) << K;
    std::vector<long long> cnt(S * static_cast<size_t>(K), 0);
    for (int r = 0; r < K; ++r) cnt[(static_cast<size_t>(1) << r) * K + r] = 1;
    for (size_t m = 1; m < S; ++m)
        for (int r = 0; r < K; ++r) {
            long long v = cnt[m * K + r];
            if (!v) continue;
            std::uint32_t cand = adj[static_cast<size_t>(r)] & ~static_cast<std::uint32_t>(m);
            while (cand) {
                int q = std::countr_zero(cand);
                cand &= cand - 1;
                cnt[(m | (static_cast<size_t>(1) << q)) * K + q] += v;
            }
        }
    long long total = 0;
    for (int r = 0; r < K; ++r) total += cnt[(S - 1) * K + r];
    return total;
}

namespace {

double default_length_scale(const std::vector<Point>& centers) {
    const size_t K = centers.size();
    if (K < 2) return 1.0;
    double acc = 0.0;
    for (size_t a = 0; a < K; ++a) {
        double nn = kInf;
        for (size_t b = 0; b < K; ++b)
            if (a != b) nn = std::min(nn, (centers[a] - centers[b]).norm());
        acc += nn;
    }
    double l = acc / static_cast<double>(K);
    return l > 0.0 ? l : 1.0;
}

std::set<std::pair<int, int>> route_pairs(const std::vector<int>& route, int K) {
    std::set<std::pair<int, int>> req;
    if (route.empty()) return req;
    if (static_cast<int>(route.size()) != K) throw input_error("graph: required route must visit all K regions");
    for (size_t k = 0; k + 1 < route.size(); ++k) {
        int u = route[k], v = route[k + 1];
        if (u < 1 || v < 1 || u > K || v > K || u == v) throw input_error("graph: invalid required route");
        req.insert({std::min(u, v) - 1, std::max(u, v) - 1});
    }
    return req;
}

}  // namespace

std::vector<std::vector<double>> edge_probabilities(const std::vector<Point>& centers, int target_edges,
                                                    const GraphOptions& opt) {
    const int K = static_cast<int>(centers.size());
    const double l = opt.length_scale > 0.0 ? opt.length_scale : default_length_scale(centers);
    auto req = route_pairs(opt.required_route, K);
    std::vector<std::vector<double>> q(static_cast<size_t>(K), std::vector<double>(static_cast<size_t>(K), 0.0));
    std::vector<std::pair<int, int>> free_pairs;
    std::vector<double> e;
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b) {
            if (req.count({a, b})) {
                q[static_cast<size_t>(a)][static_cast<size_t>(b)] = 1.0;
                continue;
            }
            double d2 = (centers[static_cast<size_t>(a)] - centers[static_cast<size_t>(b)]).squaredNorm();
            free_pairs.push_back({a, b});
            e.push_back(std::exp(-d2 / (l * l)));
        }
    double budget = static_cast<double>(target_edges) - static_cast<double>(req.size());
    long reachable = std::count_if(e.begin(), e.end(), [](double v) { return v > 0.0; });
    if (budget < 0.0) throw input_error("graph: target edge count below the required route length");
    if (budget > static_cast<double>(reachable)) throw input_error("graph: calibration infeasible, target exceeds attainable edges");
    auto expected = [&](double C) {
        double s = 0.0;
        for (double v : e) s += std::min(1.0, C * v);
        return s;
    };
    double C = 0.0;
    if (budget > 0.0) {
        double lo = 0.0, hi = 1.0;
        for (double v : e)
            if (v > 0.0) hi = std::max(hi, 1.0 / v);
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (expected(mid) < budget ? lo : hi) = mid;
        }
        C = hi;
    }
    for (size_t p = 0; p < free_pairs.size(); ++p)
        q[static_cast<size_t>(free_pairs[p].first)][static_cast<size_t>(free_pairs[p].second)] = std::min(1.0, C * e[p]);
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < a; ++b) q[static_cast<size_t>(a)][static_cast<size_t>(b)] = q[static_cast<size_t>(b)][static_cast<size_t>(a)];
    return q;
}

RegionGraph sample_region_graph(const std::vector<Point>& centers, int target_edges, const GraphOptions& opt,
                                std::uint64_t seed) {
    auto q = edge_probabilities(centers, target_edges, opt);
    const int K = static_cast<int>(centers.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    RegionGraph g;
    g.K = K;
    g.centers = centers;
    for (int a = 0; a < K; ++a)
        for (int b = a + 1; b < K; ++b) {
            double u = unif(rng);
            if (u < q[static_cast<size_t>(a)][static_cast<size_t>(b)]) g.edges.push_back({a + 1, b + 1});
        }
    return g;
}

RegionGraph random_region_graph(const std::vector<Point>& centers, int target_edges, std::uint64_t seed,
                                const GraphOptions& opt) {
    for (int attempt = 0; attempt < std::max(1, opt.max_resample); ++attempt) {
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(attempt)};
        std::uint64_t s[1];
        ss.generate(reinterpret_cast<std::uint32_t*>(s), reinterpret_cast<std::uint32_t*>(s) + 2);
        RegionGraph g = sample_region_graph(centers, target_edges, opt, s[0]);
        if (!opt.required_route.empty() || g.K <= 1 || count_routes(g) > 0) return g;
    }
    throw infeasible_error("random_region_graph: no draw admitted a route");
}

double matching_error(const std::vector<int>& pi, const std::vector<int>& truth) {
    if (pi.size() != truth.size() || pi.empty()) throw input_error("matching_error: size mismatch");
    long wrong = 0;
    for (size_t k = 0; k < pi.size(); ++k) wrong += (pi[k] != truth[k]) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(pi.size());
}

}  // namespace radiomap
