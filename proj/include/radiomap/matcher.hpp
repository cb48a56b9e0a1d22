#pragma once

#include "radiomap/types.hpp"

#include <cstdint>
#include <functional>
#include <utility>

namespace radiomap {

struct RegionGraph {
    int K = 0;
    std::vector<std::pair<int, int>> edges;  // 1-based, stored with first < second
    std::vector<Point> centers;              // centers[r - 1] = o_r

    bool has_edge(int u, int v) const;
    void validate() const;
    // Adjacency as bit masks over 0-based nodes.
    std::vector<std::uint32_t> adjacency() const;
};

struct RouteMatch {
    std::vector<int> pi;  // pi[k - 1] = physical region of cluster k
    double cost = 0.0;
    bool feasible = false;
    bool reversal_ambiguous = false;
};

using PointCost = std::function<double(const Point&, const Point&)>;

double euclidean_cost(const Point& a, const Point& b);

// RSS-weighted centroid of one sample, weights (10^{x_j/10})^alpha.
Point wcl_point(const Vec& x, const SensorLayout& layout, double alpha);
// Mean of the per-sample weighted centroids over samples a+1..b.
Point wcl_centroid(const RssSequence& seq, long a, long b, const SensorLayout& layout, double alpha);

// Exact graph-constrained matching by dynamic programming over (visited set, last region).
// Minimizes sum_k c(o_hat_k, o_{pi(k)}); among near-equal optima the lexicographically
// smallest pi wins. Returns feasible = false when no route exists.
RouteMatch viterbi_match(const std::vector<Point>& centroids, const RegionGraph& graph,
                         const PointCost& cost = euclidean_cost, int max_k = 20);

// Exhaustive search over all permutations. K <= 9.
RouteMatch brute_force_match(const std::vector<Point>& centroids, const RegionGraph& graph,
                             const PointCost& cost = euclidean_cost);

// Number of Hamiltonian paths counted as ordered routes.
long long count_routes(const RegionGraph& graph);

struct GraphOptions {
    double length_scale = 0.0;          // 0: mean nearest-neighbour distance of the centers
    std::vector<int> required_route;    // when set, its consecutive pairs are always edges
    int max_resample = 10000;
};

// Calibrated edge probabilities q_jk = min(1, C_e exp(-||o_j - o_k||^2 / l^2)) for the
// pairs not forced by the required route, with sum q equal to the free edge budget.
std::vector<std::vector<double>> edge_probabilities(const std::vector<Point>& centers, int target_edges,
                                                    const GraphOptions& opt);

// One draw from the calibrated model (no feasibility conditioning).
RegionGraph sample_region_graph(const std::vector<Point>& centers, int target_edges, const GraphOptions& opt,
                                std::uint64_t seed);

// Draws graphs until at least one route exists; with a required route every draw
// qualifies at once.
RegionGraph random_region_graph(const std::vector<Point>& centers, int target_edges, std::uint64_t seed,
                                const GraphOptions& opt = {});

double matching_error(const std::vector<int>& pi, const std::vector<int>& truth);

}  // namespace radiomap
