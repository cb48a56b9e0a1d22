#include "helpers.hpp"
#include "radiomap/matcher.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace radiomap;

namespace {

std::vector<Point> random_points(int K, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 20.0);
    std::vector<Point> p;
    for (int k = 0; k < K; ++k) p.emplace_back(u(rng), u(rng));
    return p;
}

RegionGraph path_graph(int K, const std::vector<Point>& centers) {
    RegionGraph g;
    g.K = K;
    g.centers = centers;
    for (int k = 1; k < K; ++k) g.edges.push_back({k, k + 1});
    return g;
}

long long enumerate_routes(const RegionGraph& g) {
    std::vector<int> p(static_cast<size_t>(g.K));
    std::iota(p.begin(), p.end(), 1);
    long long n = 0;
    do {
        bool ok = true;
        for (size_t k = 1; k < p.size() && ok; ++k) ok = g.has_edge(p[k - 1], p[k]);
        n += ok ? 1 : 0;
    } while (std::next_permutation(p.begin(), p.end()));
    return n;
}

}  // namespace

TEST_CASE("dynamic programming matches exhaustive search") {
    std::mt19937_64 rng(17);
    int feasible = 0;
    for (int rep = 0; rep < 150; ++rep) {
        const int K = 2 + rep % 6;
        auto centers = random_points(K, rng);
        auto cents = random_points(K, rng);
        int pairs = K * (K - 1) / 2;
        int target = std::min(pairs, K - 1 + static_cast<int>(rng() % 4));
        RegionGraph g = sample_region_graph(centers, target, {}, rng());
        RouteMatch a = viterbi_match(cents, g);
        RouteMatch b = brute_force_match(cents, g);
        CHECK(a.feasible == b.feasible);
        CHECK(count_routes(g) == enumerate_routes(g));
        if (!a.feasible) continue;
        ++feasible;
        CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-12));
        CHECK(a.pi == b.pi);
        double direct = 0.0;
        for (int k = 0; k < K; ++k)
            direct += euclidean_cost(cents[static_cast<size_t>(k)], centers[static_cast<size_t>(a.pi[static_cast<size_t>(k)] - 1)]);
        CHECK(a.cost == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(feasible > 50);
}

TEST_CASE("a path graph admits two routes and the closer one wins") {
    std::vector<Point> centers = {{0, 0}, {5, 0}, {10, 0}, {15, 0}};
    RegionGraph g = path_graph(4, centers);
    CHECK(count_routes(g) == 2);
    std::vector<Point> cents = {{14, 1}, {9, 1}, {6, -1}, {0.5, 0}};
    RouteMatch m = viterbi_match(cents, g);
    REQUIRE(m.feasible);
    CHECK(m.pi == std::vector<int>{4, 3, 2, 1});
    CHECK_FALSE(m.reversal_ambiguous);
    CHECK(matching_error(m.pi, {4, 3, 2, 1}) == 0.0);
    CHECK(matching_error(m.pi, {1, 2, 3, 4}) == 1.0);
}

TEST_CASE("a symmetric layout is flagged as reversal-ambiguous and ties go lexicographic") {
    std::vector<Point> centers = {{0, 0}, {5, 0}, {10, 0}};
    RegionGraph g = path_graph(3, centers);
    std::vector<Point> cents = {{5, 0}, {5, 0}, {5, 0}};
    RouteMatch m = viterbi_match(cents, g);
    REQUIRE(m.feasible);
    CHECK(m.reversal_ambiguous);
    CHECK(m.pi == std::vector<int>{1, 2, 3});
}

TEST_CASE("graphs without a route are reported as infeasible") {
    std::vector<Point> centers = {{0, 0}, {1, 0}, {0, 1}, {-1, 0}};
    RegionGraph star;
    star.K = 4;
    star.centers = centers;
    star.edges = {{1, 2}, {1, 3}, {1, 4}};
    CHECK(count_routes(star) == 0);
    RouteMatch m = viterbi_match(centers, star);
    CHECK_FALSE(m.feasible);
    CHECK(m.pi.empty());
}

TEST_CASE("graph validation") {
    RegionGraph g;
    g.K = 3;
    g.centers = {{0, 0}, {1, 0}, {2, 0}};
    g.edges = {{1, 1}};
    CHECK_THROWS_AS(g.validate(), Error);
    g.edges = {{1, 4}};
    CHECK_THROWS_AS(g.validate(), Error);
    g.edges = {{1, 2}, {2, 1}};
    CHECK_THROWS_AS(g.validate(), Error);
    g.edges = {{1, 2}};
    CHECK_NOTHROW(g.validate());
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(2, 3));
    CHECK_THROWS_AS(viterbi_match({{0, 0}}, g), Error);
    CHECK_THROWS_AS(viterbi_match(g.centers, g, euclidean_cost, 2), Error);
}

TEST_CASE("calibrated edge probabilities") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const int K = 4 + rep % 8;
        auto centers = random_points(K, rng);
        std::vector<int> route(static_cast<size_t>(K));
        std::iota(route.begin(), route.end(), 1);
        std::shuffle(route.begin(), route.end(), rng);
        GraphOptions opt;
        opt.required_route = route;
        const int target = std::min(K * (K - 1) / 2, 2 * (K - 1));
        auto q = edge_probabilities(centers, target, opt);
        double sum = 0.0;
        for (int a = 0; a < K; ++a)
            for (int b = a + 1; b < K; ++b) {
                CHECK(q[static_cast<size_t>(a)][static_cast<size_t>(b)] == q[static_cast<size_t>(b)][static_cast<size_t>(a)]);
                CHECK(q[static_cast<size_t>(a)][static_cast<size_t>(b)] >= 0.0);
                CHECK(q[static_cast<size_t>(a)][static_cast<size_t>(b)] <= 1.0);
                sum += q[static_cast<size_t>(a)][static_cast<size_t>(b)];
            }
        CHECK(sum == doctest::Approx(static_cast<double>(target)).epsilon(1e-9));
        for (size_t k = 1; k < route.size(); ++k)
            CHECK(q[static_cast<size_t>(route[k - 1] - 1)][static_cast<size_t>(route[k] - 1)] == 1.0);
        RegionGraph g = random_region_graph(centers, target, rng(), opt);
        for (size_t k = 1; k < route.size(); ++k) CHECK(g.has_edge(route[k - 1], route[k]));
        CHECK(count_routes(g) >= 2);
    }
    std::vector<Point> three = {{0, 0}, {1, 0}, {2, 0}};
    CHECK_THROWS_AS(edge_probabilities(three, 4, {}), Error);
    GraphOptions opt;
    opt.required_route = {1, 2, 3};
    CHECK_THROWS_AS(edge_probabilities(three, 1, opt), Error);
}

TEST_CASE("sampled graphs have the target edge count on average") {
    std::mt19937_64 rng(8);
    auto centers = random_points(9, rng);
    double total = 0.0;
    const int draws = 4000;
    for (int s = 0; s < draws; ++s) total += static_cast<double>(sample_region_graph(centers, 14, {}, static_cast<std::uint64_t>(s)).edges.size());
    CHECK(total / draws == doctest::Approx(14.0).epsilon(0.02));
}

TEST_CASE("weighted centroid localization") {
    SensorLayout L;
    L.positions = {{0, 0}, {10, 0}, {0, 10}};
    Vec x(3);
    x << -50, -60, -70;
    for (double alpha : {0.5, 1.0, 2.0}) {
        double w0 = std::pow(std::pow(10.0, -5.0), alpha), w1 = std::pow(std::pow(10.0, -6.0), alpha),
               w2 = std::pow(std::pow(10.0, -7.0), alpha);
        Point want = (w0 * L.positions[0] + w1 * L.positions[1] + w2 * L.positions[2]) / (w0 + w1 + w2);
        Point got = wcl_point(x, L, alpha);
        CHECK(got.x() == doctest::Approx(want.x()).epsilon(1e-12));
        CHECK(got.y() == doctest::Approx(want.y()).epsilon(1e-12));
    }
    Vec eq = Vec::Constant(3, -3000.0);
    Point c = wcl_point(eq, L, 1.0);
    CHECK(c.x() == doctest::Approx(10.0 / 3.0));
    Mat X(2, 3);
    X << -50, -60, -70, -70, -50, -60;
    RssSequence seq(X);
    Point m = wcl_centroid(seq, 0, 2, L, 1.0);
    Point want = 0.5 * (wcl_point(seq.x(1), L, 1.0) + wcl_point(seq.x(2), L, 1.0));
    CHECK((m - want).norm() < 1e-12);
    CHECK_THROWS_AS(wcl_point(x, L, 0.0), Error);
    CHECK_THROWS_AS(wcl_centroid(seq, 1, 1, L, 1.0), Error);
}
