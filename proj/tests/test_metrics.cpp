#include "helpers.hpp"
#include "radiomap/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

using namespace radiomap;

namespace {

std::vector<int> random_labels(size_t n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> u(1, k);
    std::vector<int> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double brute_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::vector<int> p = pred, t = truth;
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    const size_t n = std::max(p.size(), t.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long best = 0;
    do {
        long hit = 0;
        for (size_t i = 0; i < pred.size(); ++i) {
            size_t pi = static_cast<size_t>(std::lower_bound(p.begin(), p.end(), pred[i]) - p.begin());
            size_t ti = static_cast<size_t>(std::lower_bound(t.begin(), t.end(), truth[i]) - t.begin());
            hit += static_cast<size_t>(perm[pi]) == ti ? 1 : 0;
        }
        best = std::max(best, hit);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

double direct_nmi(const std::vector<int>& a, const std::vector<int>& b) {
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa, pb;
    std::map<std::pair<int, int>, double> pab;
    for (size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0 / n;
        pb[b[i]] += 1.0 / n;
        pab[{a[i], b[i]}] += 1.0 / n;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (auto [k, p] : pa) ha -= p * std::log(p);
    for (auto [k, p] : pb) hb -= p * std::log(p);
    for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
    return mi / std::sqrt(ha * hb);
}

}  // namespace

TEST_CASE("accuracy on a small example") {
    std::vector<int> truth = {1, 1, 1, 2, 2, 2};
    std::vector<int> pred = {2, 2, 1, 1, 1, 1};
    CHECK(clustering_accuracy(pred, truth) == doctest::Approx(5.0 / 6.0));
    CHECK(clustering_accuracy(truth, truth) == 1.0);
    CHECK(clustering_accuracy({7, 7, 9, 9}, {1, 1, 2, 2}) == 1.0);
}

TEST_CASE("accuracy matches the best bijection by enumeration") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 100; ++rep) {
        int kp = 1 + rep % 5, kt = 1 + (rep / 5) % 5;
        auto p = random_labels(30, kp, rng);
        auto t = random_labels(30, kt, rng);
        CHECK(clustering_accuracy(p, t) == doctest::Approx(brute_accuracy(p, t)).epsilon(1e-12));
    }
}

TEST_CASE("hungarian finds the minimum-cost assignment") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 60; ++rep) {
        const long n = 1 + rep % 6;
        Mat C(n, n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) C(i, j) = std::floor(u(rng));
        auto as = hungarian(C);
        double got = 0.0;
        for (long i = 0; i < n; ++i) got += C(i, as[static_cast<size_t>(i)]);
        std::vector<int> perm(static_cast<size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        double best = INFINITY;
        do {
            double s = 0.0;
            for (long i = 0; i < n; ++i) s += C(i, perm[static_cast<size_t>(i)]);
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(got == best);
        std::vector<int> sorted = as;
        std::sort(sorted.begin(), sorted.end());
        for (long i = 0; i < n; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);
    }
}

TEST_CASE("nmi matches the direct formula and its conventions") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 50; ++rep) {
        auto p = random_labels(40, 2 + rep % 4, rng);
        auto t = random_labels(40, 2 + rep % 3, rng);
        CHECK(nmi(p, t) == doctest::Approx(direct_nmi(p, t)).epsilon(1e-12));
        double g = nmi(p, t, NmiNorm::Geometric), a = nmi(p, t, NmiNorm::Arithmetic);
        CHECK(a <= g + 1e-15);  // arithmetic mean >= geometric mean
        CHECK(nmi(p, t) == doctest::Approx(nmi(t, p)).epsilon(1e-12));
    }
    std::vector<int> x = {1, 1, 2, 2, 3};
    CHECK(nmi(x, {5, 5, 4, 4, 9}) == doctest::Approx(1.0));
    CHECK(nmi({1, 1, 1}, {2, 2, 2}) == 1.0);
    CHECK(nmi({1, 1, 1}, {1, 2, 2}) == 0.0);
}

TEST_CASE("nmi of independent labelings is near zero") {
    std::mt19937_64 rng(31);
    auto p = random_labels(20000, 5, rng);
    auto t = random_labels(20000, 5, rng);
    CHECK(nmi(p, t) < 0.05);
    CHECK(std::fabs(pairwise_scores(p, t).ari) < 0.05);
}

TEST_CASE("pair scores match enumeration over all pairs") {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 40; ++rep) {
        auto p = random_labels(6, 1 + rep % 3, rng);
        auto t = random_labels(6, 1 + (rep / 3) % 3, rng);
        double tp = 0, fp = 0, fn = 0, tn = 0;
        int pairs = 0;
        for (size_t i = 0; i < 6; ++i)
            for (size_t j = i + 1; j < 6; ++j) {
                ++pairs;
                bool sp = p[i] == p[j], st = t[i] == t[j];
                tp += sp && st;
                fp += sp && !st;
                fn += !sp && st;
                tn += !sp && !st;
            }
        CHECK(pairs == 15);
        PairScores s = pairwise_scores(p, t);
        double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        CHECK(s.precision == doctest::Approx(prec));
        CHECK(s.recall == doctest::Approx(rec));
        CHECK(s.f1 == doctest::Approx(prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0));
        // Hubert-Arabie ARI in pair-count form.
        double num = 2.0 * (tp * tn - fn * fp), den = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn);
        if (den != 0.0) CHECK(s.ari == doctest::Approx(num / den).epsilon(1e-12));
    }
    PairScores same = pairwise_scores({1, 2, 3}, {4, 5, 6});
    CHECK(same.ari == 1.0);
    CHECK(same.precision == 0.0);
    CHECK(same.f1 == 0.0);
}

TEST_CASE("subspace similarity") {
    auto axes = [](std::vector<long> idx) {
        Mat U = Mat::Zero(6, static_cast<long>(idx.size()));
        for (size_t c = 0; c < idx.size(); ++c) U(idx[c], static_cast<long>(c)) = 1.0;
        return U;
    };
    SubspaceFeature a{3.0 * Vec::Unit(6, 5), axes({0, 1}), Vec::Ones(2), 1.0};
    CHECK(subspace_similarity(a, a) == doctest::Approx(1.0));
    SubspaceFeature b = a;
    Eigen::Matrix2d R;
    R << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
    b.basis = a.basis * R;
    b.mu = 2.0 * a.mu;
    CHECK(subspace_similarity(a, b) == doctest::Approx(1.0));
    SubspaceFeature c{Vec::Zero(6), axes({2, 3}), Vec::Ones(2), 1.0};
    CHECK(subspace_similarity(a, c) == doctest::Approx(0.0).scale(1.0));
    SubspaceFeature h{Vec::Zero(6), axes({0, 2}), Vec::Ones(2), 1.0};
    CHECK(subspace_similarity(a, h) == doctest::Approx(0.5));
    // The offset direction counts: same span, offsets along different axes.
    SubspaceFeature p{Vec::Unit(6, 4), axes({0, 1}), Vec::Ones(2), 1.0};
    CHECK(subspace_similarity(a, p) == doctest::Approx(2.0 / 3.0));
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        SubspaceFeature x{Vec::Random(6), testutil::random_orthonormal(6, 1 + rep % 3, rng), Vec::Ones(1 + rep % 3), 1.0};
        SubspaceFeature y{Vec::Random(6), testutil::random_orthonormal(6, 1 + rep % 2, rng), Vec::Ones(1 + rep % 2), 1.0};
        double s = subspace_similarity(x, y);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0 + 1e-12);
        CHECK(s == doctest::Approx(subspace_similarity(y, x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(subspace_similarity(a, SubspaceFeature{Vec::Zero(3), Mat(3, 0), Vec(0), 1.0}), Error);
}
