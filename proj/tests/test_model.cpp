#include "helpers.hpp"
#include "radiomap/model.hpp"

#include <doctest.h>

using namespace radiomap;

TEST_CASE("sigmoid is centered at one half and saturates without overflow") {
    CHECK(sigmoid_beta(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(sigmoid_beta(0.5, 1e-9) == doctest::Approx(0.5));
    CHECK(sigmoid_beta(1000.0, 1e-4) == 1.0);
    CHECK(sigmoid_beta(-1000.0, 1e-4) == 0.0);
    CHECK(std::isfinite(sigmoid_beta(-1e6, 1e-6)));
    // 1 / (1 + e^{-x}) at x = (1.5 - 0.5) / 2
    CHECK(sigmoid_beta(1.5, 2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-15));
}

TEST_CASE("rectangle windows partition the samples") {
    std::vector<long> b = {0, 3, 7, 12};
    for (long i = 1; i <= 12; ++i) {
        double s = 0.0;
        for (size_t k = 1; k < b.size(); ++k) s += window_rect(i, b[k - 1], b[k]);
        CHECK(s == 1.0);
    }
    CHECK_THROWS_AS(window_rect(1, 3, 3), Error);
}

TEST_CASE("smooth windows telescope") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> u(0, 40);
    for (int rep = 0; rep < 200; ++rep) {
        long a = u(rng), b = a + 1 + u(rng), c = b + 1 + u(rng);
        long i = u(rng) + u(rng);
        double beta = std::pow(10.0, -3.0 + 3.0 * (rep % 4) / 3.0);
        double lhs = window_smooth(i, a, b, beta) + window_smooth(i, b, c, beta);
        // The middle sigmoid cancels up to one rounding of the sum.
        CHECK(std::fabs(lhs - window_smooth(i, a, c, beta)) <= 4e-16);
    }
}

TEST_CASE("smooth window approaches the rectangle as beta shrinks") {
    const long a = 5, b = 17;
    double prev = INFINITY;
    for (double beta : {1.0, 0.1, 0.01, 0.001}) {
        double m = 0.0;
        for (long i = 0; i <= 25; ++i) m = std::max(m, std::fabs(window_smooth(i, a, b, beta) - window_rect(i, a, b)));
        CHECK(m <= prev);
        prev = m;
    }
    CHECK(prev < 1e-100);
}

TEST_CASE("window dispatches on mode") {
    CHECK(window(3, 2, 4, WindowParams{1.0, WindowMode::Rectangle}) == 1.0);
    CHECK(window(3, 2, 4, WindowParams{1.0, WindowMode::Smooth}) == doctest::Approx(window_smooth(3, 2, 4, 1.0)));
}

TEST_CASE("log density matches a dense Gaussian") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 30; ++rep) {
        const long D = 3 + rep % 6;
        const int d = rep % static_cast<int>(D);
        SubspaceFeature f;
        f.mu = Vec::NullaryExpr(D, [&] { return g(rng); });
        f.basis = testutil::random_orthonormal(D, d, rng);
        f.sigma2 = Vec::NullaryExpr(d, [&] { return 0.5 + std::fabs(g(rng)) * 3.0; });
        f.noise_var = 0.3 + std::fabs(g(rng));
        Vec x = Vec::NullaryExpr(D, [&] { return 2.0 * g(rng); });
        double want = testutil::dense_log_density(x, f.mu, f.basis, f.sigma2, f.noise_var);
        CHECK(log_density(x, f) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("log density is invariant to signed permutations of the basis") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    SubspaceFeature f;
    f.mu = Vec::NullaryExpr(6, [&] { return g(rng); });
    f.basis = testutil::random_orthonormal(6, 3, rng);
    f.sigma2 = Vec(3);
    f.sigma2 << 4.0, 2.0, 0.5;
    f.noise_var = 0.7;
    SubspaceFeature h = f;
    Eigen::PermutationMatrix<Eigen::Dynamic> P(3);
    P.indices() << 2, 0, 1;
    Mat S = Mat(P);
    S.col(0) *= -1.0;
    S.col(2) *= -1.0;
    h.basis = f.basis * S;
    h.sigma2 = (S.transpose() * f.sigma2.asDiagonal() * S).diagonal();
    for (int rep = 0; rep < 10; ++rep) {
        Vec x = Vec::NullaryExpr(6, [&] { return g(rng); });
        CHECK(log_density(x, h) == doctest::Approx(log_density(x, f)).epsilon(1e-9));
    }
}

TEST_CASE("log density reports bad inputs") {
    SubspaceFeature f;
    f.mu = Vec::Zero(3);
    f.basis = Mat(3, 0);
    f.sigma2 = Vec(0);
    f.noise_var = 1.0;
    Vec x = Vec::Zero(3);
    x(1) = NAN;
    CHECK_THROWS_AS(log_density(x, f), Error);
    try {
        log_density(x, f);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DataQuality);
    }
    CHECK_THROWS_AS(log_density(Vec::Zero(2), f), Error);
    f.noise_var = 0.0;
    CHECK_THROWS_AS(log_density(Vec::Zero(3), f), Error);
}

TEST_CASE("log likelihood with one region is the mean log density") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Mat X(25, 4);
    for (long i = 0; i < 25; ++i)
        for (long d = 0; d < 4; ++d) X(i, d) = g(rng);
    RssSequence seq(X);
    SubspaceFeature f;
    f.mu = Vec::Constant(4, 0.1);
    f.basis = testutil::random_orthonormal(4, 1, rng);
    f.sigma2 = Vec::Constant(1, 2.0);
    f.noise_var = 1.3;
    double mean = 0.0;
    for (long i = 1; i <= 25; ++i) mean += log_density(seq.x(i), f);
    mean /= 25.0;
    Segmentation one({}, 25);
    CHECK(log_likelihood(seq, {f}, one, WindowParams{1.0, WindowMode::Rectangle}) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("sequence and segmentation validation") {
    Mat X(2, 2);
    X << 1, 2, 3, NAN;
    CHECK_THROWS_AS(RssSequence{X}, Error);
    CHECK_THROWS_AS(RssSequence(Mat(0, 3)), Error);
    Segmentation s({3, 3}, 10);
    CHECK_THROWS_AS(s.validate(), Error);
    Segmentation t({3, 6}, 10);
    CHECK_NOTHROW(t.validate(3));
    CHECK_THROWS_AS(t.validate(4), Error);
    CHECK(t.tau(0) == 0);
    CHECK(t.tau(3) == 10);
    CHECK(t.segment_length(3) == 4);
}
