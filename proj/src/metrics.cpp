#include "radiomap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace radiomap {

namespace {

struct Contingency {
    std::vector<std::vector<long>> n;  // n[pred][truth]
    std::vector<long> a;               // pred sizes
    std::vector<long> b;               // truth sizes
    long total = 0;
};

std::vector<int> compact(const std::vector<int>& labels, int& count) {
    std::map<int, int> ids;
    for (int l : labels) ids.emplace(l, 0);
    int next = 0;
    for (auto& [l, id] : ids) id = next++;
    count = next;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids[l]);
    return out;
}

Contingency contingency(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty()) throw input_error("metrics: empty input");
    if (pred.size() != truth.size()) throw input_error("metrics: label vectors differ in length");
    int P = 0, T = 0;
    auto p = compact(pred, P);
    auto t = compact(truth, T);
    Contingency c;
    c.n.assign(static_cast<size_t>(P), std::vector<long>(static_cast<size_t>(T), 0));
    c.a.assign(static_cast<size_t>(P), 0);
    c.b.assign(static_cast<size_t>(T), 0);
    for (size_t i = 0; i < p.size(); ++i) {
        ++c.n[static_cast<size_t>(p[i])][static_cast<size_t>(t[i])];
        ++c.a[static_cast<size_t>(p[i])];
        ++c.b[static_cast<size_t>(t[i])];
    }
    c.total = static_cast<long>(p.size());
    return c;
}

double comb2(long x) { return x < 2 ? 0.0 : 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

double entropy(const std::vector<long>& sizes, double n) {
    double h = 0.0;
    for (long s : sizes)
        if (s > 0) {
            double p = static_cast<double>(s) / n;
            h -= p * std::log(p);
        }
    return h;
}

}  // namespace

std::vector<int> hungarian(const Mat& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw input_error("hungarian: matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(n + 1), 0.0), v(static_cast<size_t>(n + 1), 0.0);
    std::vector<int> p(static_cast<size_t>(n + 1), 0), way(static_cast<size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n + 1), inf);
        std::vector<bool> used(static_cast<size_t>(n + 1), false);
        do {
            used[static_cast<size_t>(j0)] = true;
            int i0 = p[static_cast<size_t>(j0)], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<size_t>(j)] > 0) assign[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
    return assign;
}

double clustering_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    Contingency c = contingency(pred, truth);
    const size_t P = c.a.size(), T = c.b.size();
    const size_t n = std::max(P, T);
    Mat cost = Mat::Zero(static_cast<long>(n), static_cast<long>(n));
    for (size_t i = 0; i < P; ++i)
        for (size_t j = 0; j < T; ++j) cost(static_cast<long>(i), static_cast<long>(j)) = -static_cast<double>(c.n[i][j]);
    auto as = hungarian(cost);
    long hit = 0;
    for (size_t i = 0; i < P; ++i) {
        size_t j = static_cast<size_t>(as[i]);
        if (j < T) hit += c.n[i][j];
    }
    return static_cast<double>(hit) / static_cast<double>(c.total);
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm) {
    Contingency c = contingency(pred, truth);
    const double n = static_cast<double>(c.total);
    double h1 = entropy(c.a, n), h2 = entropy(c.b, n);
    if (h1 == 0.0 && h2 == 0.0) return 1.0;  // both are the single-cluster partition
    if (h1 == 0.0 || h2 == 0.0) return 0.0;
    double mi = 0.0;
    for (size_t i = 0; i < c.a.size(); ++i)
        for (size_t j = 0; j < c.b.size(); ++j) {
            double nij = static_cast<double>(c.n[i][j]);
            if (nij == 0.0) continue;
            mi += (nij / n) * std::log(nij * n / (static_cast<double>(c.a[i]) * static_cast<double>(c.b[j])));
        }
    double den = norm == NmiNorm::Geometric ? std::sqrt(h1 * h2) : 0.5 * (h1 + h2);
    return std::clamp(mi / den, 0.0, 1.0);
}

PairScores pairwise_scores(const std::vector<int>& pred, const std::vector<int>& truth) {
    Contingency c = contingency(pred, truth);
    double tp = 0.0, pp = 0.0, tpos = 0.0;
    for (const auto& row : c.n)
        for (long v : row) tp += comb2(v);
    for (long v : c.a) pp += comb2(v);
    for (long v : c.b) tpos += comb2(v);
    PairScores s;
    s.precision = pp > 0.0 ? tp / pp : 0.0;
    s.recall = tpos > 0.0 ? tp / tpos : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    double all = comb2(c.total);
    double expected = all > 0.0 ? pp * tpos / all : 0.0;
    double den = 0.5 * (pp + tpos) - expected;
    if (den == 0.0) {
        bool same = c.a.size() == c.b.size();
        for (size_t i = 0; same && i < c.a.size(); ++i) {
            long nz = 0;
            for (long v : c.n[i]) nz += v > 0 ? 1 : 0;
            same = nz == 1;
        }
        s.ari = same ? 1.0 : 0.0;
    } else {
        s.ari = (tp - expected) / den;
    }
    return s;
}

namespace {

Mat augmented_basis(const SubspaceFeature& f) {
    const long D = f.D();
    const int d = f.dim();
    Mat U = d > 0 ? f.basis : Mat(D, 0);
    Vec off = f.mu - U * (U.transpose() * f.mu);
    double nrm = off.norm();
    if (nrm <= 1e-12 * std::max(1.0, f.mu.norm())) return U;
    Mat out(D, d + 1);
    if (d > 0) out.leftCols(d) = U;
    out.col(d) = off / nrm;
    return out;
}

}  // namespace

double subspace_similarity(const SubspaceFeature& a, const SubspaceFeature& b) {
    if (a.D() != b.D()) throw input_error("subspace_similarity: dimension mismatch");
    Mat Ua = augmented_basis(a), Ub = augmented_basis(b);
    long m = std::min(Ua.cols(), Ub.cols());
    if (m == 0) return (Ua.cols() == 0 && Ub.cols() == 0) ? 1.0 : 0.0;
    return (Ua.transpose() * Ub).squaredNorm() / static_cast<double>(m);
}

}  // namespace radiomap
