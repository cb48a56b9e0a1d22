#include "radiomap/localizer.hpp"

#include "radiomap/matcher.hpp"
#include "radiomap/model.hpp"

#include <algorithm>

namespace radiomap {

std::vector<int> map_region_ids(const RadioMap& map) {
    if (map.region_ids) return *map.region_ids;
    std::vector<int> ids(static_cast<size_t>(map.K()));
    for (int k = 0; k < map.K(); ++k) ids[static_cast<size_t>(k)] = k + 1;
    return ids;
}

std::vector<RegionScore> rank_regions(const Vec& x, const RadioMap& map) {
    if (map.K() == 0) throw input_error("localize: empty radio map");
    if (x.size() != map.features.front().D()) throw input_error("localize: dimension mismatch");
    if (!x.allFinite()) throw quality_error("localize: non-finite input");
    auto ids = map_region_ids(map);
    std::vector<RegionScore> out;
    for (int k = 0; k < map.K(); ++k)
        out.push_back({ids[static_cast<size_t>(k)], log_density(x, map.features[static_cast<size_t>(k)])});
    std::stable_sort(out.begin(), out.end(), [](const RegionScore& a, const RegionScore& b) {
        if (a.loglik != b.loglik) return a.loglik > b.loglik;
        return a.region < b.region;
    });
    return out;
}

int assign_region(const Vec& x, const RadioMap& map) { return rank_regions(x, map).front().region; }

Point baseline_mr(const Vec& x, const SensorLayout& layout) {
    if (x.size() != layout.D() || x.size() == 0) throw input_error("mr: dimension mismatch");
    if (!x.allFinite()) throw quality_error("mr: non-finite input");
    long best = 0;
    for (long j = 1; j < x.size(); ++j)
        if (x(j) > x(best)) best = j;
    return layout.positions[static_cast<size_t>(best)];
}

Point baseline_wcl_point(const Vec& x, const SensorLayout& layout, double alpha) {
    return wcl_point(x, layout, alpha);
}

int snap_to_region(const Point& p, const std::vector<Point>& centers) {
    if (centers.empty()) throw input_error("snap: no centers");
    size_t best = 0;
    for (size_t r = 1; r < centers.size(); ++r)
        if ((centers[r] - p).squaredNorm() < (centers[best] - p).squaredNorm()) best = r;
    return static_cast<int>(best) + 1;
}

double region_loc_error(const std::vector<std::pair<int, int>>& assignments, const std::vector<Point>& centers) {
    if (assignments.empty()) throw input_error("region_loc_error: empty input");
    const int K = static_cast<int>(centers.size());
    double acc = 0.0;
    for (auto [est, truth] : assignments) {
        if (est < 1 || est > K || truth < 1 || truth > K) throw input_error("region_loc_error: region id out of range");
        acc += (centers[static_cast<size_t>(est - 1)] - centers[static_cast<size_t>(truth - 1)]).norm();
    }
    return acc / static_cast<double>(assignments.size());
}

}  // namespace radiomap
