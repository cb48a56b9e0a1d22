#pragma once

#include "radiomap/types.hpp"

#include <utility>

namespace radiomap {

struct RegionScore {
    int region = 0;
    double loglik = 0.0;
};

// Region ids of the map, falling back to cluster order 1..K when unmatched.
std::vector<int> map_region_ids(const RadioMap& map);

// All regions sorted by descending log-likelihood, ties by ascending region id.
std::vector<RegionScore> rank_regions(const Vec& x, const RadioMap& map);

// argmax_k log p_k(x); ties go to the lowest region id.
int assign_region(const Vec& x, const RadioMap& map);

// Position of the strongest sensor; ties go to the lowest sensor index.
Point baseline_mr(const Vec& x, const SensorLayout& layout);
Point baseline_wcl_point(const Vec& x, const SensorLayout& layout, double alpha);

// 1-based id of the nearest center; ties go to the lowest id.
int snap_to_region(const Point& p, const std::vector<Point>& centers);

// Mean of ||o_est - o_true|| over (estimated id, true id) pairs.
double region_loc_error(const std::vector<std::pair<int, int>>& assignments, const std::vector<Point>& centers);

}  // namespace radiomap
