#pragma once

#include "radiomap/matcher.hpp"
#include "radiomap/types.hpp"

#include <cstdint>
#include <string>

namespace radiomap {

enum class SynthMode { Model, PathLoss };

struct SynthSpec {
    int K = 10;
    long D = 40;
    long N = 2000;
    std::vector<int> dims;       // per region; empty means every region uses `dim`
    int dim = 0;
    double mean_level = -60.0;   // dB offset shared by all region means
    double ratio = 2.5;          // min pairwise ||mu_i - mu_j||^2 / s^2
    double noise_var = 1.0;      // s^2
    double sigma_lo = 4.0;       // subspace variances drawn in [lo, hi] * s^2
    double sigma_hi = 16.0;
    std::vector<double> fractions;  // segment fractions; empty means equal
    long transition_len = 0;
    std::uint64_t seed = 1;
    SynthMode mode = SynthMode::Model;
    double area_w = 30.0;
    double area_h = 16.0;
    double ref_db = -40.0;       // path-loss mode: level at 1 m
    double exponent = 3.0;
    double shadow_std = 4.0;     // per (region, sensor) offset, dB
    double cell_fill = 0.8;      // fraction of the cell a walker covers
    int edges_target = 0;        // 0 means 2 (K - 1)
    bool anchor_route = true;    // force the true route's edges into the graph
    long queries = 0;

    int dim_of(int k) const;     // k is 1-based
    void validate() const;
};

// Independent RNG seed per purpose so one field change does not perturb other draws.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& purpose);

struct GeneratedModel {
    ModelParams theta;
    Segmentation truth;
};

// Random orthonormal bases, diagonal subspace variances, and means rescaled so the
// minimum pairwise squared distance over s^2 equals spec.ratio. Requires K <= D.
GeneratedModel gen_model(const SynthSpec& spec);

Segmentation truth_boundaries(const SynthSpec& spec);

struct GeneratedSequence {
    RssSequence seq;
    Segmentation truth;
    std::vector<int> labels;
};

GeneratedSequence gen_sequence(const GeneratedModel& model, const SynthSpec& spec);

struct Layout {
    SensorLayout sensors;
    std::vector<Point> centers;     // centers[r - 1] = o_r
    std::vector<Point> cell_half;   // half extents of each region's cell, by region id
    std::vector<int> route;         // route[k - 1] = region visited k-th
};

// Jittered grid of region cells in snake order with a random id permutation; one
// sensor inside each cell when D >= K, the rest uniform over the area.
Layout gen_layout(int K, double area_w, double area_h, long D, std::uint64_t seed);

struct Dataset {
    SynthSpec spec;
    RssSequence seq;
    Segmentation truth;
    std::vector<int> labels;
    Layout layout;
    RegionGraph graph;
    ModelParams theta;              // model mode only
    Mat queries;                    // rows are RSS vectors
    std::vector<int> query_regions; // physical region id per query
    std::vector<Point> query_positions;
};

Dataset gen_dataset(const SynthSpec& spec);

}  // namespace radiomap
