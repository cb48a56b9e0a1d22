#pragma once

#include "radiomap/io.hpp"
#include "radiomap/matcher.hpp"
#include "radiomap/synth.hpp"
#include "radiomap/types.hpp"

#include <optional>
#include <ostream>
#include <string>

namespace radiomap {

// Settings for build/localize/evaluate. A config file overlays the defaults and
// command-line flags overlay the file.
struct PipelineConfig {
    double beta = 1.0;
    int max_iters = 1000;
    bool random_init = false;
    std::uint64_t seed = 1;
    double energy = 0.97;
    int d_max = 3;
    std::vector<int> dims;  // explicit per-region dims; empty selects the energy rule
    bool d0 = false;        // Algorithm 1 only
    double wcl_alpha = 1.0;
    int jobs = 1;
    double eps = 0.003;
    std::string nmi = "geometric";

    io::json to_json() const;
    // Overlays the keys present in j; unknown keys are input errors.
    void overlay(const io::json& j);
};

// RADIOMAP_SEED, when set, replaces the spec seed.
std::optional<std::uint64_t> env_seed();

// Writes measurements.csv, sensors.json, regions.json, graph.json, truth.json and,
// when spec.queries > 0, queries.csv.
void cmd_generate(const SynthSpec& spec, const std::string& out_dir);

struct Bundle {
    RssSequence seq;
    SensorLayout sensors;
    std::vector<Point> centers;
    RegionGraph graph;
    std::optional<io::json> truth;
    std::string dataset_hash;
};

Bundle read_bundle(const std::string& dir);

// Writes radiomap.json and trace.csv into out_dir. Returns 0, or 4 when no route
// satisfies the graph (the map is still written with region_ids null).
int cmd_build(const std::string& dataset_dir, const std::string& out_dir, const PipelineConfig& cfg);

// Writes one row per query. Returns 0, or 3 when some row held non-finite values.
int cmd_localize(const std::string& radiomap_path, const std::string& queries_path, const std::string& out_path);

// assignments_path may be empty, in which case queries are assigned from the map.
void cmd_evaluate(const std::string& dataset_dir, const std::string& radiomap_path,
                  const std::string& assignments_path, const std::string& out_path, const PipelineConfig& cfg,
                  std::ostream& notices);

}  // namespace radiomap
