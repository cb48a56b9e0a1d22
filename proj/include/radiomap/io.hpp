#pragma once

#include "radiomap/matcher.hpp"
#include "radiomap/segmenter.hpp"
#include "radiomap/synth.hpp"
#include "radiomap/types.hpp"

#include <json.hpp>

#include <string>

namespace radiomap::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// FNV-1a 64 of the compact dump (object keys are sorted), as 16 hex digits.
std::string config_hash(const json& config);

// printf %.9g
std::string format_num(double v);

std::string read_text(const std::string& path);
// Throws input_error when the path cannot be written.
void write_text(const std::string& path, const std::string& content);
json read_json(const std::string& path);
// Two-space indented dump followed by a newline.
void write_json(const std::string& path, const json& j);

// Header "t,s1,...,sD", then one row per sample with 9 significant digits.
std::string measurements_csv(const Mat& X);
// Parses a measurements-style CSV. NaN cells are kept (callers decide); an empty
// file or a header-only file yields zero rows.
Mat parse_measurements_csv(const std::string& text);
Mat read_measurements_csv(const std::string& path);

// Required-field access with field-level messages.
const json& field(const json& j, const std::string& name, const std::string& where);

json to_json(const SubspaceFeature& f);
SubspaceFeature feature_from_json(const json& j);

json to_json(const RegionGraph& g);
RegionGraph graph_from_json(const json& j);

json to_json(const SensorLayout& s);
SensorLayout sensors_from_json(const json& j);

json to_json(const RouteMatch& m);

json to_json(const SynthSpec& s);
// Missing K, D or N is an input error naming the field.
SynthSpec spec_from_json(const json& j);

json points_json(const std::vector<Point>& pts);
std::vector<Point> points_from_json(const json& j, const std::string& where);

// Keys: schema_version, config_hash, seed, K, D, features, region_ids (null when
// unmatched), plus any extra keys the caller adds.
json radiomap_json(const RadioMap& map);
RadioMap radiomap_from_json(const json& j);

std::string trace_csv(const SegmentationTrace& trace);

}  // namespace radiomap::io
