#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dynwalk/model.hpp"

namespace dynwalk {

/// Model file, one of three shapes (unknown keys are rejected):
///
///   {"name": s?, "nodes": [label...]?, "configs": [matrix...], "env_rates": [[...]]}
///   {"name": s?, "edge_markov": {"nodes": [label...], "edges": [{"u": i, "v": j,
///        "rate_on": L1, "rate_off": L0}...], "max_edges": 20?}}
///   {"name": s?, "bus_system": {"stops": [label...], "lines": [{"name": s?,
///        "stops": [i...], "buses": b, "dwell_rates": [...], "travel_rates": [...]}...],
///        "state_cap": 200000?}}
///
/// Node and stop references are 0-based indices. `env_rates` is m x m with
/// off-diagonal rates; its diagonal must be zero. It may be omitted when m = 1.
DynamicGraph model_from_json(const nlohmann::json& j);
DynamicGraph load_model(const std::string& path);

// Writes the generating spec when the model has one, unless `explicit_form`.
nlohmann::json model_to_json(const DynamicGraph& g, bool explicit_form = false);

std::vector<std::string> preset_names();
nlohmann::json preset_json(const std::string& name);
DynamicGraph preset(const std::string& name);

}  // namespace dynwalk
