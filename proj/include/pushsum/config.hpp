#pragma once

// Scenario files. JSON, one object:
//
//   {
//     "protocol": "robust",                      // ordinary | pushsum | robust
//     "graph": {"nodes": 5, "edges": [[0, 1], [1, 2]]},
//            // or {"family": "ring_chord", "nodes": 5, "self_loops": false}
//            // families: ring, ring_chord, bidirectional_ring, complete
//     "x0": [1, 2, 3, 4, 5],                     // or "ramp" for 1..n
//     "iterations": 100000,
//     "schedule": {
//       "kind": "logarithmic",                   // constant | geometric | explicit
//       "regime": "robust", "alpha": 0, "K": 1, "T": 0,
//       "block_length": 1, "growth": 2, "lengths": [],
//       "wake_probability": 0.5, "failure_probability": 0.5, "seed": 1,
//       "wake_mode": "independent",              // or sequential
//       "covering": "all_edges"                  // or strongly_connected
//     },
//     "tolerances": {"convergence_tol": 1e-8, "window": 3, "conservation_tol": 1e-9},
//     "audit_level": "boundaries",               // none | every_iteration
//     "sampling": "auto",                        // every_iteration | boundaries
//     "weights": "equal"                         // or symmetric (ordinary only)
//   }
//
// Everything except protocol, graph and x0 is optional. The schedule regime
// defaults to the protocol's. Family graphs carry self-loops unless the
// protocol is robust. Unknown keys are rejected.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pushsum/harness.hpp"

namespace pushsum {

// Sets a dotted key ("schedule.seed=7"). The value is read as JSON when it
// parses, else as a string. Throws ConfigError on a malformed override.
void apply_override(nlohmann::json& doc, std::string_view key_value);

// Throws ConfigError naming the offending field. Does not call validate().
ScenarioConfig parse_config(const nlohmann::json& doc);

// Parse text, apply the PUSHSUM_SEED environment variable (when
// `use_environment` and it is set) and then `overrides`, convert and
// validate.
ScenarioConfig load_config_text(std::string_view text, const std::vector<std::string>& overrides = {},
                                bool use_environment = true);
ScenarioConfig load_config_file(const std::string& path,
                                const std::vector<std::string>& overrides = {},
                                bool use_environment = true);
// Raw document with the environment and overrides applied, not converted.
nlohmann::json load_document(const std::string& path, const std::vector<std::string>& overrides = {},
                             bool use_environment = true);

// Explicit edge list and x0 array; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ScenarioConfig& cfg);
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace pushsum
