#pragma once

// Run configuration: a flat JSON object with dotted keys.
//
//   {"gate": "hadamard", "sim.wavelength_nm": 650, "geom.design_width_nm": 4000,
//    "geom.design_height_nm": 4000, "geom.n_modes": 2, "geom.pixels": 16}
//
// geom.pixels is the final pixel count across the design width;
// opt.initial_pixels is the count DBS starts from. Unknown keys are rejected
// so a typo never silently falls back to a default.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "photonic_forge/evaluation.hpp"
#include "photonic_forge/optimizer.hpp"

namespace pforge {

struct RunConfig {
  SimulationSetup setup;
  std::string gate;
  bool haar = false;
  int final_pixels = 0;
  int initial_pixels = 8;
  int max_passes_per_level = 50;
  double improvement_threshold = 0.0;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: available parallelism
  std::string out_dir = "out";
  bool snapshots = true;
  int trials = 10;
  std::vector<double> wavelengths_nm;
  std::vector<double> shifts_nm;

  /// Optimizer settings derived from the pixel counts and the design width.
  OptimizerConfig optimizer() const;
  int resolved_workers() const;
  UnitarySpec unitary() const;
  void validate() const;
};

/// Keys that must be present in every config file.
const std::vector<std::string>& required_config_keys();

/// Throws ConfigError naming the first missing or unknown key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Every key with its resolved value. Feeding the result back through
/// parse_run_config gives an identical config.
nlohmann::json to_json(const RunConfig& cfg);
void save_run_config(const std::string& path, const RunConfig& cfg);

}  // namespace pforge
