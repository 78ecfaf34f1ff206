#pragma once

// Direct binary search with fine-graining.
//
// Each pass visits every pixel once in a freshly shuffled order, flips it,
// and keeps the flip only if the objective strictly improves by more than
// the threshold. Passes repeat until one brings no improvement (or the pass
// cap is hit); then every pixel is split into 2x2 children of the same state
// and the search continues, until the minimum pixel size has converged.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "photonic_forge/evaluation.hpp"
#include "photonic_forge/geometry.hpp"

namespace pforge {

struct OptimizerConfig {
  int initial_rows = 8;
  int initial_cols = 8;
  double min_pixel_nm = 125.0;
  std::uint64_t seed = 1;
  int max_passes_per_level = 50;
  double improvement_threshold = 0.0;

  void validate() const;
};

struct IterationEntry {
  double level_pixel_nm = 0.0;
  int pass = 0;
  std::size_t pixel_index = 0;
  bool kept = false;
  double fidelity = 0.0;   // accepted objective after this visit
  double candidate = 0.0;  // objective of the flipped map (-inf if it failed)
  bool failed = false;
  double wall_ms = 0.0;
};

struct RefinementEvent {
  std::size_t first_entry = 0;  // index of the first entry at the new level
  double pixel_nm_before = 0.0;
  double pixel_nm_after = 0.0;
  double fidelity_before = 0.0;
  double fidelity_after = 0.0;  // re-evaluated on the refined map
};

struct IterationLog {
  std::uint64_t seed = 0;
  double initial_fidelity = 0.0;
  std::vector<IterationEntry> entries;
  std::vector<RefinementEvent> refinements;
};

/// "step,level_pixel_nm,pass,pixel_index,kept,fidelity,wall_ms"
void write_log_csv(std::ostream& os, const IterationLog& log);

/// Objective to maximise. Throwing pforge::Error marks the candidate as failed
/// and rejects it.
using Objective = std::function<double(const PixelMap&)>;

struct PassResult {
  PixelMap map;
  double fidelity = 0.0;
  std::vector<IterationEntry> entries;
};

PassResult dbs_pass(const PixelMap& pm, const Objective& objective, double current, std::mt19937_64& rng,
                    int pass_index, double threshold = 0.0);

struct Checkpoint {
  PixelMap map;
  double level_pixel_nm = 0.0;
  int pass = 0;
  double fidelity = 0.0;
  std::uint64_t seed = 0;
  std::string rng_state;
};

/// Writes <stem>.geom and <stem>.json (level, pass, fidelity, seed, rng_state).
void write_checkpoint(const std::string& stem, const Checkpoint& cp);

using CheckpointSink = std::function<void(const Checkpoint&)>;

struct OptimizationResult {
  PixelMap best;
  double fidelity = 0.0;
  IterationLog log;
};

/// DBS from `start`, refining down to config.min_pixel_nm.
OptimizationResult optimize(const OptimizerConfig& config, const PixelMap& start, const Objective& objective,
                            const CheckpointSink& checkpoint = {});

/// All-on start at the initial pixel count, FDTD objective against the gate.
OptimizationResult optimize(const OptimizerConfig& config, const SimulationSetup& setup, const UnitarySpec& gate,
                            int workers = 1, const CheckpointSink& checkpoint = {});

/// Same, with targets already attached to the evaluator.
OptimizationResult optimize(const OptimizerConfig& config, const DeviceEvaluator& evaluator,
                            const CheckpointSink& checkpoint = {});

/// True when the accepted value never decreases from the initial value on.
bool log_is_monotone(const IterationLog& log);

}  // namespace pforge
