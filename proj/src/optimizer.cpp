#include "photonic_forge/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

constexpr double kFailed = -std::numeric_limits<double>::infinity();

struct Evaluated {
  double value = kFailed;
  bool failed = false;
};

Evaluated try_objective(const Objective& objective, const PixelMap& pm) {
  try {
    const double v = objective(pm);
    if (std::isnan(v)) return {kFailed, true};
    return {v, false};
  } catch (const Error&) {
    return {kFailed, true};
  }
}

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

}  // namespace

void OptimizerConfig::validate() const {
  if (initial_rows < 1 || initial_cols < 1) throw ConfigError("optimizer: initial pixel grid must be at least 1x1");
  if (!(min_pixel_nm > 0.0)) throw ConfigError("optimizer: min_pixel_nm must be positive");
  if (max_passes_per_level < 1) throw ConfigError("optimizer: max_passes_per_level must be >= 1");
  if (std::isnan(improvement_threshold)) throw ConfigError("optimizer: improvement_threshold is NaN");
}

void write_log_csv(std::ostream& os, const IterationLog& log) {
  const auto old_precision = os.precision();
  os << "step,level_pixel_nm,pass,pixel_index,kept,fidelity,wall_ms\n";
  for (std::size_t k = 0; k < log.entries.size(); ++k) {
    const IterationEntry& e = log.entries[k];
    os << std::setprecision(9) << k << ',' << e.level_pixel_nm << ',' << e.pass << ',' << e.pixel_index << ','
       << (e.kept ? 1 : 0) << ',' << e.fidelity << ',' << std::setprecision(6) << e.wall_ms << '\n';
  }
  os.precision(old_precision);
}

PassResult dbs_pass(const PixelMap& pm, const Objective& objective, double current, std::mt19937_64& rng,
                    int pass_index, double threshold) {
  PassResult out{pm, current, {}};
  std::vector<std::size_t> order(pm.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  out.entries.reserve(order.size());

  for (std::size_t index : order) {
    const auto t0 = std::chrono::steady_clock::now();
    PixelMap candidate = flip(out.map, index);
    const Evaluated ev = try_objective(objective, candidate);
    const bool keep = !ev.failed && ev.value > out.fidelity + threshold;
    if (keep) {
      out.map = std::move(candidate);
      out.fidelity = ev.value;
    }
    IterationEntry e;
    e.level_pixel_nm = pm.pixel_size_nm();
    e.pass = pass_index;
    e.pixel_index = index;
    e.kept = keep;
    e.fidelity = out.fidelity;
    e.candidate = ev.value;
    e.failed = ev.failed;
    e.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.entries.push_back(e);
  }
  return out;
}

void write_checkpoint(const std::string& stem, const Checkpoint& cp) {
  save_geometry(stem + ".geom", cp.map);
  nlohmann::json j;
  j["level"] = cp.level_pixel_nm;
  j["pass"] = cp.pass;
  j["fidelity"] = cp.fidelity;
  j["seed"] = cp.seed;
  j["rng_state"] = cp.rng_state;
  std::ofstream os(stem + ".json");
  if (!os) throw Error("cannot write checkpoint " + stem + ".json");
  os << j.dump(2) << '\n';
}

OptimizationResult optimize(const OptimizerConfig& config, const PixelMap& start, const Objective& objective,
                            const CheckpointSink& checkpoint) {
  config.validate();
  if (start.pixel_size_nm() < config.min_pixel_nm * (1.0 - 1e-9))
    throw ConfigError("optimizer: initial pixels are smaller than min_pixel_nm");

  OptimizationResult result{start, 0.0, {}};
  result.log.seed = config.seed;
  std::mt19937_64 rng(config.seed);

  const Evaluated first = try_objective(objective, start);
  if (first.failed) throw Error("optimizer: the starting device could not be evaluated");
  double current = first.value;
  result.log.initial_fidelity = current;
  PixelMap map = start;

  for (;;) {
    for (int pass = 0; pass < config.max_passes_per_level; ++pass) {
      const double before = current;
      PassResult pr = dbs_pass(map, objective, current, rng, pass, config.improvement_threshold);
      map = std::move(pr.map);
      current = pr.fidelity;
      result.log.entries.insert(result.log.entries.end(), pr.entries.begin(), pr.entries.end());
      if (checkpoint) checkpoint(Checkpoint{map, map.pixel_size_nm(), pass, current, config.seed, rng_state(rng)});
      if (!(current > before)) break;
    }
    if (map.pixel_size_nm() / 2 < config.min_pixel_nm * (1.0 - 1e-9)) break;

    RefinementEvent ev;
    ev.first_entry = result.log.entries.size();
    ev.pixel_nm_before = map.pixel_size_nm();
    ev.fidelity_before = current;
    map = refine(map, config.min_pixel_nm);
    ev.pixel_nm_after = map.pixel_size_nm();
    const Evaluated again = try_objective(objective, map);
    if (again.failed) throw Error("optimizer: the refined device could not be evaluated");
    ev.fidelity_after = again.value;
    current = again.value;
    result.log.refinements.push_back(ev);
  }

  result.best = std::move(map);
  result.fidelity = current;
  return result;
}

OptimizationResult optimize(const OptimizerConfig& config, const SimulationSetup& setup, const UnitarySpec& gate,
                            int workers, const CheckpointSink& checkpoint) {
  return optimize(config, DeviceEvaluator(setup, gate, make_targets(setup, gate, workers), workers), checkpoint);
}

OptimizationResult optimize(const OptimizerConfig& config, const DeviceEvaluator& evaluator,
                            const CheckpointSink& checkpoint) {
  config.validate();
  const DeviceLayout& layout = evaluator.setup().layout;
  const double pixel = layout.design_width_nm / config.initial_cols;
  if (std::abs(pixel * config.initial_rows - layout.design_height_nm) > 1e-9 * layout.design_height_nm)
    throw ConfigError("optimizer: initial pixels must be square and tile the design region");
  const PixelMap start(config.initial_rows, config.initial_cols, pixel, true);
  const Objective objective = [&evaluator](const PixelMap& pm) { return evaluator.evaluate(pm).aggregate; };
  return optimize(config, start, objective, checkpoint);
}

bool log_is_monotone(const IterationLog& log) {
  double previous = log.initial_fidelity;
  for (const IterationEntry& e : log.entries) {
    if (e.fidelity < previous) return false;
    previous = e.fidelity;
  }
  return true;
}

}  // namespace pforge
