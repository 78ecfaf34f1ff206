// photonic-forge: optimize, evaluate and sweep pixelated gate devices.
//
//   photonic-forge optimize --config run.json [--out DIR] [--seed N] [--workers N]
//   photonic-forge evaluate --config run.json --geometry device.geom
//   photonic-forge sweep    --config run.json --geometry device.geom --kind wavelength --values 600,650,700
//   photonic-forge targets  --config run.json
//
// Every command writes <out>/config.resolved.json first. Outputs are written
// as <name>.partial and renamed once the command has finished; a failed run
// leaves the .partial files behind and exits nonzero.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "photonic_forge/analysis.hpp"
#include "photonic_forge/errors.hpp"
#include "photonic_forge/evaluation.hpp"
#include "photonic_forge/optimizer.hpp"
#include "photonic_forge/run_config.hpp"
#include "photonic_forge/snapshot.hpp"
#include "photonic_forge/target_cache.hpp"

namespace fs = std::filesystem;
using namespace pforge;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::string out;
  std::string geometry;
  std::int64_t seed = -1;
  int workers = -1;
  std::string kind;
  std::string values;
  int trials = 0;
};

void note(const std::string& msg) { std::cerr << "[photonic-forge] " << msg << '\n'; }

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::string path(const std::string& name) {
    names_.push_back(name);
    return (dir_ / (name + ".partial")).string();
  }

  void commit() {
    for (const std::string& n : names_) fs::rename(dir_ / (n + ".partial"), dir_ / n);
    for (const std::string& n : names_) note("wrote " + (dir_ / n).string());
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path);
  return os;
}

RunConfig resolve(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required");
  std::ifstream is(opt.config);
  if (!is) throw ConfigError("cannot open config " + opt.config);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + opt.config + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!opt.out.empty()) j["run.out_dir"] = opt.out;
  if (opt.seed >= 0) j["run.seed"] = static_cast<std::uint64_t>(opt.seed);
  if (opt.workers >= 0) j["run.workers"] = opt.workers;
  return parse_run_config(j);
}

fs::path prepare_out(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  save_run_config((dir / "config.resolved.json").string(), cfg);
  return dir;
}

std::vector<FieldRecord> targets_for(const RunConfig& cfg, const fs::path& dir, const UnitarySpec& gate) {
  return cached_targets(dir.string(), cfg.setup, gate, cfg.resolved_workers(), note).records;
}

PixelMap load_device(const Options& opt) {
  if (opt.geometry.empty()) throw ConfigError("--geometry is required");
  if (!fs::exists(opt.geometry)) throw ConfigError("geometry file not found: " + opt.geometry);
  return load_geometry(opt.geometry);
}

// Three snapshots per basis input: the pulse peak leaving the source, the
// output peak, and halfway between.
void write_snapshots(Outputs& out, const DeviceEvaluator& ev, const PixelMap& device) {
  const SimulationSetup& setup = ev.setup();
  const PermittivityMap eps = rasterize(setup.layout, device, setup.sim.cell_size_nm, setup.materials());
  const std::vector<FieldRecord> tests = ev.simulate_basis(eps);
  const auto launch = static_cast<std::int64_t>(setup.pulse_spec().mu / setup.sim.dt());
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const std::int64_t arrive = std::max(output_peak_step(tests[k], setup.sim.record_stride), launch + 2);
    const std::int64_t steps[] = {launch, (launch + arrive) / 2, arrive};
    const PortExcitation basis{static_cast<int>(k), Complex(1.0, 0.0)};
    const std::vector<Array2D<double>> shots = capture_ez(eps, setup, std::span(&basis, 1), steps);
    save_pgm(out.path("snapshot_input" + std::to_string(k) + ".pgm"), superpose(shots));
  }
}

void save_report(Outputs& out, const FidelityReport& report) {
  std::ofstream os = open_out(out.path("report.csv"));
  write_report_csv(os, report);
}

int cmd_optimize(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const fs::path dir = prepare_out(cfg);
  const UnitarySpec gate = cfg.unitary();
  const int workers = cfg.resolved_workers();
  const DeviceEvaluator ev(cfg.setup, gate, targets_for(cfg, dir, gate), workers);
  Outputs out(dir);

  const auto t0 = std::chrono::steady_clock::now();
  const std::string ckpt = (dir / "checkpoint").string();
  const CheckpointSink sink = [&](const Checkpoint& cp) {
    write_checkpoint(ckpt, cp);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream msg;
    msg << "level " << cp.level_pixel_nm << " nm pass " << cp.pass << ": F = " << cp.fidelity << " (" << s << " s)";
    note(msg.str());
  };
  const OptimizationResult result = optimize(cfg.optimizer(), ev, sink);

  save_geometry(out.path("device.geom"), result.best);
  {
    std::ofstream os = open_out(out.path("iterations.csv"));
    write_log_csv(os, result.log);
  }
  const FidelityReport report = ev.evaluate(result.best);
  save_report(out, report);
  if (cfg.snapshots) write_snapshots(out, ev, result.best);
  out.commit();
  std::printf("aggregate fidelity %.9g (min %.9g)\n", report.aggregate, report.minimum);
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const PixelMap device = load_device(opt);
  const fs::path dir = prepare_out(cfg);
  const UnitarySpec gate = cfg.unitary();
  const DeviceEvaluator ev(cfg.setup, gate, targets_for(cfg, dir, gate), cfg.resolved_workers());
  Outputs out(dir);
  const FidelityReport report = ev.evaluate(device);
  save_report(out, report);
  out.commit();
  std::printf("aggregate fidelity %.9g (min %.9g)\n", report.aggregate, report.minimum);
  return 0;
}

// "a,b,c" or "start:stop:count" (count points, both ends included).
std::vector<double> parse_axis(const std::string& spec) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("bad axis value '" + s + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("axis range must be start:stop:count");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double n = number(parts[2]);
    if (n < 1 || n != static_cast<int>(n)) throw ConfigError("axis count must be a positive integer");
    for (int k = 0; k < static_cast<int>(n); ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
    return out;
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  return out;
}

int cmd_sweep(const Options& opt) {
  if (opt.kind != "wavelength" && opt.kind != "displacement")
    throw ConfigError("--kind must be wavelength or displacement");
  const RunConfig cfg = resolve(opt);
  const PixelMap device = load_device(opt);
  std::vector<double> axis = opt.values.empty() ? (opt.kind == "wavelength" ? cfg.wavelengths_nm : cfg.shifts_nm)
                                                : parse_axis(opt.values);
  if (axis.empty()) throw ConfigError("no sweep values: pass --values or set analysis." +
                                      std::string(opt.kind == "wavelength" ? "wavelengths_nm" : "shifts_nm"));
  const fs::path dir = prepare_out(cfg);
  const UnitarySpec gate = cfg.unitary();
  const int workers = cfg.resolved_workers();
  Outputs out(dir);

  SweepResult result;
  if (opt.kind == "wavelength") {
    result = sweep_wavelength(device, cfg.setup, gate, axis, workers);
  } else {
    const int trials = opt.trials > 0 ? opt.trials : cfg.trials;
    result = sweep_displacement(device, cfg.setup, gate, axis, trials, cfg.seed, workers);
  }
  int failed = 0;
  for (const SweepPoint& p : result.points) {
    if (p.failures > 0) {
      std::ostringstream msg;
      msg << opt.kind << " " << p.axis_value << ": " << p.failures << " failed run(s): " << p.error;
      note(msg.str());
      failed += p.failures;
    }
  }
  {
    std::ofstream os = open_out(out.path("sweep_" + opt.kind + ".csv"));
    write_sweep_csv(os, result);
  }
  out.commit();
  for (const SweepPoint& p : result.points) std::printf("%g %.9g %.9g %d\n", p.axis_value, p.mean, p.stddev, p.trials);
  if (failed > 0) note(std::to_string(failed) + " run(s) excluded from the statistics");
  return 0;
}

int cmd_targets(const Options& opt) {
  const RunConfig cfg = resolve(opt);
  const fs::path dir = prepare_out(cfg);
  const UnitarySpec gate = cfg.unitary();
  const CachedTargets t = cached_targets(dir.string(), cfg.setup, gate, cfg.resolved_workers(), note);
  std::printf("%s %s\n", t.hit ? "hit" : "generated", t.path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design and analyse pixelated photonic gate devices"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run config (flat dotted-key JSON)")->required();
    sub->add_option("--out", opt.out, "Output directory (overrides run.out_dir)");
    sub->add_option("--seed", opt.seed, "Seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", opt.workers, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  };
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Run DBS from an all-on device");
  common(optimize_cmd);
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Fidelity of an existing device");
  common(evaluate_cmd);
  evaluate_cmd->add_option("--geometry", opt.geometry, "Geometry file")->required();
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Wavelength or displacement sweep of a device");
  common(sweep_cmd);
  sweep_cmd->add_option("--geometry", opt.geometry, "Geometry file")->required();
  sweep_cmd->add_option("--kind", opt.kind, "wavelength or displacement")->required();
  sweep_cmd->add_option("--values", opt.values, "Axis values: a,b,c or start:stop:count (nm)");
  sweep_cmd->add_option("--trials", opt.trials, "Trials per displacement (overrides analysis.trials)");
  CLI::App* targets_cmd = app.add_subcommand("targets", "Precompute the target cache");
  common(targets_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (optimize_cmd->parsed()) return cmd_optimize(opt);
    if (evaluate_cmd->parsed()) return cmd_evaluate(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
    if (targets_cmd->parsed()) return cmd_targets(opt);
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const DivergenceError& e) {
    std::cerr << "diverged at step " << e.step_index() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
