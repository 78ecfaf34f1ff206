#include "photonic_forge/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "photonic_forge/errors.hpp"
#include "photonic_forge/parallel.hpp"

namespace pforge {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Outcome {
  double value = 0.0;
  bool ok = false;
  std::string error;
};

// Mean written as x0 + mean(x - x0) so identical samples give x0 exactly.
void fill_stats(SweepPoint& point, const std::vector<Outcome>& outcomes) {
  std::vector<double> values;
  for (const Outcome& o : outcomes) {
    if (o.ok) {
      values.push_back(o.value);
    } else {
      ++point.failures;
      point.error = o.error;
    }
  }
  point.trials = static_cast<int>(values.size());
  if (values.empty()) return;
  const double x0 = values.front();
  double shift = 0.0;
  for (double v : values) shift += v - x0;
  point.mean = x0 + shift / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - point.mean) * (v - point.mean);
    point.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(seed) ^ point) ^ trial);
}

SweepResult sweep_wavelength(const PixelMap& device, const SimulationSetup& setup, const UnitarySpec& gate,
                             std::span<const double> wavelengths_nm, int workers) {
  for (double l : wavelengths_nm) {
    if (!(l > 0.0)) throw ConfigError("sweep_wavelength: wavelengths must be positive");
  }
  SweepResult result;
  result.axis = "wavelength_nm";
  std::vector<Outcome> outcomes(wavelengths_nm.size());
  parallel_for(wavelengths_nm.size(), workers, [&](std::size_t k) {
    try {
      const SimulationSetup at = setup.at_wavelength(wavelengths_nm[k]);
      DeviceEvaluator ev(at, gate, make_targets(at, gate, 1), 1);
      outcomes[k] = {ev.evaluate(device).aggregate, true, {}};
    } catch (const Error& e) {
      outcomes[k] = {0.0, false, e.what()};
    }
  });
  for (std::size_t k = 0; k < wavelengths_nm.size(); ++k) {
    SweepPoint p;
    p.axis_value = wavelengths_nm[k];
    fill_stats(p, {outcomes[k]});
    result.points.push_back(std::move(p));
  }
  return result;
}

SweepResult sweep_displacement(const PixelMap& device, const SimulationSetup& setup, const UnitarySpec& gate,
                               std::span<const double> shifts_nm, int trials, std::uint64_t seed, int workers) {
  if (trials < 1) throw ConfigError("sweep_displacement: trials must be >= 1");
  for (double d : shifts_nm) {
    if (!(d >= 0.0)) throw ConfigError("sweep_displacement: shifts must be non-negative");
  }
  const DeviceEvaluator ev(setup, gate, make_targets(setup, gate, workers), 1);
  const std::size_t per = static_cast<std::size_t>(trials);
  std::vector<Outcome> outcomes(shifts_nm.size() * per);
  parallel_for(outcomes.size(), workers, [&](std::size_t job) {
    const std::size_t point = job / per;
    const std::size_t trial = job % per;
    try {
      const PermittivityMap eps = perturb(device, setup.layout, shifts_nm[point], derive_seed(seed, point, trial),
                                          setup.sim.cell_size_nm, setup.materials());
      outcomes[job] = {ev.evaluate(eps).aggregate, true, {}};
    } catch (const Error& e) {
      outcomes[job] = {0.0, false, e.what()};
    }
  });

  SweepResult result;
  result.axis = "displacement_nm";
  for (std::size_t point = 0; point < shifts_nm.size(); ++point) {
    SweepPoint p;
    p.axis_value = shifts_nm[point];
    for (std::size_t trial = 0; trial < per; ++trial) p.seeds.push_back(derive_seed(seed, point, trial));
    fill_stats(p, std::vector<Outcome>(outcomes.begin() + point * per, outcomes.begin() + (point + 1) * per));
    result.points.push_back(std::move(p));
  }
  return result;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
  const auto old_precision = os.precision();
  os << std::setprecision(9) << "axis_value,mean_fidelity,std_fidelity,trials\n";
  for (const SweepPoint& p : result.points) {
    os << p.axis_value << ',' << p.mean << ',' << p.stddev << ',' << p.trials << '\n';
  }
  os.precision(old_precision);
}

}  // namespace pforge
