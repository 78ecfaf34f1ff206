#pragma once

// Robustness sweeps of a finished device: fidelity against the probe
// wavelength and against random per-pixel placement errors.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "photonic_forge/evaluation.hpp"

namespace pforge {

struct SweepPoint {
  double axis_value = 0.0;  // nm
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;    // successful trials
  int failures = 0;  // trials excluded from the statistics
  std::vector<std::uint64_t> seeds;
  std::string error;  // last failure message, if any
};

struct SweepResult {
  std::string axis;  // "wavelength_nm" or "displacement_nm"
  std::vector<SweepPoint> points;
};

/// Regenerates targets at every wavelength (sources and timing rescale,
/// geometry is unchanged) and evaluates the device once per point. A point
/// that fails is reported with trials = 0 and the sweep continues.
SweepResult sweep_wavelength(const PixelMap& device, const SimulationSetup& setup, const UnitarySpec& gate,
                             std::span<const double> wavelengths_nm, int workers = 1);

/// `trials` perturbed evaluations per shift, seeds derived from `seed`,
/// shift and trial index. Shift 0 reproduces the unperturbed device.
SweepResult sweep_displacement(const PixelMap& device, const SimulationSetup& setup, const UnitarySpec& gate,
                               std::span<const double> shifts_nm, int trials, std::uint64_t seed, int workers = 1);

/// Seed of trial `trial` at sweep point `point`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial);

/// "axis_value,mean_fidelity,std_fidelity,trials"
void write_sweep_csv(std::ostream& os, const SweepResult& result);

}  // namespace pforge
