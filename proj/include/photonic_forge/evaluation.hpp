#pragma once

// Simulating devices against target records.
//
// Targets come from the straight-waveguide reference device driven at its
// inputs with column k of the gate; a test run drives the candidate device
// with the plain pulse on input k. Both record the output-port regions at
// identical timing, so records compare sample by sample.

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "photonic_forge/fdtd.hpp"
#include "photonic_forge/fidelity.hpp"
#include "photonic_forge/gates.hpp"
#include "photonic_forge/geometry.hpp"
#include "photonic_forge/sources.hpp"

namespace pforge {

struct SimulationSetup {
  SimulationConfig sim;
  DeviceLayout layout;
  PulseShape pulse;

  Materials materials() const { return {sim.eps_background, sim.eps_silicon}; }
  PulseSpec pulse_spec() const { return pulse.at(sim.omega()); }
  DomainFrame frame() const { return DomainFrame::make(layout, sim.cell_size_nm); }
  /// sim.total_steps, or the automatic count when it is zero.
  std::int64_t steps() const;
  /// Same setup at another vacuum wavelength.
  SimulationSetup at_wavelength(double wavelength_nm) const;
};

/// Runs one device with the given port excitations and records the output regions.
FieldRecord simulate_device(const PermittivityMap& device, const SimulationSetup& setup,
                            std::span<const PortExcitation> excitations);

/// ez over the whole domain after each of the given step counts (ascending).
std::vector<Array2D<double>> capture_ez(const PermittivityMap& device, const SimulationSetup& setup,
                                        std::span<const PortExcitation> excitations,
                                        std::span<const std::int64_t> at_steps);

/// Step count at which the recorded output energy peaks.
std::int64_t output_peak_step(const FieldRecord& record, int stride);

/// Canonical text describing everything a target record depends on.
std::string target_key(const SimulationSetup& setup, const UnitarySpec& gate);

/// One target record per basis input. Throws ConfigError when no light
/// reaches the outputs of the reference device.
std::vector<FieldRecord> make_targets(const SimulationSetup& setup, const UnitarySpec& gate, int workers = 1);

/// Process-wide memo of make_targets keyed by target_key.
class TargetMemo {
 public:
  const std::vector<FieldRecord>& get(const SimulationSetup& setup, const UnitarySpec& gate, int workers = 1);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::vector<FieldRecord>> records_;
};

class DeviceEvaluator {
 public:
  DeviceEvaluator(SimulationSetup setup, UnitarySpec gate, std::vector<FieldRecord> targets, int workers = 1);

  const SimulationSetup& setup() const noexcept { return setup_; }
  const UnitarySpec& gate() const noexcept { return gate_; }
  const std::vector<FieldRecord>& targets() const noexcept { return targets_; }
  int workers() const noexcept { return workers_; }

  /// The n basis-state runs of one device, run concurrently.
  std::vector<FieldRecord> simulate_basis(const PermittivityMap& device) const;

  FidelityReport evaluate(const PermittivityMap& device) const;
  FidelityReport evaluate(const PixelMap& pm) const;

 private:
  SimulationSetup setup_;
  UnitarySpec gate_;
  std::vector<FieldRecord> targets_;
  int workers_;
};

/// Aggregate gate fidelity of a pixel map against precomputed targets.
double evaluate(const PixelMap& pm, const SimulationSetup& setup, const UnitarySpec& gate,
                std::span<const FieldRecord> targets, int workers = 1);

}  // namespace pforge
