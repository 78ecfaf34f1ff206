#pragma once

// Gaussian-modulated sine pulses and their injection at the input ports.
//
//   E(t) = A / (sigma * sqrt(2 pi)) * exp(-((t - mu) / sigma)^2 / 2) * sin(omega t + phi)
//
// A basis state |k> is this pulse in waveguide k; superpositions drive
// several ports with the magnitude of each coefficient scaling A and its
// argument adding to phi.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "photonic_forge/fdtd.hpp"
#include "photonic_forge/geometry.hpp"

namespace pforge {

struct PulseSpec {
  double amplitude = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  double omega = 1.0;
  double phi = 0.0;

  void validate() const;
};

/// Default pulse timing relative to the optical period.
struct PulseShape {
  double amplitude = 1.0;
  double sigma_periods = 10.0;
  double mu_sigmas = 6.0;

  /// Pulse for a carrier of angular frequency omega (normalised units).
  PulseSpec at(double omega) const;
};

double pulse_value(double t, const PulseSpec& spec);

/// Time after which the pulse is treated as off (mu + 6 sigma).
double pulse_end(const PulseSpec& spec);

struct PortExcitation {
  int port_index = 0;
  std::complex<double> coefficient{1.0, 0.0};
};

/// Excitations for the state whose amplitudes are `column` (one per port),
/// skipping zero entries.
std::vector<PortExcitation> state_excitations(std::span<const std::complex<double>> column);

/// Throws ConfigError unless sum |c|^2 = 1 within tol.
void check_normalized(std::span<const PortExcitation> excitations, double tol = 1e-9);

/// The pulse at one port: A -> A |c|, phi -> phi + arg(c).
PulseSpec port_pulse(const PulseSpec& base, std::complex<double> coefficient);

/// Source value for a given excitation at time t, with the cells it is added to.
struct SourceTerm {
  int port_index = 0;
  std::vector<std::size_t> cells;
  double value = 0.0;
};

/// Source terms at time t for a grid built on `layout`'s domain.
std::vector<SourceTerm> excite(const YeeGrid& grid, const DeviceLayout& layout,
                               std::span<const PortExcitation> excitations, const PulseSpec& base, double t);

/// Time-dependent line sources for run().
std::vector<DrivenSource> port_sources(const DomainFrame& frame, std::span<const PortExcitation> excitations,
                                       const PulseSpec& base);

/// Steps for the pulse to finish plus three transits of the domain at the
/// speed of light in silicon.
std::int64_t auto_total_steps(const SimulationConfig& sim, const PulseSpec& pulse, const DomainFrame& frame);

}  // namespace pforge
