#include "photonic_forge/sources.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "photonic_forge/errors.hpp"

namespace pforge {

void PulseSpec::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("pulse: sigma must be positive");
  if (!(omega > 0.0)) throw ConfigError("pulse: omega must be positive");
  if (!std::isfinite(amplitude) || !std::isfinite(mu) || !std::isfinite(phi))
    throw ConfigError("pulse: non-finite parameter");
}

PulseSpec PulseShape::at(double omega) const {
  PulseSpec p;
  p.amplitude = amplitude;
  p.omega = omega;
  p.sigma = sigma_periods * 2.0 * std::numbers::pi / omega;
  p.mu = mu_sigmas * p.sigma;
  p.phi = 0.0;
  p.validate();
  return p;
}

double pulse_value(double t, const PulseSpec& s) {
  const double z = (t - s.mu) / s.sigma;
  return s.amplitude / (s.sigma * std::sqrt(2.0 * std::numbers::pi)) * std::exp(-0.5 * z * z) *
         std::sin(s.omega * t + s.phi);
}

double pulse_end(const PulseSpec& spec) { return spec.mu + 6.0 * spec.sigma; }

std::vector<PortExcitation> state_excitations(std::span<const std::complex<double>> column) {
  std::vector<PortExcitation> out;
  for (std::size_t k = 0; k < column.size(); ++k) {
    if (column[k] != std::complex<double>{}) out.push_back({static_cast<int>(k), column[k]});
  }
  return out;
}

void check_normalized(std::span<const PortExcitation> excitations, double tol) {
  double norm = 0.0;
  for (const PortExcitation& e : excitations) norm += std::norm(e.coefficient);
  if (std::abs(norm - 1.0) > tol) {
    std::ostringstream os;
    os << "input state is not normalised: sum |c|^2 = " << norm;
    throw ConfigError(os.str());
  }
}

PulseSpec port_pulse(const PulseSpec& base, std::complex<double> coefficient) {
  PulseSpec p = base;
  p.amplitude = base.amplitude * std::abs(coefficient);
  p.phi = std::fmod(base.phi + std::arg(coefficient), 2.0 * std::numbers::pi);
  return p;
}

std::vector<SourceTerm> excite(const YeeGrid& grid, const DeviceLayout& layout,
                               std::span<const PortExcitation> excitations, const PulseSpec& base, double t) {
  base.validate();
  const DomainFrame frame = DomainFrame::make(layout, grid.cell_size_nm());
  if (frame.nx != grid.nx() || frame.ny != grid.ny()) throw ShapeError("excite: grid does not match the layout");
  std::vector<SourceTerm> out;
  for (const PortExcitation& e : excitations) {
    SourceTerm term;
    term.port_index = e.port_index;
    term.cells = frame.source_cells(e.port_index);
    term.value = pulse_value(t, port_pulse(base, e.coefficient));
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<DrivenSource> port_sources(const DomainFrame& frame, std::span<const PortExcitation> excitations,
                                       const PulseSpec& base) {
  base.validate();
  std::vector<DrivenSource> out;
  for (const PortExcitation& e : excitations) {
    DrivenSource s;
    s.cells = frame.source_cells(e.port_index);
    const PulseSpec p = port_pulse(base, e.coefficient);
    s.waveform = [p](double t) { return pulse_value(t, p); };
    out.push_back(std::move(s));
  }
  return out;
}

std::int64_t auto_total_steps(const SimulationConfig& sim, const PulseSpec& pulse, const DomainFrame& frame) {
  const double transit = frame.nx * sim.dx() * std::sqrt(std::max(sim.eps_silicon, sim.eps_background));
  const double t_total = pulse_end(pulse) + 3.0 * transit;
  return static_cast<std::int64_t>(std::ceil(t_total / sim.dt()));
}

}  // namespace pforge
