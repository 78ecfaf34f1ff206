#include "photonic_forge/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "photonic_forge/errors.hpp"
#include "photonic_forge/parallel.hpp"

namespace pforge {

std::int64_t SimulationSetup::steps() const {
  return sim.total_steps > 0 ? sim.total_steps : auto_total_steps(sim, pulse_spec(), frame());
}

SimulationSetup SimulationSetup::at_wavelength(double wavelength_nm) const {
  SimulationSetup s = *this;
  s.sim.wavelength_nm = wavelength_nm;
  return s;
}

FieldRecord simulate_device(const PermittivityMap& device, const SimulationSetup& setup,
                            std::span<const PortExcitation> excitations) {
  const DomainFrame& frame = device.frame;
  if (frame.nx != device.eps.nx() || frame.ny != device.eps.ny())
    throw ShapeError("simulate_device: permittivity map does not match its frame");
  const int pml = setup.sim.boundary.kind == BoundaryKind::PML ? setup.sim.boundary.pml_thickness : 0;
  if (frame.pad_cells < pml + 2)
    throw ConfigError("padding must exceed the absorbing layer by at least 2 cells");
  YeeGrid grid = build_grid(device.eps, setup.sim);
  const std::vector<DrivenSource> sources = port_sources(frame, excitations, setup.pulse_spec());
  const std::vector<CellRect> regions = frame.output_record_regions();
  return run(grid, sources, regions, setup.steps(), setup.sim.record_stride);
}

std::vector<Array2D<double>> capture_ez(const PermittivityMap& device, const SimulationSetup& setup,
                                        std::span<const PortExcitation> excitations,
                                        std::span<const std::int64_t> at_steps) {
  if (!std::is_sorted(at_steps.begin(), at_steps.end())) throw ConfigError("capture_ez: steps must be ascending");
  YeeGrid grid = build_grid(device.eps, setup.sim);
  const std::vector<DrivenSource> sources = port_sources(device.frame, excitations, setup.pulse_spec());
  std::vector<ActiveSource> active(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) active[s].cells = sources[s].cells;
  std::vector<Array2D<double>> out;
  for (std::int64_t target : at_steps) {
    while (grid.time_step_index() < target) {
      const double t = static_cast<double>(grid.time_step_index() + 1) * grid.dt();
      for (std::size_t s = 0; s < sources.size(); ++s) active[s].value = sources[s].waveform(t);
      step(grid, active);
    }
    out.push_back(grid.ez());
  }
  return out;
}

std::int64_t output_peak_step(const FieldRecord& record, int stride) {
  double best = -1.0;
  std::size_t best_sample = 0;
  for (std::size_t s = 0; s < record.samples; ++s) {
    double e = 0.0;
    for (std::size_t c = 0; c < record.cells; ++c) {
      const double v = record.ez_t[s * record.cells + c];
      e += v * v;
    }
    if (e > best) {
      best = e;
      best_sample = s;
    }
  }
  return static_cast<std::int64_t>(best_sample + 1) * stride;
}

std::string target_key(const SimulationSetup& setup, const UnitarySpec& gate) {
  std::ostringstream os;
  os << std::setprecision(17);
  const SimulationConfig& s = setup.sim;
  os << "sim " << s.wavelength_nm << ' ' << s.scale_a_nm << ' ' << s.cell_size_nm << ' ' << s.courant << ' '
     << setup.steps() << ' ' << s.record_stride << ' ' << s.eps_background << ' ' << s.eps_silicon << '\n';
  os << "boundary " << static_cast<int>(s.boundary.kind) << ' ' << s.boundary.pml_thickness << ' '
     << s.boundary.pml_sigma_max << ' ' << s.boundary.pml_order << ' ' << s.boundary.pml_reflection << '\n';
  const DeviceLayout& l = setup.layout;
  os << "layout " << l.design_width_nm << ' ' << l.design_height_nm << ' ' << l.n_modes << ' ' << l.port_width_nm
     << ' ' << l.lead_length_nm << ' ' << l.padding_nm;
  for (const PortSpec& p : l.input_ports) os << " i" << p.center_offset_nm;
  for (const PortSpec& p : l.output_ports) os << " o" << p.center_offset_nm;
  os << '\n';
  os << "pulse " << setup.pulse.amplitude << ' ' << setup.pulse.sigma_periods << ' ' << setup.pulse.mu_sigmas << '\n';
  os << "gate " << gate.n();
  for (int r = 0; r < gate.n(); ++r) {
    for (int c = 0; c < gate.n(); ++c) os << ' ' << gate(r, c).real() << ' ' << gate(r, c).imag();
  }
  os << '\n';
  return os.str();
}

std::vector<FieldRecord> make_targets(const SimulationSetup& setup, const UnitarySpec& gate, int workers) {
  if (gate.n() != setup.layout.n_modes) {
    throw ConfigError("gate acts on " + std::to_string(gate.n()) + " modes but the layout has " +
                      std::to_string(setup.layout.n_modes));
  }
  const PermittivityMap reference = identity_layout(setup.layout, setup.sim.cell_size_nm, setup.materials());
  std::vector<FieldRecord> targets(static_cast<std::size_t>(gate.n()));
  parallel_for(targets.size(), workers, [&](std::size_t k) {
    const std::vector<Complex> column = gate.column(static_cast<int>(k));
    const std::vector<PortExcitation> exc = state_excitations(column);
    check_normalized(exc);
    targets[k] = simulate_device(reference, setup, exc);
  });
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (!(inner_product(targets[k], targets[k]) > 0.0))
      throw ConfigError("target for input " + std::to_string(k) + " has zero norm: no light reached the outputs");
  }
  return targets;
}

const std::vector<FieldRecord>& TargetMemo::get(const SimulationSetup& setup, const UnitarySpec& gate, int workers) {
  const std::string key = target_key(setup, gate);
  {
    std::lock_guard lock(mutex_);
    auto it = records_.find(key);
    if (it != records_.end()) return it->second;
  }
  std::vector<FieldRecord> fresh = make_targets(setup, gate, workers);
  std::lock_guard lock(mutex_);
  return records_.try_emplace(key, std::move(fresh)).first->second;
}

std::size_t TargetMemo::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

DeviceEvaluator::DeviceEvaluator(SimulationSetup setup, UnitarySpec gate, std::vector<FieldRecord> targets,
                                 int workers)
    : setup_(std::move(setup)), gate_(std::move(gate)), targets_(std::move(targets)), workers_(std::max(workers, 1)) {
  if (static_cast<int>(targets_.size()) != gate_.n())
    throw ConfigError("evaluator: need one target record per gate column");
  if (gate_.n() != setup_.layout.n_modes) throw ConfigError("evaluator: gate size does not match the layout");
}

std::vector<FieldRecord> DeviceEvaluator::simulate_basis(const PermittivityMap& device) const {
  std::vector<FieldRecord> tests(targets_.size());
  parallel_for(tests.size(), workers_, [&](std::size_t k) {
    const PortExcitation basis{static_cast<int>(k), Complex(1.0, 0.0)};
    tests[k] = simulate_device(device, setup_, std::span(&basis, 1));
  });
  return tests;
}

FidelityReport DeviceEvaluator::evaluate(const PermittivityMap& device) const {
  const std::vector<FieldRecord> tests = simulate_basis(device);
  return gate_fidelity(targets_, tests);
}

FidelityReport DeviceEvaluator::evaluate(const PixelMap& pm) const {
  return evaluate(rasterize(setup_.layout, pm, setup_.sim.cell_size_nm, setup_.materials()));
}

double evaluate(const PixelMap& pm, const SimulationSetup& setup, const UnitarySpec& gate,
                std::span<const FieldRecord> targets, int workers) {
  DeviceEvaluator ev(setup, gate, std::vector<FieldRecord>(targets.begin(), targets.end()), workers);
  return ev.evaluate(pm).aggregate;
}

}  // namespace pforge
