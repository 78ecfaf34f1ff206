#pragma once

// Small FDTD problems that run in a fraction of a second.

#include "photonic_forge/evaluation.hpp"

namespace tiny {

/// 1.2 um square design, ports 600 nm apart, short pulse, 25 nm cells.
inline pforge::SimulationSetup setup(int n_modes = 2, double size_nm = 1200.0) {
  pforge::SimulationSetup s;
  s.sim.cell_size_nm = 25.0;
  s.layout = pforge::DeviceLayout::equally_spaced(n_modes, size_nm, size_nm);
  s.layout.lead_length_nm = 400.0;
  s.layout.padding_nm = 300.0;
  s.pulse.sigma_periods = 3.0;
  return s;
}

}  // namespace tiny
