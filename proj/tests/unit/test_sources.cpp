#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "photonic_forge/errors.hpp"
#include "photonic_forge/gates.hpp"
#include "photonic_forge/sources.hpp"

using namespace pforge;
using std::numbers::pi;

namespace {

PulseSpec unit_pulse(double phi) {
  PulseSpec p;
  p.amplitude = 1.0;
  p.mu = 0.0;
  p.sigma = 1.0;
  p.omega = 3.0;
  p.phi = phi;
  return p;
}

struct Rig {
  DeviceLayout layout = DeviceLayout::equally_spaced(4, 2000.0, 2000.0, 250.0);
  SimulationConfig sim;
  YeeGrid grid;
  Rig() {
    layout.lead_length_nm = 500.0;
    sim.cell_size_nm = 25.0;
    const DomainFrame f = DomainFrame::make(layout, sim.cell_size_nm);
    grid = build_grid(Array2D<double>(f.nx, f.ny, 1.0), sim);
  }
};

}  // namespace

TEST(Pulse, PeakOfTheEnvelopeAtQuarterPhase) {
  EXPECT_NEAR(pulse_value(0.0, unit_pulse(pi / 2)), 0.3989422804014327, 1e-15);
  EXPECT_NEAR(pulse_value(0.0, unit_pulse(pi / 2)), 1.0 / std::sqrt(2.0 * pi), 1e-15);
}

TEST(Pulse, ZeroPhaseVanishesAtTheOrigin) { EXPECT_EQ(pulse_value(0.0, unit_pulse(0.0)), 0.0); }

TEST(Pulse, MatchesTheClosedForm) {
  PulseSpec p{2.5, 4.0, 1.5, 7.0, 0.3};
  for (double t : {0.0, 1.0, 3.9, 4.0, 6.25, 11.0}) {
    const double z = (t - 4.0) / 1.5;
    const double want = 2.5 / (1.5 * std::sqrt(2.0 * pi)) * std::exp(-0.5 * z * z) * std::sin(7.0 * t + 0.3);
    EXPECT_NEAR(pulse_value(t, p), want, 1e-15) << t;
  }
}

TEST(Pulse, PhaseShiftByPiNegates) {
  const PulseSpec a{1.0, 2.0, 0.7, 5.0, 0.4};
  PulseSpec b = a;
  b.phi += pi;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.05 * k;
    EXPECT_NEAR(pulse_value(t, b), -pulse_value(t, a), 1e-15) << t;
  }
}

TEST(Pulse, EnvelopeIsNegligibleBeyondSixSigma) {
  const PulseSpec p{1.0, 10.0, 1.3, 9.0, 0.2};
  const double peak = p.amplitude / (p.sigma * std::sqrt(2.0 * pi));
  for (double dt : {6.01, 6.5, 8.0, 20.0}) {
    const double bound = std::exp(-0.5 * dt * dt) * peak;
    EXPECT_LE(std::abs(pulse_value(p.mu + dt * p.sigma, p)), bound * (1 + 1e-12));
    EXPECT_LE(std::abs(pulse_value(p.mu - dt * p.sigma, p)), bound * (1 + 1e-12));
    EXPECT_LT(bound, 1.6e-8 * peak);
  }
  EXPECT_DOUBLE_EQ(pulse_end(p), 10.0 + 6.0 * 1.3);
}

TEST(Pulse, DefaultShapeIsTenPeriodsCentredAtSixSigma) {
  const double omega = 2.0 * pi / 0.65;
  const PulseSpec p = PulseShape{}.at(omega);
  EXPECT_DOUBLE_EQ(p.sigma, 10.0 * 0.65);
  EXPECT_DOUBLE_EQ(p.mu, 6.0 * p.sigma);
  EXPECT_EQ(p.amplitude, 1.0);
  EXPECT_EQ(p.phi, 0.0);
}

TEST(Pulse, InvalidSpecsAreRejected) {
  PulseSpec p = unit_pulse(0.0);
  p.sigma = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = unit_pulse(0.0);
  p.omega = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Excite, BasisStateDrivesOnlyItsPort) {
  Rig r;
  const PortExcitation e{0, {1.0, 0.0}};
  const PulseSpec base = unit_pulse(pi / 2);
  const auto terms = excite(r.grid, r.layout, std::span(&e, 1), base, 0.0);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].port_index, 0);
  EXPECT_DOUBLE_EQ(terms[0].value, pulse_value(0.0, base));
  const DomainFrame f = DomainFrame::make(r.layout, 25.0);
  EXPECT_EQ(terms[0].cells, f.source_cells(0));
  EXPECT_EQ(terms[0].cells.size(), static_cast<std::size_t>(f.port_cells));
}

TEST(Excite, SourceLineSpansTheWaveguideCrossSection) {
  Rig r;
  const DomainFrame f = DomainFrame::make(r.layout, 25.0);
  for (int k = 0; k < 4; ++k) {
    const auto cells = f.source_cells(k);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      EXPECT_EQ(static_cast<int>(cells[c] % static_cast<std::size_t>(f.nx)), f.source_column());
      EXPECT_EQ(static_cast<int>(cells[c] / static_cast<std::size_t>(f.nx)), f.input_row0[k] + static_cast<int>(c));
    }
  }
}

TEST(Excite, NegativeCoefficientShiftsPhaseByPi) {
  Rig r;
  const auto col = hadamard().column(1);
  const auto ex = state_excitations(col);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_NO_THROW(check_normalized(ex));
  const PulseSpec base = unit_pulse(0.3);
  EXPECT_NEAR(port_pulse(base, ex[1].coefficient).phi, 0.3 + pi, 1e-15);
  EXPECT_NEAR(port_pulse(base, ex[1].coefficient).amplitude, 1.0 / std::sqrt(2.0), 1e-15);
  for (double t : {0.1, 0.7, 1.9}) {
    const auto terms = excite(r.grid, r.layout, ex, base, t);
    EXPECT_NEAR(terms[1].value, -terms[0].value, 1e-15);
    EXPECT_NEAR(terms[0].value, pulse_value(t, base) / std::sqrt(2.0), 1e-15);
  }
}

TEST(Excite, FourierColumnsGiveQuarterTurnPhases) {
  const UnitarySpec f4 = fourier(4);
  const PulseSpec base = unit_pulse(0.0);
  for (int k = 0; k < 4; ++k) {
    const auto ex = state_excitations(f4.column(k));
    ASSERT_EQ(ex.size(), 4u);
    for (int j = 0; j < 4; ++j) {
      const PulseSpec p = port_pulse(base, ex[j].coefficient);
      EXPECT_NEAR(p.amplitude, 0.5, 1e-15);
      const double want = std::remainder(2.0 * pi * j * k / 4.0, 2.0 * pi);
      EXPECT_NEAR(std::remainder(p.phi - want, 2.0 * pi), 0.0, 1e-12) << j << "," << k;
    }
  }
}

TEST(Excite, LinearInTheCoefficients) {
  Rig r;
  const PulseSpec base = unit_pulse(0.0);
  const PortExcitation a{2, {0.6, 0.0}}, b{2, {0.8, 0.0}}, ab{2, {1.4, 0.0}};
  for (double t : {0.2, 0.9, 1.6}) {
    const double va = excite(r.grid, r.layout, std::span(&a, 1), base, t)[0].value;
    const double vb = excite(r.grid, r.layout, std::span(&b, 1), base, t)[0].value;
    const double vab = excite(r.grid, r.layout, std::span(&ab, 1), base, t)[0].value;
    EXPECT_NEAR(vab, va + vb, 1e-15);
  }
}

TEST(Excite, GlobalPhaseShiftsEveryPortEqually) {
  const auto col = hadamard().column(0);
  const auto ex = state_excitations(col);
  const PulseSpec base = unit_pulse(0.0);
  const std::complex<double> g = std::polar(1.0, 0.9);
  for (const PortExcitation& e : ex) {
    const double d = port_pulse(base, e.coefficient * g).phi - port_pulse(base, e.coefficient).phi;
    EXPECT_NEAR(std::remainder(d - 0.9, 2.0 * pi), 0.0, 1e-12);
  }
}

TEST(Excite, UnknownPortAndUnnormalisedStatesAreErrors) {
  Rig r;
  const PortExcitation bad{4, {1.0, 0.0}};
  EXPECT_THROW(excite(r.grid, r.layout, std::span(&bad, 1), unit_pulse(0.0), 0.0), ConfigError);
  const std::vector<PortExcitation> half{{0, {0.5, 0.0}}, {1, {0.5, 0.0}}};
  EXPECT_THROW(check_normalized(half), ConfigError);
}

TEST(Excite, PortSourcesMatchExcite) {
  Rig r;
  const DomainFrame f = DomainFrame::make(r.layout, 25.0);
  const auto ex = state_excitations(fourier(4).column(3));
  const PulseSpec base = unit_pulse(0.2);
  const auto driven = port_sources(f, ex, base);
  ASSERT_EQ(driven.size(), 4u);
  for (double t : {0.3, 1.1}) {
    const auto terms = excite(r.grid, r.layout, ex, base, t);
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_EQ(driven[k].cells, terms[k].cells);
      EXPECT_EQ(driven[k].waveform(t), terms[k].value);
    }
  }
}

TEST(Timing, AutoStepsCoverThePulseAndThreeTransits) {
  Rig r;
  const DomainFrame f = DomainFrame::make(r.layout, 25.0);
  const PulseSpec p = PulseShape{}.at(r.sim.omega());
  const std::int64_t n = auto_total_steps(r.sim, p, f);
  const double need = pulse_end(p) + 3.0 * f.nx * r.sim.dx() * std::sqrt(11.7);
  EXPECT_GE(static_cast<double>(n) * r.sim.dt(), need);
  EXPECT_LT(static_cast<double>(n - 1) * r.sim.dt(), need);
}
