#pragma once

// 2D TE finite-difference time-domain solver (Ez, Bx, By) on a Yee grid.
//
// Units are normalised: c = 1, lengths in units of the scale a (default
// 1 um), time in units of a/c. B is rescaled so that the vacuum impedance
// is 1, which makes the update equations symmetric:
//
//   dBx/dt = -dEz/dy
//   dBy/dt =  dEz/dx
//   dEz/dt = (dBy/dx - dBx/dy) / eps
//
// Staggering convention (fixed for the whole project):
//   ez(i, j) lives at the cell centre (i, j),          shape nx x ny
//   bx(i, j) lives at (i, j + 1/2),                     shape nx x (ny - 1)
//   by(i, j) lives at (i + 1/2, j),                     shape (nx - 1) x ny
// E is stored at integer time steps, B at half steps; each step updates
// B first and then E.
//
// The outer ring of ez cells is held at zero (perfect electric conductor).
// With BoundaryKind::PML a split-field absorbing layer is placed on the
// innermost pml_thickness cells of every edge, backed by that conductor.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "photonic_forge/array2d.hpp"

namespace pforge {

enum class BoundaryKind { PML, PEC };

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::PML;
  int pml_thickness = 10;
  /// Peak absorption rate (1/time). Zero selects the value that gives the
  /// target normal-incidence reflection `pml_reflection`.
  double pml_sigma_max = 0.0;
  double pml_order = 3.0;
  double pml_reflection = 1e-6;
};

struct SimulationConfig {
  double wavelength_nm = 650.0;
  double scale_a_nm = 1000.0;
  double cell_size_nm = 12.5;
  double courant = 0.5;
  /// Zero means "derive from the pulse timing and the domain size".
  std::int64_t total_steps = 0;
  BoundarySpec boundary;
  double eps_background = 1.0;
  double eps_silicon = 11.7;
  /// Record every k-th step. 1 records every step.
  int record_stride = 1;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  double dx() const noexcept { return cell_size_nm / scale_a_nm; }
  double dt() const noexcept { return courant * dx(); }
  double wavelength() const noexcept { return wavelength_nm / scale_a_nm; }
  double omega() const noexcept;
};

/// Peak PML absorption rate for a polynomial profile of the given order
/// and thickness (normalised length) reaching reflection `r0` at normal
/// incidence.
double pml_sigma_for_reflection(double r0, double order, double thickness);

/// Half-open cell rectangle [i0, i1) x [j0, j1).
struct CellRect {
  int i0 = 0;
  int j0 = 0;
  int i1 = 0;
  int j1 = 0;

  int width() const noexcept { return i1 - i0; }
  int height() const noexcept { return j1 - j0; }
  int cells() const noexcept { return width() * height(); }
  bool operator==(const CellRect&) const = default;
};

class YeeGrid {
 public:
  YeeGrid() = default;

  int nx() const noexcept { return ez_.nx(); }
  int ny() const noexcept { return ez_.ny(); }
  double dx() const noexcept { return dx_; }
  double dt() const noexcept { return dt_; }
  double cell_size_nm() const noexcept { return cell_size_nm_; }
  std::int64_t time_step_index() const noexcept { return step_; }
  double time() const noexcept { return static_cast<double>(step_) * dt_; }
  const BoundarySpec& boundary() const noexcept { return boundary_; }

  const Array2D<double>& ez() const noexcept { return ez_; }
  const Array2D<double>& bx() const noexcept { return bx_; }
  const Array2D<double>& by() const noexcept { return by_; }
  const Array2D<double>& eps() const noexcept { return eps_; }

  /// Direct field access for initial conditions in tests and tools.
  /// Writing into an absorbing layer leaves the split parts inconsistent;
  /// only the interior should be initialised this way.
  Array2D<double>& mutable_ez() noexcept { return ez_; }
  Array2D<double>& mutable_bx() noexcept { return bx_; }
  Array2D<double>& mutable_by() noexcept { return by_; }

  /// True when cell (i, j) lies in the absorbing layer.
  bool in_pml(int i, int j) const noexcept;

 private:
  friend YeeGrid build_grid(const Array2D<double>&, const SimulationConfig&);
  friend struct StepKernel;

  double dx_ = 0.0;
  double dt_ = 0.0;
  double cell_size_nm_ = 0.0;
  std::int64_t step_ = 0;
  BoundarySpec boundary_;
  int pml_ = 0;

  Array2D<double> ez_, bx_, by_, eps_;
  Array2D<double> ezx_, ezy_;  // split parts of ez, meaningful inside the PML only
  Array2D<double> inv_eps_;

  // Per-axis decay/gain factors. *_e at ez positions, *_b at B positions.
  std::vector<double> ax_e_, cx_e_, ay_e_, cy_e_;
  std::vector<double> ax_b_, cx_b_, ay_b_, cy_b_;
};

/// Builds a zero-field grid over a full-domain permittivity array.
/// Throws ConfigError for an invalid config or a domain too small for the
/// absorbing layer.
YeeGrid build_grid(const Array2D<double>& eps, const SimulationConfig& config);

/// A soft source value for one step: `value` is added to ez at every cell.
struct ActiveSource {
  std::span<const std::size_t> cells;  // flat ez indices
  double value = 0.0;
};

/// Time-dependent soft source: waveform(t) is added to ez at every cell.
struct DrivenSource {
  std::vector<std::size_t> cells;
  std::function<double(double)> waveform;
};

/// Advances the grid by one step. Sources are added to ez after the E
/// update, i.e. at time (index + 1) * dt. Throws DivergenceError when a
/// non-finite value appears.
void step(YeeGrid& grid, std::span<const ActiveSource> sources);

/// Recorded time series of ez/bx/by over a set of cell rectangles. Sample
/// s of cell c is stored at [s * cells + c]; cells are enumerated region by
/// region, row-major inside each region. bx/by are taken at their staggered
/// positions with the same (i, j) index as the cell.
struct FieldRecord {
  std::vector<CellRect> regions;
  std::size_t cells = 0;
  std::size_t samples = 0;
  double dt = 0.0;  // time between samples
  std::vector<double> ez_t, bx_t, by_t;

  bool same_shape(const FieldRecord& other) const noexcept {
    return regions == other.regions && cells == other.cells && samples == other.samples;
  }
  bool operator==(const FieldRecord&) const = default;
};

/// Steps the grid `steps` times, recording every `stride`-th step (the
/// samples are taken after steps stride, 2*stride, ...).
FieldRecord run(YeeGrid& grid, std::span<const DrivenSource> sources,
                std::span<const CellRect> regions, std::int64_t steps, int stride = 1);

/// Discrete electromagnetic energy sum(eps*ez^2 + bx^2 + by^2) / 2.
/// Uses ez and B at times half a step apart, so it oscillates at first
/// order in omega * dt even when nothing is lost.
double energy(const YeeGrid& grid);

/// Time-centred energy sum(eps ez_before ez + bx^2 + by^2) / 2, where
/// ez_before is ez from just before the last step. In a lossless closed
/// box it is conserved to rounding once sources are off.
double energy(const YeeGrid& grid, const Array2D<double>& ez_before);

}  // namespace pforge
