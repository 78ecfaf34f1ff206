#include "photonic_forge/fdtd.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

// Full scans for non-finite values run this often; recorded samples are
// checked every time they are taken.
constexpr std::int64_t kDivergenceScanInterval = 64;

struct AxisProfile {
  std::vector<double> a_e, c_e, a_b, c_b;
};

// Exponential time-stepping factors along one axis with n ez positions.
// E sits at integer positions p = i, B at p = i + 1/2 (n - 1 of them).
AxisProfile make_axis(int n, int pml, double sigma_max, double order, double dx, double dt) {
  AxisProfile prof;
  prof.a_e.resize(n);
  prof.c_e.resize(n);
  prof.a_b.resize(n - 1);
  prof.c_b.resize(n - 1);

  auto depth = [&](double p) {
    if (pml == 0) return 0.0;
    const double inner_left = pml;
    const double inner_right = n - 1 - pml;
    if (p < inner_left) return (inner_left - p) / pml;
    if (p > inner_right) return (p - inner_right) / pml;
    return 0.0;
  };
  auto coefficients = [&](double p, double& a, double& c) {
    const double sigma = sigma_max * std::pow(depth(p), order);
    if (sigma > 0.0) {
      a = std::exp(-sigma * dt);
      c = (1.0 - a) / (sigma * dx);
    } else {
      a = 1.0;
      c = dt / dx;
    }
  };
  for (int i = 0; i < n; ++i) coefficients(i, prof.a_e[i], prof.c_e[i]);
  for (int i = 0; i + 1 < n; ++i) coefficients(i + 0.5, prof.a_b[i], prof.c_b[i]);
  return prof;
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void SimulationConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("simulation config: " + msg); };
  if (!(wavelength_nm > 0.0)) fail("wavelength must be positive");
  if (!(scale_a_nm > 0.0)) fail("scale_a must be positive");
  if (!(cell_size_nm > 0.0)) fail("cell_size must be positive");
  if (!(courant > 0.0) || courant > 1.0 / std::numbers::sqrt2) {
    std::ostringstream os;
    os << "courant factor " << courant << " outside (0, 1/sqrt(2)]";
    fail(os.str());
  }
  if (total_steps < 0) fail("total_steps must be positive (or 0 for automatic)");
  if (record_stride < 1) fail("record_stride must be >= 1");
  if (!(eps_background > 0.0) || !(eps_silicon > 0.0)) fail("permittivities must be positive");
  if (boundary.kind == BoundaryKind::PML) {
    if (boundary.pml_thickness < 4) fail("pml_thickness must be >= 4 cells");
    if (boundary.pml_order < 0.0) fail("pml_order must be non-negative");
    if (boundary.pml_sigma_max < 0.0) fail("pml_sigma_max must be non-negative");
    if (!(boundary.pml_reflection > 0.0 && boundary.pml_reflection < 1.0))
      fail("pml_reflection must lie in (0, 1)");
  }
}

double SimulationConfig::omega() const noexcept { return 2.0 * std::numbers::pi / wavelength(); }

double pml_sigma_for_reflection(double r0, double order, double thickness) {
  // Normal incidence in vacuum: R = exp(-2 * integral(sigma) dx), and the
  // polynomial profile integrates to sigma_max * d / (order + 1).
  return -(order + 1.0) * std::log(r0) / (2.0 * thickness);
}

bool YeeGrid::in_pml(int i, int j) const noexcept {
  if (pml_ == 0) return false;
  return i < pml_ || j < pml_ || i > nx() - 1 - pml_ || j > ny() - 1 - pml_;
}

YeeGrid build_grid(const Array2D<double>& eps, const SimulationConfig& config) {
  config.validate();
  const int nx = eps.nx();
  const int ny = eps.ny();
  const int pml = config.boundary.kind == BoundaryKind::PML ? config.boundary.pml_thickness : 0;
  if (nx < 2 * pml + 3 || ny < 2 * pml + 3) {
    std::ostringstream os;
    os << "domain " << nx << "x" << ny << " cells too small for a " << pml << "-cell absorbing layer";
    throw ConfigError(os.str());
  }
  for (double e : eps.flat()) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("permittivity map contains a non-positive value");
  }

  YeeGrid g;
  g.dx_ = config.dx();
  g.dt_ = config.dt();
  g.cell_size_nm_ = config.cell_size_nm;
  g.boundary_ = config.boundary;
  g.pml_ = pml;
  g.ez_ = Array2D<double>(nx, ny);
  g.ezx_ = Array2D<double>(nx, ny);
  g.ezy_ = Array2D<double>(nx, ny);
  g.bx_ = Array2D<double>(nx, ny - 1);
  g.by_ = Array2D<double>(nx - 1, ny);
  g.eps_ = eps;
  g.inv_eps_ = Array2D<double>(nx, ny);
  for (std::size_t k = 0; k < eps.size(); ++k) g.inv_eps_.flat()[k] = 1.0 / eps.flat()[k];

  double sigma_max = 0.0;
  if (pml > 0) {
    sigma_max = config.boundary.pml_sigma_max > 0.0
                    ? config.boundary.pml_sigma_max
                    : pml_sigma_for_reflection(config.boundary.pml_reflection, config.boundary.pml_order,
                                               pml * g.dx_);
  }
  const double order = config.boundary.pml_order;
  AxisProfile px = make_axis(nx, pml, sigma_max, order, g.dx_, g.dt_);
  AxisProfile py = make_axis(ny, pml, sigma_max, order, g.dx_, g.dt_);
  g.ax_e_ = std::move(px.a_e);
  g.cx_e_ = std::move(px.c_e);
  g.ax_b_ = std::move(px.a_b);
  g.cx_b_ = std::move(px.c_b);
  g.ay_e_ = std::move(py.a_e);
  g.cy_e_ = std::move(py.c_e);
  g.ay_b_ = std::move(py.a_b);
  g.cy_b_ = std::move(py.c_b);
  return g;
}

struct StepKernel {
  static void update_bx_row(YeeGrid& g, int j) {
    const int nx = g.nx();
    const double a = g.ay_b_[j];
    const double c = g.cy_b_[j];
    double* __restrict bx = g.bx_.row(j);
    const double* __restrict e0 = g.ez_.row(j);
    const double* __restrict e1 = g.ez_.row(j + 1);
    for (int i = 0; i < nx; ++i) bx[i] = a * bx[i] - c * (e1[i] - e0[i]);
  }

  static void update_by_row(YeeGrid& g, int j) {
    const int nx = g.nx();
    const double* __restrict ax = g.ax_b_.data();
    const double* __restrict cx = g.cx_b_.data();
    double* __restrict by = g.by_.row(j);
    const double* __restrict e = g.ez_.row(j);
    for (int i = 0; i + 1 < nx; ++i) by[i] = ax[i] * by[i] + cx[i] * (e[i + 1] - e[i]);
  }

  // Split update on [i_begin, i_end) of row j.
  static void update_e_split(YeeGrid& g, int j, int i_begin, int i_end) {
    const double ay = g.ay_e_[j];
    const double cy = g.cy_e_[j];
    double* __restrict ez = g.ez_.row(j);
    double* __restrict ezx = g.ezx_.row(j);
    double* __restrict ezy = g.ezy_.row(j);
    const double* __restrict inv = g.inv_eps_.row(j);
    const double* __restrict by = g.by_.row(j);
    const double* __restrict bx0 = g.bx_.row(j - 1);
    const double* __restrict bx1 = g.bx_.row(j);
    const double* __restrict ax = g.ax_e_.data();
    const double* __restrict cx = g.cx_e_.data();
    for (int i = i_begin; i < i_end; ++i) {
      const double x = ax[i] * ezx[i] + cx[i] * inv[i] * (by[i] - by[i - 1]);
      const double y = ay * ezy[i] - cy * inv[i] * (bx1[i] - bx0[i]);
      ezx[i] = x;
      ezy[i] = y;
      ez[i] = x + y;
    }
  }

  static void update_e_plain(YeeGrid& g, int j, int i_begin, int i_end) {
    const double c = g.dt_ / g.dx_;
    double* __restrict ez = g.ez_.row(j);
    const double* __restrict inv = g.inv_eps_.row(j);
    const double* __restrict by = g.by_.row(j);
    const double* __restrict bx0 = g.bx_.row(j - 1);
    const double* __restrict bx1 = g.bx_.row(j);
    for (int i = i_begin; i < i_end; ++i) {
      ez[i] += c * inv[i] * ((by[i] - by[i - 1]) - (bx1[i] - bx0[i]));
    }
  }

  static void update_e_row(YeeGrid& g, int j) {
    const int nx = g.nx();
    const int ny = g.ny();
    const int p = g.pml_;
    const bool pml_row = p > 0 && (j < p || j > ny - 1 - p);
    if (pml_row) {
      update_e_split(g, j, 1, nx - 1);
    } else if (p > 0) {
      update_e_split(g, j, 1, p);
      update_e_plain(g, j, p, nx - p);
      update_e_split(g, j, nx - p, nx - 1);
    } else {
      update_e_plain(g, j, 1, nx - 1);
    }
  }

  // One leapfrog step in a single sweep over rows. Row j of ez only needs
  // bx rows j-1, j and by row j, and bx row j only needs the old ez rows
  // j, j+1, so B and E can be advanced row by row while the rows are hot.
  static void update_fields(YeeGrid& g) {
    const int ny = g.ny();
    update_bx_row(g, 0);
    update_by_row(g, 0);
    for (int j = 1; j + 1 < ny; ++j) {
      update_bx_row(g, j);
      update_by_row(g, j);
      update_e_row(g, j);
    }
    update_by_row(g, ny - 1);
  }

  static void add_sources(YeeGrid& g, std::span<const ActiveSource> sources) {
    auto ez = g.ez_.flat();
    auto ezx = g.ezx_.flat();
    for (const ActiveSource& s : sources) {
      for (std::size_t k : s.cells) {
        ez[k] += s.value;
        ezx[k] += s.value;
      }
    }
  }

  static void advance(YeeGrid& g, std::span<const ActiveSource> sources) {
    update_fields(g);
    add_sources(g, sources);
    ++g.step_;
    if (g.step_ % kDivergenceScanInterval == 0) {
      if (!all_finite(g.ez_.flat()) || !all_finite(g.bx_.flat()) || !all_finite(g.by_.flat()))
        throw DivergenceError(g.step_, "non-finite value in fields");
    }
  }
};

void step(YeeGrid& grid, std::span<const ActiveSource> sources) { StepKernel::advance(grid, sources); }

FieldRecord run(YeeGrid& grid, std::span<const DrivenSource> sources, std::span<const CellRect> regions,
                std::int64_t steps, int stride) {
  if (steps < 0) throw ConfigError("run: negative step count");
  if (stride < 1) throw ConfigError("run: stride must be >= 1");

  FieldRecord rec;
  rec.regions.assign(regions.begin(), regions.end());
  rec.dt = grid.dt() * stride;
  for (const CellRect& r : regions) {
    if (r.i0 < 0 || r.j0 < 0 || r.i1 > grid.nx() - 1 || r.j1 > grid.ny() - 1 || r.i0 >= r.i1 || r.j0 >= r.j1)
      throw ConfigError("run: record region outside the grid interior");
    rec.cells += static_cast<std::size_t>(r.cells());
  }
  rec.samples = static_cast<std::size_t>(steps / stride);
  rec.ez_t.reserve(rec.cells * rec.samples);
  rec.bx_t.reserve(rec.cells * rec.samples);
  rec.by_t.reserve(rec.cells * rec.samples);

  std::vector<ActiveSource> active(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) active[s].cells = sources[s].cells;

  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(grid.time_step_index() + 1) * grid.dt();
    for (std::size_t s = 0; s < sources.size(); ++s) active[s].value = sources[s].waveform(t);
    step(grid, active);
    if ((k + 1) % stride != 0) continue;

    const std::size_t begin = rec.ez_t.size();
    for (const CellRect& r : regions) {
      for (int j = r.j0; j < r.j1; ++j) {
        const double* ez = grid.ez().row(j) + r.i0;
        const double* bx = grid.bx().row(j) + r.i0;
        const double* by = grid.by().row(j) + r.i0;
        rec.ez_t.insert(rec.ez_t.end(), ez, ez + r.width());
        rec.bx_t.insert(rec.bx_t.end(), bx, bx + r.width());
        rec.by_t.insert(rec.by_t.end(), by, by + r.width());
      }
    }
    const std::span<const double> fresh_ez(rec.ez_t.data() + begin, rec.cells);
    const std::span<const double> fresh_bx(rec.bx_t.data() + begin, rec.cells);
    const std::span<const double> fresh_by(rec.by_t.data() + begin, rec.cells);
    if (!all_finite(fresh_ez) || !all_finite(fresh_bx) || !all_finite(fresh_by))
      throw DivergenceError(grid.time_step_index(), "non-finite value in recorded region");
  }
  if (!all_finite(grid.ez().flat()) || !all_finite(grid.bx().flat()) || !all_finite(grid.by().flat()))
    throw DivergenceError(grid.time_step_index(), "non-finite value in fields");
  return rec;
}

double energy(const YeeGrid& grid) {
  double e = 0.0;
  const auto ez = grid.ez().flat();
  const auto eps = grid.eps().flat();
  for (std::size_t k = 0; k < ez.size(); ++k) e += eps[k] * ez[k] * ez[k];
  for (double b : grid.bx().flat()) e += b * b;
  for (double b : grid.by().flat()) e += b * b;
  return 0.5 * e;
}

double energy(const YeeGrid& grid, const Array2D<double>& ez_before) {
  if (ez_before.nx() != grid.nx() || ez_before.ny() != grid.ny()) throw ShapeError("energy: ez_before has the wrong shape");
  double e = 0.0;
  const auto ez = grid.ez().flat();
  const auto ez0 = ez_before.flat();
  const auto eps = grid.eps().flat();
  for (std::size_t k = 0; k < ez.size(); ++k) e += eps[k] * ez0[k] * ez[k];
  for (double b : grid.bx().flat()) e += b * b;
  for (double b : grid.by().flat()) e += b * b;
  return 0.5 * e;
}

}  // namespace pforge
