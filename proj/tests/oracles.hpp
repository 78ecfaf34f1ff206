#pragma once

// Independent reference computations for the tests. None of these call into
// the code under test beyond its plain data types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "photonic_forge/array2d.hpp"
#include "photonic_forge/fdtd.hpp"
#include "photonic_forge/geometry.hpp"

namespace oracle {

/// Plain long-double triple sum, the textbook reading of the overlap.
inline long double inner_product(const pforge::FieldRecord& a, const pforge::FieldRecord& b) {
  long double s = 0.0L;
  for (std::size_t k = 0; k < a.ez_t.size(); ++k) {
    s += static_cast<long double>(a.ez_t[k]) * b.ez_t[k];
    s += static_cast<long double>(a.bx_t[k]) * b.bx_t[k];
    s += static_cast<long double>(a.by_t[k]) * b.by_t[k];
  }
  return s / 2.0L;
}

/// Cell (i, j) is silicon iff its centre lies in an on-pixel or a lead strip.
/// Recomputed from the layout numbers alone, in nanometres.
inline pforge::Array2D<double> rasterize(const pforge::DeviceLayout& l, const pforge::PixelMap& pm, double cell_nm,
                                         double bg = 1.0, double si = 11.7) {
  const double pad = l.padding_nm;
  const double width = 2 * (pad + l.lead_length_nm) + l.design_width_nm;
  const double height = 2 * pad + l.design_height_nm;
  const int nx = static_cast<int>(std::lround(width / cell_nm));
  const int ny = static_cast<int>(std::lround(height / cell_nm));
  const double x0 = pad + l.lead_length_nm;  // design left edge
  const double y0 = pad;                      // design top edge
  pforge::Array2D<double> eps(nx, ny, bg);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * cell_nm;
      const double y = (j + 0.5) * cell_nm;
      bool on = false;
      const bool left = x < x0;
      const bool right = x > x0 + l.design_width_nm;
      if (left || right) {
        const auto& ports = left ? l.input_ports : l.output_ports;
        for (const auto& p : ports) {
          const double c = y0 + p.center_offset_nm;
          on = on || (y > c - l.port_width_nm / 2 && y < c + l.port_width_nm / 2);
        }
      } else if (y > y0 && y < y0 + l.design_height_nm) {
        const int c = static_cast<int>((x - x0) / pm.pixel_size_nm());
        const int r = static_cast<int>((y - y0) / pm.pixel_size_nm());
        on = pm.at(r, c);
      }
      eps(i, j) = on ? si : bg;
    }
  }
  return eps;
}

/// Effective index of the fundamental even mode of a symmetric slab with the
/// field parallel to the interfaces: kappa tan(kappa w / 2) = gamma.
inline double slab_neff(double width, double wavelength, double n_core, double n_clad) {
  const double k0 = 2 * std::numbers::pi / wavelength;
  auto f = [&](double neff) {
    const double kappa = k0 * std::sqrt(n_core * n_core - neff * neff);
    const double gamma = k0 * std::sqrt(neff * neff - n_clad * n_clad);
    return kappa * std::tan(kappa * width / 2) - gamma;
  };
  // The fundamental root has kappa w / 2 in (0, pi/2).
  double lo = std::sqrt(std::max(n_clad * n_clad, n_core * n_core - std::pow(std::numbers::pi / (k0 * width), 2))) + 1e-12;
  double hi = n_core - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    // f decreases from +inf (kappa w/2 -> pi/2) at lo to -gamma at hi.
    if (f(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Group index c / v_g = n_eff - lambda d n_eff / d lambda, central difference.
inline double slab_group_index(double width, double wavelength, double n_core, double n_clad) {
  const double h = wavelength * 1e-4;
  const double dn = (slab_neff(width, wavelength + h, n_core, n_clad) - slab_neff(width, wavelength - h, n_core, n_clad)) /
                    (2 * h);
  return slab_neff(width, wavelength, n_core, n_clad) - wavelength * dn;
}

/// Best value of f over all 2^n bit patterns, and the pattern reaching it.
inline std::pair<double, std::uint32_t> brute_force_max(int n, const std::function<double(std::uint32_t)>& f) {
  double best = -std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    const double v = f(m);
    if (v > best) {
      best = v;
      arg = m;
    }
  }
  return {best, arg};
}

using CMatrix = std::vector<std::vector<std::complex<double>>>;

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  const std::size_t n = a.size();
  CMatrix c(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline double max_dev_from_identity(const CMatrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) d = std::max(d, std::abs(m[i][j] - (i == j ? 1.0 : 0.0)));
  return d;
}

inline CMatrix adjoint(const CMatrix& a) {
  const std::size_t n = a.size();
  CMatrix c(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i][j] = std::conj(a[j][i]);
  return c;
}

/// Fourier entry evaluated from the exponential directly.
inline std::complex<double> fourier_entry(int d, int j, int k) {
  return std::polar(1.0 / std::sqrt(static_cast<double>(d)), 2 * std::numbers::pi * j * k / d);
}

}  // namespace oracle
