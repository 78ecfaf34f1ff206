#include "photonic_forge/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "photonic_forge/errors.hpp"

namespace pforge {

void write_pgm(std::ostream& os, const Array2D<double>& field) {
  double peak = 0.0;
  for (double v : field.flat()) peak = std::max(peak, std::abs(v));
  os << "P5\n" << field.nx() << ' ' << field.ny() << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(field.nx()) * 2);
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      const double u = peak > 0.0 ? (field(i, j) + peak) / (2.0 * peak) : 0.5;
      const auto level = static_cast<std::uint16_t>(std::lround(std::clamp(u, 0.0, 1.0) * 65535.0));
      row[2 * i] = static_cast<unsigned char>(level >> 8);
      row[2 * i + 1] = static_cast<unsigned char>(level & 0xFF);
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

void save_pgm(const std::string& path, const Array2D<double>& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  write_pgm(os, field);
}

void write_field_csv(std::ostream& os, const YeeGrid& grid) {
  const auto old_precision = os.precision();
  os << std::setprecision(9) << "x,y,ez,bx,by\n";
  const int nx = grid.nx();
  const int ny = grid.ny();
  const auto& bx = grid.bx();
  const auto& by = grid.by();
  const double cell_um = grid.cell_size_nm() / 1000.0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // bx(i, j) sits half a cell below the centre, by(i, j) half a cell right.
      const double bx_lo = j > 0 ? bx(i, j - 1) : bx(i, j);
      const double bx_hi = j < ny - 1 ? bx(i, j) : bx(i, j - 1);
      const double by_lo = i > 0 ? by(i - 1, j) : by(i, j);
      const double by_hi = i < nx - 1 ? by(i, j) : by(i - 1, j);
      const double x = (i + 0.5) * cell_um;
      const double y = (j + 0.5) * cell_um;
      os << x << ',' << y << ',' << grid.ez()(i, j) << ',' << 0.5 * (bx_lo + bx_hi) << ',' << 0.5 * (by_lo + by_hi)
         << '\n';
    }
  }
  os.precision(old_precision);
}

Array2D<double> superpose(std::span<const Array2D<double>> snapshots) {
  if (snapshots.empty()) throw ShapeError("superpose: no snapshots");
  Array2D<double> out = snapshots.front();
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    if (snapshots[k].nx() != out.nx() || snapshots[k].ny() != out.ny()) throw ShapeError("superpose: shape mismatch");
    auto dst = out.flat();
    auto src = snapshots[k].flat();
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
  }
  return out;
}

}  // namespace pforge
