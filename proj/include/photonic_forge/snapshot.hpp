#pragma once

// Field snapshot export.
//
// PGM: binary P5, 16-bit big-endian samples, one image row per grid row j,
// ez mapped linearly from [-max|ez|, +max|ez|] to [0, 65535].
// CSV: header "x,y,ez,bx,by", one line per cell, cell-centre coordinates in
// um, B averaged onto the cell centre, 9 significant digits.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "photonic_forge/array2d.hpp"
#include "photonic_forge/fdtd.hpp"

namespace pforge {

void write_pgm(std::ostream& os, const Array2D<double>& field);
void save_pgm(const std::string& path, const Array2D<double>& field);
void write_field_csv(std::ostream& os, const YeeGrid& grid);

/// Pointwise sum of same-shaped snapshots.
Array2D<double> superpose(std::span<const Array2D<double>> snapshots);

}  // namespace pforge
