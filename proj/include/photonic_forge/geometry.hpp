#pragma once

// Pixel maps over the design region and their rasterisation onto the
// simulation domain.
//
// The simulated domain is, along x:
//   padding | input lead | design region | output lead | padding
// and along y:
//   padding | design region | padding
// Waveguides run straight through the leads and the padding to the domain
// edge, so they continue into the absorbing layer that build_grid places
// inside the padding. y grows downwards: port 0 is the top waveguide.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "photonic_forge/array2d.hpp"
#include "photonic_forge/fdtd.hpp"

namespace pforge {

enum class PortEdge { Left, Right };

struct PortSpec {
  PortEdge edge = PortEdge::Left;
  /// Distance of the waveguide axis from the top edge of the design region.
  double center_offset_nm = 0.0;
};

struct DeviceLayout {
  double design_width_nm = 8000.0;
  double design_height_nm = 8000.0;
  int n_modes = 2;
  double port_width_nm = 300.0;
  std::vector<PortSpec> input_ports;
  std::vector<PortSpec> output_ports;
  double lead_length_nm = 500.0;
  double padding_nm = 500.0;

  /// n_modes inputs on the left and outputs on the right, equally spaced:
  /// port k sits at (k + 1/2) * height / n.
  static DeviceLayout equally_spaced(int n_modes, double width_nm, double height_nm,
                                     double port_width_nm = 300.0);

  /// Throws ConfigError for overlapping ports, wrong port counts, ports that
  /// leave the design region, or non-positive sizes.
  void validate() const;
};

struct Materials {
  double background = 1.0;
  double silicon = 11.7;
};

/// Binary pixel grid over the design region, row-major, true = silicon.
class PixelMap {
 public:
  PixelMap() = default;
  PixelMap(int rows, int cols, double pixel_size_nm, bool fill = false);
  PixelMap(int rows, int cols, double pixel_size_nm, std::vector<std::uint8_t> bits);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return bits_.size(); }
  double pixel_size_nm() const noexcept { return pixel_size_nm_; }

  bool at(int r, int c) const noexcept { return bits_[index(r, c)] != 0; }
  bool at(std::size_t k) const noexcept { return bits_[k] != 0; }
  void set(int r, int c, bool on) noexcept { bits_[index(r, c)] = on ? 1 : 0; }
  void set(std::size_t k, bool on) noexcept { bits_[k] = on ? 1 : 0; }
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }

  std::size_t on_count() const noexcept;
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  bool operator==(const PixelMap&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double pixel_size_nm_ = 0.0;
  std::vector<std::uint8_t> bits_;
};

/// Integer cell layout of the whole domain for a layout at a cell size.
struct DomainFrame {
  int nx = 0;
  int ny = 0;
  int pad_cells = 0;
  int lead_cells = 0;
  CellRect design;  // design region in cells
  int port_cells = 0;
  std::vector<int> input_row0;   // first row of each input waveguide
  std::vector<int> output_row0;  // first row of each output waveguide
  double cell_size_nm = 0.0;

  /// Throws ConfigError when the design, lead or padding length is not an
  /// integer number of cells, or a port leaves the domain.
  static DomainFrame make(const DeviceLayout& layout, double cell_size_nm);

  /// Column carrying the soft line source in every input lead.
  int source_column() const noexcept { return pad_cells + 2; }
  /// ez cells of the source line across input port k.
  std::vector<std::size_t> source_cells(int port) const;
  /// Output-port waveguide cross-section extended one port width into the lead.
  CellRect output_record_region(int port) const;
  std::vector<CellRect> output_record_regions() const;
};

/// Full-domain relative permittivity plus the frame it was drawn on.
struct PermittivityMap {
  DomainFrame frame;
  Array2D<double> eps;

  bool operator==(const PermittivityMap& other) const { return eps == other.eps; }
};

/// Exact integer ratio a / b, or ConfigError naming `what`.
int exact_ratio(double a, double b, const std::string& what);

PermittivityMap rasterize(const DeviceLayout& layout, const PixelMap& pm, double cell_size_nm,
                          const Materials& materials = {});

/// Straight waveguides joining input k to output k across the design region.
PermittivityMap identity_layout(const DeviceLayout& layout, double cell_size_nm, const Materials& materials = {});

/// Pixel map whose pixels lie entirely inside the identity waveguides. When
/// the waveguide edges fall on pixel boundaries it rasterises exactly to
/// identity_layout.
PixelMap identity_pixel_map(const DeviceLayout& layout, int rows, int cols);

/// Splits every pixel into 2x2 children of the same state. Throws
/// ConfigError if the halved pixel would be below min_pixel_nm.
PixelMap refine(const PixelMap& pm, double min_pixel_nm);

PixelMap flip(const PixelMap& pm, std::size_t index);

/// Rasterises pm with each on-pixel shifted by an independent uniform offset
/// in [-max_shift, max_shift] along each axis, sampled at cell centres.
/// Pixels are drawn in row-major order; shifted squares are clipped to the
/// domain.
PermittivityMap perturb(const PixelMap& pm, const DeviceLayout& layout, double max_shift_nm,
                        std::uint64_t seed, double cell_size_nm, const Materials& materials = {});

// Geometry text file: "photonic-forge-geometry v1", "rows cols pixel_size_nm",
// then one line of '0'/'1' per row.
inline constexpr const char* kGeometryHeader = "photonic-forge-geometry v1";
void write_geometry(std::ostream& os, const PixelMap& pm);
std::string geometry_to_string(const PixelMap& pm);
PixelMap read_geometry(std::istream& is);
void save_geometry(const std::string& path, const PixelMap& pm);
PixelMap load_geometry(const std::string& path);

}  // namespace pforge
