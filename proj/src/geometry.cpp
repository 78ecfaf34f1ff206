#include "photonic_forge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

constexpr double kRatioTolerance = 1e-9;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kRatioTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

void fill_rect(Array2D<double>& eps, int i0, int j0, int i1, int j1, double value) {
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  i1 = std::min(i1, eps.nx());
  j1 = std::min(j1, eps.ny());
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) eps(i, j) = value;
  }
}

// Leads and padding: background everywhere, silicon strips from the domain
// edge to the design region for every port.
PermittivityMap blank_with_leads(const DeviceLayout& layout, double cell_size_nm, const Materials& materials) {
  layout.validate();
  PermittivityMap out;
  out.frame = DomainFrame::make(layout, cell_size_nm);
  const DomainFrame& f = out.frame;
  out.eps = Array2D<double>(f.nx, f.ny, materials.background);
  for (int row0 : f.input_row0) fill_rect(out.eps, 0, row0, f.design.i0, row0 + f.port_cells, materials.silicon);
  for (int row0 : f.output_row0)
    fill_rect(out.eps, f.design.i1, row0, f.nx, row0 + f.port_cells, materials.silicon);
  return out;
}

int pixel_cells(const PixelMap& pm, const DomainFrame& f) {
  const int p = exact_ratio(pm.pixel_size_nm(), f.cell_size_nm, "pixel size / cell size");
  if (pm.cols() * p != f.design.width() || pm.rows() * p != f.design.height()) {
    std::ostringstream os;
    os << "pixel map " << pm.rows() << "x" << pm.cols() << " at " << pm.pixel_size_nm()
       << " nm does not cover the design region";
    throw ShapeError(os.str());
  }
  return p;
}

}  // namespace

int exact_ratio(double a, double b, const std::string& what) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError(what + ": lengths must be positive");
  const double r = a / b;
  const double n = std::round(r);
  if (n < 1.0 || !nearly_equal(r, n) || n > std::numeric_limits<int>::max()) {
    std::ostringstream os;
    os << what << ": " << a << " is not an integer multiple of " << b;
    throw ConfigError(os.str());
  }
  return static_cast<int>(n);
}

DeviceLayout DeviceLayout::equally_spaced(int n_modes, double width_nm, double height_nm, double port_width_nm) {
  DeviceLayout layout;
  layout.design_width_nm = width_nm;
  layout.design_height_nm = height_nm;
  layout.n_modes = n_modes;
  layout.port_width_nm = port_width_nm;
  for (int k = 0; k < n_modes; ++k) {
    const double offset = (k + 0.5) * height_nm / n_modes;
    layout.input_ports.push_back({PortEdge::Left, offset});
    layout.output_ports.push_back({PortEdge::Right, offset});
  }
  return layout;
}

void DeviceLayout::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("device layout: " + msg); };
  if (!(design_width_nm > 0.0) || !(design_height_nm > 0.0)) fail("design region must have positive size");
  if (n_modes < 1) fail("n_modes must be >= 1");
  if (!(port_width_nm > 0.0)) fail("port width must be positive");
  if (!(lead_length_nm > 0.0) || !(padding_nm > 0.0)) fail("lead length and padding must be positive");
  if (static_cast<int>(input_ports.size()) != n_modes || static_cast<int>(output_ports.size()) != n_modes)
    fail("need exactly n_modes input and output ports");
  auto check_side = [&](const std::vector<PortSpec>& ports, PortEdge edge, const char* name) {
    std::vector<double> offsets;
    for (const PortSpec& p : ports) {
      if (p.edge != edge) fail(std::string(name) + " ports must sit on the " + (edge == PortEdge::Left ? "left" : "right") + " edge");
      if (p.center_offset_nm - port_width_nm / 2 < 0.0 || p.center_offset_nm + port_width_nm / 2 > design_height_nm)
        fail(std::string(name) + " port extends beyond the design region");
      offsets.push_back(p.center_offset_nm);
    }
    std::sort(offsets.begin(), offsets.end());
    for (std::size_t k = 1; k < offsets.size(); ++k) {
      if (offsets[k] - offsets[k - 1] < port_width_nm) fail(std::string(name) + " ports overlap");
    }
  };
  check_side(input_ports, PortEdge::Left, "input");
  check_side(output_ports, PortEdge::Right, "output");
}

PixelMap::PixelMap(int rows, int cols, double pixel_size_nm, bool fill)
    : PixelMap(rows, cols, pixel_size_nm,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(rows, 0)) * std::max(cols, 0),
                                         fill ? 1 : 0)) {}

PixelMap::PixelMap(int rows, int cols, double pixel_size_nm, std::vector<std::uint8_t> bits)
    : rows_(rows), cols_(cols), pixel_size_nm_(pixel_size_nm), bits_(std::move(bits)) {
  if (rows < 1 || cols < 1) throw ConfigError("pixel map needs at least one row and column");
  if (!(pixel_size_nm > 0.0)) throw ConfigError("pixel size must be positive");
  if (bits_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw ShapeError("pixel map bit count does not equal rows * cols");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t PixelMap::on_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

DomainFrame DomainFrame::make(const DeviceLayout& layout, double cell_size_nm) {
  DomainFrame f;
  f.cell_size_nm = cell_size_nm;
  const int dw = exact_ratio(layout.design_width_nm, cell_size_nm, "design width / cell size");
  const int dh = exact_ratio(layout.design_height_nm, cell_size_nm, "design height / cell size");
  f.lead_cells = exact_ratio(layout.lead_length_nm, cell_size_nm, "lead length / cell size");
  f.pad_cells = exact_ratio(layout.padding_nm, cell_size_nm, "padding / cell size");
  f.nx = 2 * f.pad_cells + 2 * f.lead_cells + dw;
  f.ny = 2 * f.pad_cells + dh;
  f.design = CellRect{f.pad_cells + f.lead_cells, f.pad_cells, f.pad_cells + f.lead_cells + dw, f.pad_cells + dh};
  f.port_cells = std::max(1, static_cast<int>(std::lround(layout.port_width_nm / cell_size_nm)));
  if (f.lead_cells < std::max(f.port_cells, 4))
    throw ConfigError("lead length must be at least one port width and 4 cells");

  auto row0 = [&](const PortSpec& p) {
    const double center = f.pad_cells + p.center_offset_nm / cell_size_nm;
    const int r = static_cast<int>(std::lround(center - f.port_cells / 2.0));
    if (r < f.design.j0 || r + f.port_cells > f.design.j1) throw ConfigError("port outside the design region");
    return r;
  };
  for (const PortSpec& p : layout.input_ports) f.input_row0.push_back(row0(p));
  for (const PortSpec& p : layout.output_ports) f.output_row0.push_back(row0(p));
  return f;
}

std::vector<std::size_t> DomainFrame::source_cells(int port) const {
  if (port < 0 || port >= static_cast<int>(input_row0.size()))
    throw ConfigError("unknown input port " + std::to_string(port));
  std::vector<std::size_t> cells;
  const int i = source_column();
  for (int j = input_row0[port]; j < input_row0[port] + port_cells; ++j)
    cells.push_back(static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i));
  return cells;
}

CellRect DomainFrame::output_record_region(int port) const {
  if (port < 0 || port >= static_cast<int>(output_row0.size()))
    throw ConfigError("unknown output port " + std::to_string(port));
  return CellRect{design.i1, output_row0[port], design.i1 + port_cells, output_row0[port] + port_cells};
}

std::vector<CellRect> DomainFrame::output_record_regions() const {
  std::vector<CellRect> out;
  for (int k = 0; k < static_cast<int>(output_row0.size()); ++k) out.push_back(output_record_region(k));
  return out;
}

PermittivityMap rasterize(const DeviceLayout& layout, const PixelMap& pm, double cell_size_nm,
                          const Materials& materials) {
  PermittivityMap out = blank_with_leads(layout, cell_size_nm, materials);
  const DomainFrame& f = out.frame;
  const int p = pixel_cells(pm, f);
  for (int r = 0; r < pm.rows(); ++r) {
    for (int c = 0; c < pm.cols(); ++c) {
      if (!pm.at(r, c)) continue;
      const int i0 = f.design.i0 + c * p;
      const int j0 = f.design.j0 + r * p;
      fill_rect(out.eps, i0, j0, i0 + p, j0 + p, materials.silicon);
    }
  }
  return out;
}

PermittivityMap identity_layout(const DeviceLayout& layout, double cell_size_nm, const Materials& materials) {
  layout.validate();
  for (int k = 0; k < layout.n_modes; ++k) {
    if (!nearly_equal(layout.input_ports[k].center_offset_nm, layout.output_ports[k].center_offset_nm))
      throw ConfigError("identity layout: input and output port " + std::to_string(k) + " are not aligned");
  }
  PermittivityMap out = blank_with_leads(layout, cell_size_nm, materials);
  const DomainFrame& f = out.frame;
  for (int row0 : f.input_row0)
    fill_rect(out.eps, f.design.i0, row0, f.design.i1, row0 + f.port_cells, materials.silicon);
  return out;
}

PixelMap identity_pixel_map(const DeviceLayout& layout, int rows, int cols) {
  layout.validate();
  const double p = layout.design_width_nm / cols;
  if (!nearly_equal(p * rows, layout.design_height_nm)) throw ConfigError("identity pixel map: pixels must be square");
  PixelMap pm(rows, cols, p);
  for (int r = 0; r < rows; ++r) {
    const double y0 = r * p;
    const double y1 = (r + 1) * p;
    bool inside = false;
    for (const PortSpec& port : layout.input_ports) {
      const double lo = port.center_offset_nm - layout.port_width_nm / 2;
      const double hi = port.center_offset_nm + layout.port_width_nm / 2;
      if (y0 >= lo - kRatioTolerance && y1 <= hi + kRatioTolerance) inside = true;
    }
    for (int c = 0; c < cols; ++c) pm.set(r, c, inside);
  }
  return pm;
}

PixelMap refine(const PixelMap& pm, double min_pixel_nm) {
  const double half = pm.pixel_size_nm() / 2;
  if (half < min_pixel_nm * (1.0 - kRatioTolerance)) {
    std::ostringstream os;
    os << "refine: " << half << " nm pixels are below the minimum " << min_pixel_nm << " nm";
    throw ConfigError(os.str());
  }
  PixelMap out(pm.rows() * 2, pm.cols() * 2, half);
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) out.set(r, c, pm.at(r / 2, c / 2));
  }
  return out;
}

PixelMap flip(const PixelMap& pm, std::size_t index) {
  if (index >= pm.size()) {
    throw ConfigError("flip: index " + std::to_string(index) + " out of range for " + std::to_string(pm.size()) +
                      " pixels");
  }
  PixelMap out = pm;
  out.set(index, !pm.at(index));
  return out;
}

PermittivityMap perturb(const PixelMap& pm, const DeviceLayout& layout, double max_shift_nm, std::uint64_t seed,
                        double cell_size_nm, const Materials& materials) {
  if (!(max_shift_nm >= 0.0)) throw ConfigError("perturb: max_shift must be non-negative");
  PermittivityMap out = blank_with_leads(layout, cell_size_nm, materials);
  const DomainFrame& f = out.frame;
  const int p = pixel_cells(pm, f);
  const double shift_cells = max_shift_nm / cell_size_nm;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);

  // Cells whose centre i + 1/2 lies in [lo, hi).
  auto span = [](double lo, double hi, int n) {
    const int a = std::max(0, static_cast<int>(std::ceil(lo - 0.5)));
    const int b = std::min(n, static_cast<int>(std::ceil(hi - 0.5)));
    return std::pair{a, b};
  };

  for (int r = 0; r < pm.rows(); ++r) {
    for (int c = 0; c < pm.cols(); ++c) {
      // Draw for every pixel so a pixel's shift does not depend on the others' states.
      const double sx = shift_cells > 0.0 ? shift_cells * offset(rng) : 0.0;
      const double sy = shift_cells > 0.0 ? shift_cells * offset(rng) : 0.0;
      if (!pm.at(r, c)) continue;
      const double x0 = f.design.i0 + c * p + sx;
      const double y0 = f.design.j0 + r * p + sy;
      const auto [i0, i1] = span(x0, x0 + p, f.nx);
      const auto [j0, j1] = span(y0, y0 + p, f.ny);
      fill_rect(out.eps, i0, j0, i1, j1, materials.silicon);
    }
  }
  return out;
}

void write_geometry(std::ostream& os, const PixelMap& pm) {
  std::ostringstream size;
  size << std::setprecision(12) << pm.pixel_size_nm();
  os << kGeometryHeader << '\n' << pm.rows() << ' ' << pm.cols() << ' ' << size.str() << '\n';
  std::string line(static_cast<std::size_t>(pm.cols()), '0');
  for (int r = 0; r < pm.rows(); ++r) {
    for (int c = 0; c < pm.cols(); ++c) line[c] = pm.at(r, c) ? '1' : '0';
    os << line << '\n';
  }
}

std::string geometry_to_string(const PixelMap& pm) {
  std::ostringstream os;
  write_geometry(os, pm);
  return os.str();
}

PixelMap read_geometry(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kGeometryHeader)
    throw ParseError("geometry: line 1 must be \"" + std::string(kGeometryHeader) + "\"");
  if (!std::getline(is, line)) throw ParseError("geometry: missing size line");
  std::istringstream size(line);
  int rows = 0;
  int cols = 0;
  double pixel = 0.0;
  std::string extra;
  if (!(size >> rows >> cols >> pixel) || (size >> extra) || rows < 1 || cols < 1 || !(pixel > 0.0))
    throw ParseError("geometry: line 2 must be \"rows cols pixel_size_nm\"");
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(is, line)) throw ParseError("geometry: expected " + std::to_string(rows) + " pixel rows");
    if (static_cast<int>(line.size()) != cols)
      throw ParseError("geometry: row " + std::to_string(r + 1) + " has " + std::to_string(line.size()) +
                       " characters, expected " + std::to_string(cols));
    for (char ch : line) {
      if (ch != '0' && ch != '1') throw ParseError("geometry: row " + std::to_string(r + 1) + " has a non 0/1 character");
      bits.push_back(ch == '1' ? 1 : 0);
    }
  }
  while (std::getline(is, line)) {
    if (!line.empty()) throw ParseError("geometry: trailing content after the pixel rows");
  }
  return PixelMap(rows, cols, pixel, std::move(bits));
}

void save_geometry(const std::string& path, const PixelMap& pm) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write geometry file " + path);
  write_geometry(os, pm);
  if (!os) throw Error("failed writing geometry file " + path);
}

PixelMap load_geometry(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open geometry file " + path);
  return read_geometry(is);
}

}  // namespace pforge
