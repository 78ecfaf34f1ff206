#include "photonic_forge/run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "photonic_forge/errors.hpp"
#include "photonic_forge/parallel.hpp"

namespace pforge {

namespace {

using nlohmann::json;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  throw ConfigError("config key '" + key + "' must be an integer");
}

int as_int32(const json& v, const std::string& key) {
  const std::int64_t i = as_int(v, key);
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max())
    throw ConfigError("config key '" + key + "' is out of range");
  return static_cast<int>(i);
}

std::uint64_t as_uint64(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = as_int(v, key);
  if (i < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_doubles(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) out.push_back(as_double(e, key));
  return out;
}

std::vector<PortSpec> ports_from(const std::vector<double>& offsets, PortEdge edge) {
  std::vector<PortSpec> out;
  for (double o : offsets) out.push_back({edge, o});
  return out;
}

std::vector<double> offsets_of(const std::vector<PortSpec>& ports) {
  std::vector<double> out;
  for (const PortSpec& p : ports) out.push_back(p.center_offset_nm);
  return out;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

#define PF_DOUBLE(name, member) \
  Field{name, [](RunConfig& c, const json& v) { c.member = as_double(v, name); }, [](const RunConfig& c) { return json(c.member); }}
#define PF_INT(name, member) \
  Field{name, [](RunConfig& c, const json& v) { c.member = as_int32(v, name); }, [](const RunConfig& c) { return json(c.member); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"gate", [](RunConfig& c, const json& v) { c.gate = as_string(v, "gate"); },
            [](const RunConfig& c) { return json(c.gate); }},
      Field{"gate.haar", [](RunConfig& c, const json& v) { c.haar = as_bool(v, "gate.haar"); },
            [](const RunConfig& c) { return json(c.haar); }},

      PF_DOUBLE("sim.wavelength_nm", setup.sim.wavelength_nm),
      PF_DOUBLE("sim.scale_a_nm", setup.sim.scale_a_nm),
      PF_DOUBLE("sim.cell_size_nm", setup.sim.cell_size_nm),
      PF_DOUBLE("sim.courant", setup.sim.courant),
      Field{"sim.total_steps", [](RunConfig& c, const json& v) { c.setup.sim.total_steps = as_int(v, "sim.total_steps"); },
            [](const RunConfig& c) { return json(c.setup.sim.total_steps); }},
      Field{"sim.boundary",
            [](RunConfig& c, const json& v) {
              const std::string s = as_string(v, "sim.boundary");
              if (s == "pml") {
                c.setup.sim.boundary.kind = BoundaryKind::PML;
              } else if (s == "pec") {
                c.setup.sim.boundary.kind = BoundaryKind::PEC;
              } else {
                throw ConfigError("config key 'sim.boundary' must be \"pml\" or \"pec\"");
              }
            },
            [](const RunConfig& c) { return json(c.setup.sim.boundary.kind == BoundaryKind::PML ? "pml" : "pec"); }},
      PF_INT("sim.pml_thickness", setup.sim.boundary.pml_thickness),
      PF_DOUBLE("sim.pml_sigma_max", setup.sim.boundary.pml_sigma_max),
      PF_DOUBLE("sim.pml_order", setup.sim.boundary.pml_order),
      PF_DOUBLE("sim.pml_reflection", setup.sim.boundary.pml_reflection),
      PF_DOUBLE("sim.eps_background", setup.sim.eps_background),
      PF_DOUBLE("sim.eps_silicon", setup.sim.eps_silicon),
      PF_INT("sim.record_stride", setup.sim.record_stride),

      PF_DOUBLE("geom.design_width_nm", setup.layout.design_width_nm),
      PF_DOUBLE("geom.design_height_nm", setup.layout.design_height_nm),
      PF_INT("geom.n_modes", setup.layout.n_modes),
      PF_DOUBLE("geom.port_width_nm", setup.layout.port_width_nm),
      PF_DOUBLE("geom.lead_length_nm", setup.layout.lead_length_nm),
      PF_DOUBLE("geom.padding_nm", setup.layout.padding_nm),
      Field{"geom.input_offsets_nm",
            [](RunConfig& c, const json& v) {
              c.setup.layout.input_ports = ports_from(as_doubles(v, "geom.input_offsets_nm"), PortEdge::Left);
            },
            [](const RunConfig& c) { return json(offsets_of(c.setup.layout.input_ports)); }},
      Field{"geom.output_offsets_nm",
            [](RunConfig& c, const json& v) {
              c.setup.layout.output_ports = ports_from(as_doubles(v, "geom.output_offsets_nm"), PortEdge::Right);
            },
            [](const RunConfig& c) { return json(offsets_of(c.setup.layout.output_ports)); }},
      PF_INT("geom.pixels", final_pixels),

      PF_DOUBLE("pulse.amplitude", setup.pulse.amplitude),
      PF_DOUBLE("pulse.sigma_periods", setup.pulse.sigma_periods),
      PF_DOUBLE("pulse.mu_sigmas", setup.pulse.mu_sigmas),

      PF_INT("opt.initial_pixels", initial_pixels),
      PF_INT("opt.max_passes_per_level", max_passes_per_level),
      PF_DOUBLE("opt.improvement_threshold", improvement_threshold),

      Field{"run.seed", [](RunConfig& c, const json& v) { c.seed = as_uint64(v, "run.seed"); },
            [](const RunConfig& c) { return json(c.seed); }},
      PF_INT("run.workers", workers),
      Field{"run.out_dir", [](RunConfig& c, const json& v) { c.out_dir = as_string(v, "run.out_dir"); },
            [](const RunConfig& c) { return json(c.out_dir); }},
      Field{"run.snapshots", [](RunConfig& c, const json& v) { c.snapshots = as_bool(v, "run.snapshots"); },
            [](const RunConfig& c) { return json(c.snapshots); }},

      PF_INT("analysis.trials", trials),
      Field{"analysis.wavelengths_nm",
            [](RunConfig& c, const json& v) { c.wavelengths_nm = as_doubles(v, "analysis.wavelengths_nm"); },
            [](const RunConfig& c) { return json(c.wavelengths_nm); }},
      Field{"analysis.shifts_nm", [](RunConfig& c, const json& v) { c.shifts_nm = as_doubles(v, "analysis.shifts_nm"); },
            [](const RunConfig& c) { return json(c.shifts_nm); }},
  };
  return table;
}

#undef PF_DOUBLE
#undef PF_INT

}  // namespace

const std::vector<std::string>& required_config_keys() {
  static const std::vector<std::string> keys = {"gate",          "sim.wavelength_nm",      "geom.design_width_nm",
                                                "geom.design_height_nm", "geom.n_modes", "geom.pixels"};
  return keys;
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig o;
  const DeviceLayout& l = setup.layout;
  const double pixel = l.design_width_nm / initial_pixels;
  o.initial_cols = initial_pixels;
  o.initial_rows = static_cast<int>(std::lround(l.design_height_nm / pixel));
  o.min_pixel_nm = l.design_width_nm / final_pixels;
  o.seed = seed;
  o.max_passes_per_level = max_passes_per_level;
  o.improvement_threshold = improvement_threshold;
  return o;
}

int RunConfig::resolved_workers() const { return workers > 0 ? workers : default_workers(); }

UnitarySpec RunConfig::unitary() const { return gate_from_selector(gate, haar); }

void RunConfig::validate() const {
  setup.sim.validate();
  setup.layout.validate();
  if (gate.empty()) throw ConfigError("config key 'gate' must not be empty");
  if (initial_pixels < 1 || final_pixels < 1) throw ConfigError("pixel counts must be >= 1");
  if (final_pixels < initial_pixels) throw ConfigError("geom.pixels must be >= opt.initial_pixels");
  // The final count must be reachable from the initial one by halving.
  int n = initial_pixels;
  while (n < final_pixels) n *= 2;
  if (n != final_pixels)
    throw ConfigError("geom.pixels must be opt.initial_pixels times a power of two");
  const double rows = setup.layout.design_height_nm / (setup.layout.design_width_nm / initial_pixels);
  if (std::abs(rows - std::round(rows)) > 1e-9 * rows)
    throw ConfigError("initial pixels do not tile the design height");
  if (workers < 0) throw ConfigError("run.workers must be >= 0");
  if (trials < 1) throw ConfigError("analysis.trials must be >= 1");
  optimizer().validate();
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const std::string& key : required_config_keys()) {
    if (!j.contains(key)) throw ConfigError("missing config key '" + key + "'");
  }
  const auto& table = fields();
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const Field& f : table) known = known || it.key() == f.key;
    if (!known) throw ConfigError("unknown config key '" + it.key() + "'");
  }

  RunConfig cfg;
  // Apply in table order so later keys can rely on earlier ones.
  for (const Field& f : table) {
    if (j.contains(f.key)) f.set(cfg, j.at(f.key));
  }
  DeviceLayout& l = cfg.setup.layout;
  if (!j.contains("geom.input_offsets_nm") || !j.contains("geom.output_offsets_nm")) {
    const DeviceLayout spaced = DeviceLayout::equally_spaced(l.n_modes, l.design_width_nm, l.design_height_nm);
    if (!j.contains("geom.input_offsets_nm")) l.input_ports = spaced.input_ports;
    if (!j.contains("geom.output_offsets_nm")) l.output_ports = spaced.output_ports;
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const Field& f : fields()) j[f.key] = f.get(cfg);
  return j;
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << to_json(cfg).dump(2) << '\n';
  if (!os) throw Error("failed writing " + path);
}

}  // namespace pforge
