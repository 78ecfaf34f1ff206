#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "photonic_forge/analysis.hpp"
#include "photonic_forge/errors.hpp"
#include "photonic_forge/fidelity.hpp"
#include "photonic_forge/gates.hpp"
#include "photonic_forge/geometry.hpp"
#include "photonic_forge/optimizer.hpp"
#include "photonic_forge/run_config.hpp"

namespace py = pybind11;
using namespace pforge;

namespace {

// Configs cross the boundary as JSON text; the Python side serialises dicts.
RunConfig config_from(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

py::array_t<double> samples_by_cells(const FieldRecord& r, const std::vector<double>& v) {
  py::array_t<double> out({r.samples, r.cells});
  if (!v.empty()) std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::dict report_dict(const FidelityReport& r) {
  py::dict d;
  d["per_input"] = r.per_input;
  d["aggregate"] = r.aggregate;
  d["minimum"] = r.minimum;
  return d;
}

py::list sweep_list(const SweepResult& r) {
  py::list points;
  for (const SweepPoint& p : r.points) {
    py::dict d;
    d["axis_value"] = p.axis_value;
    d["mean"] = p.mean;
    d["std"] = p.stddev;
    d["trials"] = p.trials;
    d["failures"] = p.failures;
    d["error"] = p.error;
    points.append(d);
  }
  return points;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pixelated photonic gate design: FDTD, fidelity, direct binary search.";

  // Translators run newest first, so the base class goes in first.
  const auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());
  py::register_exception<ZeroNormError>(m, "ZeroNormError", error.ptr());

  py::class_<PixelMap>(m, "PixelMap")
      .def(py::init<int, int, double, bool>(), py::arg("rows"), py::arg("cols"), py::arg("pixel_size_nm"),
           py::arg("fill") = false)
      .def_static(
          "from_array",
          [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> a, double pixel_size_nm) {
            if (a.ndim() != 2) throw ShapeError("pixel array must be 2-D");
            std::vector<std::uint8_t> bits(a.data(), a.data() + a.size());
            for (auto& b : bits) b = b ? 1 : 0;
            return PixelMap(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), pixel_size_nm,
                            std::move(bits));
          },
          py::arg("bits"), py::arg("pixel_size_nm"))
      .def("to_array",
           [](const PixelMap& pm) {
             py::array_t<bool> out({pm.rows(), pm.cols()});
             bool* p = out.mutable_data();
             for (std::size_t k = 0; k < pm.size(); ++k) p[k] = pm.at(k);
             return out;
           })
      .def_property_readonly("rows", &PixelMap::rows)
      .def_property_readonly("cols", &PixelMap::cols)
      .def_property_readonly("pixel_size_nm", &PixelMap::pixel_size_nm)
      .def("on_count", &PixelMap::on_count)
      .def("__getitem__", [](const PixelMap& pm, std::pair<int, int> rc) {
        if (rc.first < 0 || rc.first >= pm.rows() || rc.second < 0 || rc.second >= pm.cols())
          throw py::index_error("pixel index out of range");
        return pm.at(rc.first, rc.second);
      })
      .def("__eq__", [](const PixelMap& a, const PixelMap& b) { return a == b; })
      .def("__repr__", [](const PixelMap& pm) {
        return "PixelMap(" + std::to_string(pm.rows()) + "x" + std::to_string(pm.cols()) + ", " +
               std::to_string(pm.pixel_size_nm()) + " nm)";
      })
      .def("__str__", &geometry_to_string);

  m.def("load_geometry", &load_geometry, py::arg("path"));
  m.def("save_geometry", &save_geometry, py::arg("path"), py::arg("pixel_map"));
  m.def("refine", &refine, py::arg("pixel_map"), py::arg("min_pixel_nm"));
  m.def("flip", &flip, py::arg("pixel_map"), py::arg("index"));

  m.def("hadamard", [] { return hadamard().entries(); });
  m.def("fourier", [](int d) { return fourier(d).entries(); }, py::arg("d"));
  m.def("identity_gate", [](int n) { return identity_gate(n).entries(); }, py::arg("n"));
  m.def(
      "gate", [](const std::string& selector, bool haar) { return gate_from_selector(selector, haar).entries(); },
      py::arg("selector"), py::arg("haar") = false);
  m.def(
      "sample_u2",
      [](std::uint64_t seed, bool haar) {
        const auto [p, u] = sample_u2(seed, haar);
        py::dict params;
        params["alpha"] = p.alpha;
        params["phi"] = p.phi;
        params["psi"] = p.psi;
        params["chi"] = p.chi;
        return py::make_tuple(params, Eigen::MatrixXcd(u.entries()));
      },
      py::arg("seed"), py::arg("haar") = false);
  m.def(
      "unitarity_defect", [](const Eigen::MatrixXcd& u) { return unitarity_defect(u); }, py::arg("matrix"));

  py::class_<FieldRecord>(m, "FieldRecord")
      .def_property_readonly("samples", [](const FieldRecord& r) { return r.samples; })
      .def_property_readonly("cells", [](const FieldRecord& r) { return r.cells; })
      .def_property_readonly("dt", [](const FieldRecord& r) { return r.dt; })
      .def_property_readonly("ez", [](const FieldRecord& r) { return samples_by_cells(r, r.ez_t); })
      .def_property_readonly("bx", [](const FieldRecord& r) { return samples_by_cells(r, r.bx_t); })
      .def_property_readonly("by", [](const FieldRecord& r) { return samples_by_cells(r, r.by_t); });

  m.def("inner_product", &inner_product, py::arg("a"), py::arg("b"));
  m.def("fidelity", &fidelity, py::arg("target"), py::arg("test"));

  m.def(
      "resolve_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
      py::arg("config_json"));

  m.def(
      "make_targets",
      [](const std::string& text) {
        const RunConfig cfg = config_from(text);
        py::gil_scoped_release release;
        return make_targets(cfg.setup, cfg.unitary(), cfg.resolved_workers());
      },
      py::arg("config_json"));

  m.def(
      "evaluate",
      [](const std::string& text, const PixelMap& pm) {
        const RunConfig cfg = config_from(text);
        FidelityReport r;
        {
          py::gil_scoped_release release;
          const UnitarySpec gate = cfg.unitary();
          const int workers = cfg.resolved_workers();
          r = DeviceEvaluator(cfg.setup, gate, make_targets(cfg.setup, gate, workers), workers).evaluate(pm);
        }
        return report_dict(r);
      },
      py::arg("config_json"), py::arg("pixel_map"));

  m.def(
      "sweep_wavelength",
      [](const std::string& text, const PixelMap& pm, std::vector<double> wavelengths_nm) {
        const RunConfig cfg = config_from(text);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep_wavelength(pm, cfg.setup, cfg.unitary(), wavelengths_nm, cfg.resolved_workers());
        }
        return sweep_list(r);
      },
      py::arg("config_json"), py::arg("pixel_map"), py::arg("wavelengths_nm"));

  m.def(
      "sweep_displacement",
      [](const std::string& text, const PixelMap& pm, std::vector<double> shifts_nm, int trials,
         std::uint64_t seed) {
        const RunConfig cfg = config_from(text);
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep_displacement(pm, cfg.setup, cfg.unitary(), shifts_nm, trials, seed, cfg.resolved_workers());
        }
        return sweep_list(r);
      },
      py::arg("config_json"), py::arg("pixel_map"), py::arg("shifts_nm"), py::arg("trials"), py::arg("seed"));

  m.def(
      "optimize",
      [](const std::string& text) {
        const RunConfig cfg = config_from(text);
        OptimizationResult r;
        {
          py::gil_scoped_release release;
          r = optimize(cfg.optimizer(), cfg.setup, cfg.unitary(), cfg.resolved_workers());
        }
        py::list log;
        for (const IterationEntry& e : r.log.entries) {
          py::dict d;
          d["level_pixel_nm"] = e.level_pixel_nm;
          d["pass"] = e.pass;
          d["pixel_index"] = e.pixel_index;
          d["kept"] = e.kept;
          d["fidelity"] = e.fidelity;
          log.append(d);
        }
        return py::make_tuple(r.best, r.fidelity, log);
      },
      py::arg("config_json"));
}
