// Python bindings for the sta core. Scenario configs cross the boundary as JSON text.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sta/imaging.hpp"
#include "sta/scenario.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> column(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> triples(const std::vector<sta::AxisTriple>& v) {
  py::array_t<double> out({static_cast<py::ssize_t>(v.size()), static_cast<py::ssize_t>(sta::kAxes)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int j = 0; j < sta::kAxes; ++j) m(static_cast<py::ssize_t>(i), j) = v[i][j];
  }
  return out;
}

sta::Scenario scenario_from(const std::string& config, const std::string& base_dir) {
  return sta::parse_scenario(nlohmann::json::parse(config), base_dir);
}

py::dict run(const std::string& config, const std::string& output_dir, const std::string& base_dir) {
  sta::Scenario sc = scenario_from(config, base_dir);
  if (!output_dir.empty()) sc.output_dir = output_dir;
  sta::ScenarioResult res;
  {
    py::gil_scoped_release release;
    res = sta::run_scenario(sc);
  }
  const auto& samples = res.trajectory.samples;
  std::vector<double> t, cq, q_star, work;
  std::vector<sta::AxisTriple> b, bdot;
  for (const auto& s : samples) {
    t.push_back(s.t);
    cq.push_back(s.cq);
    b.push_back(s.b);
    bdot.push_back(s.bdot);
  }
  for (const auto& o : res.trajectory.observables) {
    q_star.push_back(o.q_star);
    work.push_back(o.mean_work);
  }
  py::dict out;
  out["name"] = res.name;
  out["directory"] = res.directory.string();
  out["summary"] = res.summary.dump();
  out["t"] = column(t);
  out["b"] = triples(b);
  out["bdot"] = triples(bdot);
  out["c_q"] = column(cq);
  out["q_star"] = column(q_star);
  out["work_over_h0"] = column(work);
  return out;
}

py::dict fit(const std::vector<double>& positions, const std::vector<double>& values) {
  sta::Profile p;
  p.positions = positions;
  p.values = values;
  const sta::GaussianFit f = sta::gaussian_fit(p);
  py::dict out;
  out["a0"] = f.a0;
  out["a1"] = f.a1;
  out["sigma"] = f.sigma;
  out["residual_norm"] = f.residual_norm;
  out["iterations"] = f.iterations;
  out["converged"] = f.converged;
  return out;
}

py::tuple synthesize(double a0, double a1, double sigma, double half_width, std::size_t points, double snr,
                     std::uint64_t seed) {
  const sta::Profile p = sta::synthesize_profile({a0, a1, sigma}, {half_width, points}, {snr, seed});
  return py::make_tuple(column(p.positions), column(p.values));
}

}  // namespace

PYBIND11_MODULE(_sta_core, m) {
  m.doc() = "Scaling dynamics, drive design and profile fitting for trapped Fermi gases";

  static py::exception<sta::Error> numerical(m, "NumericalError", PyExc_RuntimeError);
  static py::exception<sta::Error> validation(m, "ValidationError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sta::Error& e) {
      if (e.kind() == sta::ErrorKind::Validation) {
        py::set_error(validation, e.what());
      } else {
        py::set_error(numerical, e.what());
      }
    } catch (const nlohmann::json::exception& e) {
      py::set_error(validation, e.what());
    }
  });

  m.def("preset_names", &sta::preset_names);
  m.def("preset_config", [](const std::string& name) { return sta::preset_config(name).dump(); }, py::arg("name"));
  m.def("resolve", [](const std::string& config, const std::string& base_dir) {
    return sta::to_json(scenario_from(config, base_dir)).dump();
  }, py::arg("config"), py::arg("base_dir") = "");
  m.def("run_scenario", &run, py::arg("config"), py::arg("output_dir") = "", py::arg("base_dir") = "");
  m.def("design_scenario", [](const std::string& config, const std::string& output_dir, const std::string& base_dir) {
    sta::Scenario sc = scenario_from(config, base_dir);
    if (!output_dir.empty()) sc.output_dir = output_dir;
    return sta::design_scenario(sc).dump();
  }, py::arg("config"), py::arg("output_dir") = "", py::arg("base_dir") = "");
  m.def("gaussian_fit", &fit, py::arg("positions"), py::arg("values"));
  m.def("synthesize_profile", &synthesize, py::arg("a0"), py::arg("a1"), py::arg("sigma"), py::arg("half_width"),
        py::arg("points") = 201, py::arg("snr") = 0.0, py::arg("seed") = 0);
}
