#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atomreg/bounds.hpp"
#include "atomreg/distance.hpp"
#include "atomreg/experiments.hpp"
#include "atomreg/ingestion.hpp"
#include "atomreg/noise.hpp"
#include "atomreg/registration.hpp"
#include "atomreg/siden.hpp"

namespace py = pybind11;
using namespace atomreg;

namespace {

// Rows of (coeff, psi, tau_x, tau_y, sigma_x, sigma_y).
Pattern pattern_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 6) throw std::invalid_argument("expected an (n, 6) array");
  auto r = a.unchecked<2>();
  std::vector<Atom> atoms;
  for (py::ssize_t i = 0; i < r.shape(0); ++i) {
    atoms.push_back(Atom::make(r(i, 0), r(i, 1), Vec2(r(i, 2), r(i, 3)), Vec2(r(i, 4), r(i, 5))));
  }
  return Pattern(std::move(atoms));
}

py::array_t<double> pattern_to_array(const Pattern& p) {
  py::array_t<double> out({static_cast<py::ssize_t>(p.size()), py::ssize_t{6}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Atom& a = p[i];
    const auto row = static_cast<py::ssize_t>(i);
    w(row, 0) = a.coeff;
    w(row, 1) = a.psi;
    w(row, 2) = a.tau.x();
    w(row, 3) = a.tau.y();
    w(row, 4) = a.sigma.x();
    w(row, 5) = a.sigma.y();
  }
  return out;
}

RasterImage raster_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double extent) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  RasterImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), extent);
  std::copy(a.data(), a.data() + a.size(), img.pixels.begin());
  return img;
}

py::array_t<double> raster_to_array(const RasterImage& img) {
  py::array_t<double> out({static_cast<py::ssize_t>(img.height), static_cast<py::ssize_t>(img.width)});
  std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
  return out;
}

SweepConfig config_for(const std::string& subcommand, const std::string& text) {
  static const std::vector<std::pair<std::string, Subcommand>> names = {
      {"siden-sweep", Subcommand::SidenSweep}, {"error-sweep", Subcommand::ErrorSweep},
      {"grid-count", Subcommand::GridCount},   {"bounds", Subcommand::Bounds},
      {"register", Subcommand::Register},      {"decompose", Subcommand::Decompose},
  };
  for (const auto& [name, cmd] : names) {
    if (name == subcommand) {
      SweepConfig cfg = default_config(cmd);
      cfg.apply_text(text);
      cfg.validate();
      return cfg;
    }
  }
  throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
}

}  // namespace

PYBIND11_MODULE(_atomreg, m) {
  m.doc() = "Gaussian-atom pattern registration";

  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Atom>(m, "Atom")
      .def(py::init(&Atom::make), py::arg("coeff"), py::arg("psi"), py::arg("tau"), py::arg("sigma"))
      .def_readonly("coeff", &Atom::coeff)
      .def_readonly("psi", &Atom::psi)
      .def_readonly("tau", &Atom::tau)
      .def_readonly("sigma", &Atom::sigma)
      .def("value_at", &Atom::value_at)
      .def("__repr__", [](const Atom& a) {
        return "Atom(coeff=" + format_number(a.coeff) + ", psi=" + format_number(a.psi) + ", tau=(" +
               format_number(a.tau.x()) + ", " + format_number(a.tau.y()) + "), sigma=(" + format_number(a.sigma.x()) +
               ", " + format_number(a.sigma.y()) + "))";
      });

  py::class_<Pattern>(m, "Pattern")
      .def(py::init<std::vector<Atom>>(), py::arg("atoms"))
      .def_static("from_array", &pattern_from_array, py::arg("rows"),
                  "Pattern from an (n, 6) array of coeff, psi, tau_x, tau_y, sigma_x, sigma_y.")
      .def("to_array", &pattern_to_array)
      .def("__len__", &Pattern::size)
      .def("__getitem__",
           [](const Pattern& p, std::size_t i) {
             if (i >= p.size()) throw py::index_error();
             return p[i];
           })
      .def("value_at", &Pattern::value_at)
      .def("is_zero", &Pattern::is_zero)
      .def("to_csv", &pattern_to_csv)
      .def_static("from_csv", &pattern_from_csv);

  m.def("atom_inner_product", &atom_inner_product);
  m.def("inner_product", &pattern_inner_product);
  m.def("norm", &pattern_norm);
  m.def("smooth", &smooth_pattern, py::arg("p"), py::arg("rho"));
  m.def("translate", &translate_pattern, py::arg("p"), py::arg("u"));
  m.def("add", &add_patterns);
  m.def("scale", &scale_pattern);
  m.def("evaluate", [](const Pattern& p, int width, int height, double extent) {
    return raster_to_array(evaluate_pattern(p, RasterShape{width, height, extent}));
  });

  m.def("distance", py::overload_cast<const Pattern&, const Pattern&, const Vec2&>(&pattern_distance), py::arg("p"),
        py::arg("q"), py::arg("u"), "||p - q(. - u)||^2");
  m.def(
      "distance_derivative",
      [](const Pattern& p, double t, const Vec2& T) { return distance_derivative(p, Translation::make(t, T)); },
      py::arg("p"), py::arg("t"), py::arg("T"));
  m.def(
      "distance_second_derivative",
      [](const Pattern& p, double t, const Vec2& T) { return distance_second_derivative(p, Translation::make(t, T)); },
      py::arg("p"), py::arg("t"), py::arg("T"));

  m.def("delta_T", &delta_T, py::arg("p"), py::arg("T"));
  py::class_<SidenEstimate>(m, "SidenEstimate")
      .def_readonly("directions", &SidenEstimate::directions)
      .def_readonly("delta", &SidenEstimate::delta)
      .def_readonly("rho", &SidenEstimate::rho)
      .def("min_delta", &SidenEstimate::min_delta)
      .def("area", [](const SidenEstimate& e) { return siden_area(e); });
  m.def("siden_boundary", &siden_boundary, py::arg("p"), py::arg("n_directions") = 128, py::arg("rho") = 0.0);
  m.def("true_siden_boundary", py::overload_cast<const Pattern&, const Vec2&, double>(&true_siden_boundary),
        py::arg("p"), py::arg("T"), py::arg("t_max"));

  py::class_<TranslationGrid>(m, "TranslationGrid")
      .def_readonly("spacing", &TranslationGrid::spacing)
      .def_readonly("per_axis", &TranslationGrid::per_axis)
      .def_readonly("points", &TranslationGrid::points)
      .def_readonly("rho", &TranslationGrid::rho)
      .def("__len__", &TranslationGrid::size);
  m.def("build_grid", &build_grid, py::arg("p"), py::arg("rho"), py::arg("t_range"), py::arg("n_directions") = 128);

  py::class_<RegistrationResult>(m, "RegistrationResult")
      .def_readonly("translation", &RegistrationResult::translation)
      .def_readonly("distance_value", &RegistrationResult::distance_value)
      .def_readonly("iterations", &RegistrationResult::iterations)
      .def_readonly("converged", &RegistrationResult::converged)
      .def_readonly("grid_points", &RegistrationResult::grid_points);
  m.def(
      "two_stage_register",
      [](const Pattern& p, const Pattern& q, double rho, double t_range, int n_directions) {
        TwoStageOptions o;
        o.t_range = t_range;
        o.n_directions = n_directions;
        return two_stage_register(p, q, rho, o);
      },
      py::arg("p"), py::arg("q"), py::arg("rho"), py::arg("t_range") = 4.0, py::arg("n_directions") = 128);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init([](int L, double epsilon, double eta, double b) {
             NoiseSpec n;
             n.L = L;
             n.epsilon = epsilon;
             n.eta = eta;
             n.b = b;
             n.validate();
             return n;
           }),
           py::arg("L") = 750, py::arg("epsilon") = 0.1, py::arg("eta") = 0.0, py::arg("b") = 4.0)
      .def_readonly("L", &NoiseSpec::L)
      .def_readonly("epsilon", &NoiseSpec::epsilon)
      .def_readonly("eta", &NoiseSpec::eta)
      .def_readonly("b", &NoiseSpec::b);
  m.def(
      "gaussian_field",
      [](const NoiseSpec& n, std::uint64_t seed, std::uint64_t stream) { return sample_gaussian_field(n, seed, stream).pattern; },
      py::arg("noise"), py::arg("seed"), py::arg("stream") = 0);
  m.def("smoothed_noise_params", &smoothed_noise_params);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("r0_lb", &BoundReport::r0_lb)
      .def_readonly("r2_lb", &BoundReport::r2_lb)
      .def_readonly("r3_lb", &BoundReport::r3_lb)
      .def_readonly("tbar0", &BoundReport::tbar0)
      .def_readonly("eta0", &BoundReport::eta0)
      .def_readonly("rt0", &BoundReport::rt0)
      .def_readonly("probability", &BoundReport::probability)
      .def_readonly("diagnostics", &BoundReport::diagnostics)
      .def("to_text", &BoundReport::to_text);
  m.def("gaussian_bound", &gaussian_bound, py::arg("p"), py::arg("noise"), py::arg("s") = 2.0,
        py::arg("two_sided") = false, py::arg("sharpened") = false);
  py::class_<GenericBound>(m, "GenericBound")
      .def_readonly("nu0", &GenericBound::nu0)
      .def_readonly("ru0", &GenericBound::ru0)
      .def_readonly("diagnostic", &GenericBound::diagnostic);
  m.def("generic_bound", py::overload_cast<const Pattern&, double, bool>(&generic_bound), py::arg("p"), py::arg("nu"),
        py::arg("two_sided") = false);

  m.def("load_pattern_csv", &load_pattern_csv);
  m.def("save_pattern_csv", &save_pattern_csv);
  m.def(
      "load_raster",
      [](const std::string& path) {
        const RasterImage img = load_raster(path);
        return py::make_tuple(raster_to_array(img), img.extent);
      },
      py::arg("path"), "Returns (pixels, extent); pixels has shape (height, width).");
  m.def(
      "decompose",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pixels, double extent, int n_atoms) {
        return matching_pursuit(raster_from_array(pixels, extent), default_dictionary(extent), n_atoms);
      },
      py::arg("pixels"), py::arg("extent"), py::arg("n_atoms"));

  m.def(
      "run_sweep",
      [](const std::string& subcommand, const std::string& config_text) {
        const SweepConfig cfg = config_for(subcommand, config_text);
        py::gil_scoped_release release;
        if (subcommand == "siden-sweep") return run_siden_sweep(cfg);
        if (subcommand == "error-sweep") return run_error_sweep(cfg);
        if (subcommand == "grid-count") return run_grid_count(cfg);
        if (subcommand == "bounds") return run_bounds_report(cfg).csv;
        throw std::invalid_argument("'" + subcommand + "' is not a sweep");
      },
      py::arg("subcommand"), py::arg("config_text") = "",
      "Runs a sweep with 'key = value' overrides on the subcommand defaults and returns the CSV text.");
}
