// Thin pybind11 layer. Results cross the boundary as JSON text and are turned
// into dicts by the Python package.

#include "dpdwald/analysis.hpp"
#include "dpdwald/json_io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace dpd;

namespace {

Theta to_theta(const std::vector<double>& v) {
  if (v.empty()) throw InputError("parameter vector must not be empty");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SigmaWForm sigma_form(const std::string& s) {
  if (s == "delta") return SigmaWForm::delta_method;
  if (s == "printed") return SigmaWForm::as_printed;
  throw InputError("sigma_form must be 'delta' or 'printed'");
}

std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum DPD estimation and robust Wald-type tests";

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", input_error.ptr());
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("dataset", [](const std::string& name) { return load_dataset(name).values; }, py::arg("name"));

  m.def(
      "fit",
      [](const std::string& family, const std::vector<double>& data, double beta, bool multistart) {
        FitOptions o;
        o.multistart = multistart;
        return dump(to_json(fit_mdpde(make_family(family), Sample(data), beta, o)));
      },
      py::arg("family"), py::arg("data"), py::arg("beta"), py::arg("multistart") = true);

  m.def(
      "wald_test",
      [](const std::string& kind, const std::string& family, const std::vector<double>& data, double beta,
         const std::vector<double>& theta0, std::size_t index, double value, const std::string& alternative) {
        const auto fam = make_family(family);
        const MdpdeFit f = fit_mdpde(fam, Sample(data), beta);
        if (kind == "simple") return dump(to_json(simple_wald(f, to_theta(theta0))));
        if (kind == "composite") return dump(to_json(composite_wald(f, Restriction::component(index, value, fam->dim()))));
        if (kind == "signed") return dump(to_json(signed_wald(f, index, value, parse_alternative(alternative))));
        throw InputError("kind must be simple, composite or signed");
      },
      py::arg("kind"), py::arg("family"), py::arg("data"), py::arg("beta"), py::arg("theta0") = std::vector<double>{},
      py::arg("index") = 0, py::arg("value") = 0.0, py::arg("alternative") = "two-sided");

  m.def(
      "approx_power",
      [](const std::string& family, const std::vector<double>& theta0, const std::vector<double>& theta_star,
         double beta, std::size_t n, double alpha, const std::string& form) {
        return dump(to_json(approx_power_simple(*make_family(family), to_theta(theta0), to_theta(theta_star), beta, n,
                                                alpha, sigma_form(form))));
      },
      py::arg("family"), py::arg("theta0"), py::arg("theta_star"), py::arg("beta"), py::arg("n"),
      py::arg("alpha") = 0.05, py::arg("sigma_form") = "delta");

  m.def(
      "contiguous_power",
      [](const std::string& family, const std::vector<double>& theta0, const std::vector<double>& d, double beta,
         double alpha) {
        return dump(to_json(contiguous_power_simple(*make_family(family), to_theta(d), to_theta(theta0), beta, alpha)));
      },
      py::arg("family"), py::arg("theta0"), py::arg("d"), py::arg("beta"), py::arg("alpha") = 0.05);

  m.def(
      "sample_size",
      [](const std::string& family, const std::vector<double>& theta0, const std::vector<double>& theta_star,
         double beta, double alpha, double power, const std::string& sform, const std::string& size_form) {
        if (size_form != "exact" && size_form != "printed") throw InputError("size_form must be 'exact' or 'printed'");
        return dump(to_json(required_sample_size(*make_family(family), to_theta(theta_star), to_theta(theta0), beta,
                                                 alpha, power, sigma_form(sform),
                                                 size_form == "exact" ? SampleSizeForm::exact_inversion
                                                                      : SampleSizeForm::as_printed)));
      },
      py::arg("family"), py::arg("theta0"), py::arg("theta_star"), py::arg("beta"), py::arg("alpha") = 0.05,
      py::arg("power") = 0.8, py::arg("sigma_form") = "delta", py::arg("size_form") = "exact");

  m.def(
      "select_beta",
      [](const std::string& family, const std::vector<double>& data, std::optional<std::vector<double>> grid) {
        return dump(to_json(select_beta(make_family(family), Sample(data), grid ? *grid : default_tuning_grid())));
      },
      py::arg("family"), py::arg("data"), py::arg("grid") = py::none());

  m.def(
      "run_example",
      [](const std::string& name, const std::string& beta_grid, std::optional<std::vector<std::size_t>> filter,
         const std::string& data_file) {
        ExampleOptions o;
        o.beta_grid = parse_grid(beta_grid);
        o.filter = filter;
        o.data_file = data_file;
        return dump(to_json(run_example(name, o)));
      },
      py::arg("name"), py::arg("beta_grid") = "0:0.05:1", py::arg("filter") = py::none(), py::arg("data_file") = "");

  m.def(
      "simulate",
      [](const std::string& scenario_json, std::optional<std::uint64_t> seed) {
        McScenario s = scenario_from_json(nlohmann::json::parse(scenario_json));
        if (seed) s.seed = *seed;
        McReport r;
        {
          py::gil_scoped_release release;
          r = run_scenario(s);
        }
        return dump(to_json(r));
      },
      py::arg("scenario_json"), py::arg("seed") = py::none());
}
