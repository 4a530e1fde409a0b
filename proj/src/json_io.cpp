#include "dpdwald/json_io.hpp"

#include "dpdwald/error.hpp"

#include <cmath>
#include <fstream>

namespace dpd {

using nlohmann::json;

namespace {

Theta theta_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(std::string("scenario: '") + what + "' must be a nonempty array");
  Theta t(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) t(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return t;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

json to_json(const MdpdeFit& fit) {
  json j;
  j["family"] = fit.family ? fit.family->name() : "";
  if (fit.family) j["parameters"] = fit.family->parameter_names();
  j["beta"] = fit.beta;
  j["n"] = fit.n;
  j["theta_hat"] = to_json(fit.theta_hat);
  j["J"] = to_json(fit.J);
  j["K"] = to_json(fit.K);
  j["Sigma"] = to_json(fit.Sigma);
  j["objective_value"] = fit.objective_value;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["solver"] = fit.solver;
  json cands = json::array();
  for (const auto& c : fit.candidates) {
    cands.push_back({{"start", to_json(c.start)},
                     {"theta", to_json(c.theta)},
                     {"objective", c.objective},
                     {"converged", c.converged},
                     {"iterations", c.iterations}});
  }
  j["candidates"] = cands;
  return j;
}

json to_json(const WaldTestResult& r) {
  return {{"statistic", r.statistic},   {"df", r.df},
          {"alternative", to_string(r.alternative)},
          {"p_value", r.p_value},       {"beta", r.beta},
          {"n", r.n},                   {"null", r.null_description},
          {"reference", r.reference},   {"warnings", r.warnings}};
}

json to_json(const PowerResult& r) {
  return {{"mode", r.mode},
          {"power", r.power},
          {"noncentrality", r.noncentrality},
          {"sigma_w", r.sigma_w},
          {"l_value", r.l_value},
          {"critical_value", r.critical_value}};
}

json to_json(const SampleSizeResult& r) {
  return {{"n", r.n},           {"n_star", r.n_star},   {"A", r.a},
          {"B", r.b},           {"l_value", r.l_value}, {"sigma_w", r.sigma_w},
          {"approx_power", r.approx_power}};
}

json to_json(const TuningResult& r) {
  json j;
  j["beta_opt"] = r.beta_opt;
  j["pilot_beta"] = r.pilot_beta;
  j["theta_pilot"] = to_json(r.theta_pilot);
  j["grid"] = r.grid;
  json curve = json::array();
  for (std::size_t i = 0; i < r.mse_curve.size(); ++i) curve.push_back(r.valid[i] ? json(r.mse_curve[i]) : json());
  j["mse_curve"] = curve;
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const McReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"beta", c.beta},
                     {"n", c.n},
                     {"rejection_rate", c.rejection_rate},
                     {"mc_se", c.mc_se},
                     {"rejections", c.rejections},
                     {"completed", c.completed},
                     {"failures", c.failures},
                     {"flagged", c.flagged}});
  }
  return {{"scenario", r.scenario},
          {"replications", r.replications},
          {"nominal_alpha", r.nominal_alpha},
          {"seed", r.seed},
          {"cells", cells}};
}

json to_json(const AnalysisRun& r) {
  json j;
  j["dataset"] = r.dataset;
  j["family"] = r.family;
  j["null"] = r.null_description;
  j["test"] = r.test;
  j["beta_grid"] = r.beta_grid;
  json curves = json::object();
  for (const auto& c : r.curves) {
    json cj;
    cj["n"] = c.n;
    cj["removed"] = c.removed;
    json theta = json::array();
    json p = json::array();
    json stat = json::array();
    json p1 = json::array();
    json errors = json::array();
    for (const auto& pt : c.points) {
      theta.push_back(pt.ok ? to_json(pt.theta_hat) : json());
      p.push_back(pt.ok ? json(pt.p_value) : json());
      stat.push_back(pt.ok ? json(pt.statistic) : json());
      if (pt.p_value_one_sided) p1.push_back(*pt.p_value_one_sided);
      else if (r.family == "normal") p1.push_back(json());
      errors.push_back(pt.ok ? json() : json(pt.error));
    }
    cj["theta_hat"] = theta;
    cj["statistic"] = stat;
    cj["p_value"] = p;
    if (r.family == "normal") cj["p_value_one_sided"] = p1;
    cj["errors"] = errors;
    if (c.classical_two_sided) cj["classical_two_sided"] = to_json(*c.classical_two_sided);
    if (c.classical_one_sided) cj["classical_one_sided"] = to_json(*c.classical_one_sided);
    curves[c.label] = cj;
  }
  j["curves"] = curves;
  return j;
}

json to_json(const SweepResult& r) {
  json rows = json::array();
  for (const auto& row : r.p_values) {
    json a = json::array();
    for (double v : row) a.push_back(std::isfinite(v) ? json(v) : json());
    rows.push_back(a);
  }
  return {{"first_values", r.first_values}, {"betas", r.betas}, {"p_values", rows}};
}

McScenario scenario_from_json(const json& doc) {
  try {
    McScenario s;
    s.name = get_or<std::string>(doc, "name", "scenario");
    const json& law = doc.at("data_law");
    for (const auto& c : law.at("components"))
      s.data_law.components.push_back({make_family(c.at("family").get<std::string>()), theta_from(c.at("theta"), "theta")});
    s.data_law.weights = law.contains("weights") ? law.at("weights").get<std::vector<double>>()
                                                 : std::vector<double>(s.data_law.components.size() == 1 ? 1 : 0, 1.0);
    const json& test = doc.at("test");
    s.test.family = test.at("family").get<std::string>();
    const std::string kind = get_or<std::string>(test, "null", "simple");
    if (kind == "simple") {
      s.test.kind = NullKind::simple;
      s.test.theta0 = theta_from(test.at("theta0"), "theta0");
    } else if (kind == "component") {
      s.test.kind = NullKind::component;
      s.test.index = test.at("index").get<std::size_t>();
      s.test.value = test.at("value").get<double>();
    } else {
      throw InputError("scenario: test.null must be 'simple' or 'component'");
    }
    s.beta_grid = doc.at("beta_grid").get<std::vector<double>>();
    s.n_grid = doc.at("n_grid").get<std::vector<std::size_t>>();
    s.replications = get_or<std::size_t>(doc, "replications", 2000);
    s.nominal_alpha = get_or<double>(doc, "nominal_alpha", 0.05);
    s.seed = get_or<std::uint64_t>(doc, "seed", 1);
    s.workers = get_or<unsigned>(doc, "workers", 1);
    s.multistart = get_or<bool>(doc, "multistart", true);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
}

McScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError("scenario '" + path + "': " + e.what());
  }
  return scenario_from_json(doc);
}

json to_json(const McScenario& s) {
  json comps = json::array();
  for (const auto& c : s.data_law.components) comps.push_back({{"family", c.family->name()}, {"theta", to_json(c.theta)}});
  json test = {{"family", s.test.family}};
  if (s.test.kind == NullKind::simple) {
    test["null"] = "simple";
    test["theta0"] = to_json(s.test.theta0);
  } else {
    test["null"] = "component";
    test["index"] = s.test.index;
    test["value"] = s.test.value;
  }
  return {{"name", s.name},
          {"data_law", {{"components", comps}, {"weights", s.data_law.weights}}},
          {"test", test},
          {"beta_grid", s.beta_grid},
          {"n_grid", s.n_grid},
          {"replications", s.replications},
          {"nominal_alpha", s.nominal_alpha},
          {"seed", s.seed},
          {"workers", s.workers},
          {"multistart", s.multistart}};
}

}  // namespace dpd
