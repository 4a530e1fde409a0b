#include "dpdwald/analysis.hpp"

#include "dpdwald/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace dpd {

namespace {

double parse_number(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && s[a] == ' ') ++a;
  while (b > a && s[b - 1] == ' ') --b;
  double v = 0.0;
  const char* first = s.data() + a;
  const char* last = s.data() + b;
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw InputError("cannot parse '" + s + "' as a number");
  return v;
}

struct ExampleDefinition {
  std::string family;
  bool simple;
  double null_value;
  std::size_t index;  // restricted component for composite nulls
};

ExampleDefinition definition(const std::string& name) {
  if (name == "leukemia") return {"exponential", true, 140.0, 0};
  if (name == "telephone" || name == "darwin") return {"normal", false, 0.0, 0};
  if (name == "aircon") return {"weibull", false, 0.85, 1};
  throw InputError("unknown example '" + name + "' (expected leukemia, telephone, darwin or aircon)");
}

AnalysisCurve run_curve(const ExampleDefinition& def, const FamilyPtr& family, const Sample& data,
                        const std::vector<double>& grid, Alternative one_sided) {
  AnalysisCurve curve;
  curve.n = data.size();
  const auto names = family->parameter_names();
  const Restriction restriction = Restriction::component(def.index, def.null_value, family->dim(), names[def.index]);
  std::vector<std::string> errors;
  const auto fits = fit_mdpde_path(family, data, grid, {}, &errors);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    AnalysisPoint pt;
    pt.beta = grid[i];
    if (!fits[i]) {
      pt.error = errors[i];
      curve.points.push_back(std::move(pt));
      continue;
    }
    try {
      const MdpdeFit& fit = *fits[i];
      pt.theta_hat = fit.theta_hat;
      const WaldTestResult w =
          def.simple ? simple_wald(fit, make_theta({def.null_value})) : composite_wald(fit, restriction);
      pt.statistic = w.statistic;
      pt.p_value = w.p_value;
      if (def.family == "normal") {
        const WaldTestResult s = signed_wald(fit, restriction, one_sided);
        pt.signed_statistic = s.statistic;
        pt.p_value_one_sided = s.p_value;
      }
      pt.ok = true;
    } catch (const NumericError& e) {
      pt.error = e.what();
    }
    curve.points.push_back(std::move(pt));
  }
  if (def.family == "normal" && data.size() >= 2) {
    try {
      curve.classical_two_sided = classical_t_test(data, def.null_value, Alternative::two_sided);
      curve.classical_one_sided = classical_t_test(data, def.null_value, one_sided);
    } catch (const NumericError&) {
    }
  }
  return curve;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw InputError("grid '" + spec + "' must look like start:step:stop");
    const double start = parse_number(parts[0]);
    const double step = parse_number(parts[1]);
    const double stop = parse_number(parts[2]);
    if (!(step > 0.0) || stop < start) throw InputError("grid '" + spec + "' needs step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e6) throw InputError("grid '" + spec + "' has too many points");
    for (long i = 0; i <= static_cast<long>(count); ++i) {
      // Round to 12 significant digits so 0.1 + 0.05 * k prints cleanly.
      const double v = start + step * static_cast<double>(i);
      out.push_back(std::round(v * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_number(part));
  }
  if (out.empty()) throw InputError("empty grid '" + spec + "'");
  return out;
}

std::vector<std::size_t> default_filter(const std::string& name, const std::vector<double>& values) {
  if (name == "leukemia") return {13, 15};
  if (name == "telephone") return {0};
  if (name == "darwin") return {0, 1};
  if (name == "aircon") {
    // Failure intervals above 400 hours are the outlying ones.
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] > 400.0) idx.push_back(i);
    return idx;
  }
  throw InputError("unknown example '" + name + "'");
}

AnalysisRun run_example(const std::string& name, const ExampleOptions& options) {
  const ExampleDefinition def = definition(name);
  NamedDataset data;
  if (name == "aircon") {
    if (options.data_file.empty())
      throw InputError("the aircon example has no embedded data; pass a data file");
    data = load_dataset(options.data_file);
  } else {
    data = load_dataset(options.data_file.empty() ? name : options.data_file);
  }
  for (double b : options.beta_grid)
    if (!(b >= 0.0)) throw InputError("beta grid values must be >= 0");

  const FamilyPtr family = make_family(def.family);
  AnalysisRun run;
  run.dataset = name;
  run.family = def.family;
  run.test = def.simple ? "simple" : "composite";
  run.beta_grid = options.beta_grid;
  const auto names = family->parameter_names();
  std::ostringstream desc;
  desc << names[def.index] << " = " << def.null_value;
  run.null_description = desc.str();

  const Sample full = data.sample();
  AnalysisCurve c_full = run_curve(def, family, full, options.beta_grid, options.one_sided);
  c_full.label = "full";
  run.curves.push_back(std::move(c_full));

  std::vector<std::size_t> removed = options.filter ? *options.filter : default_filter(name, data.values);
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
  const Sample reduced = full.without(removed);
  AnalysisCurve c_red = run_curve(def, family, reduced, options.beta_grid, options.one_sided);
  c_red.label = "filtered";
  c_red.removed = removed;
  run.curves.push_back(std::move(c_red));
  return run;
}

SweepResult telephone_sweep(const std::vector<double>& first_values, const std::vector<double>& betas) {
  SweepResult out;
  out.first_values = first_values;
  out.betas = betas;
  const FamilyPtr family = make_family("normal");
  const Restriction restriction = Restriction::component(0, 0.0, 2, "mu");
  std::vector<double> values = load_dataset("telephone").values;
  for (double v : first_values) {
    values[0] = v;
    const Sample data(values);
    std::vector<double> row;
    for (double b : betas) {
      try {
        row.push_back(composite_wald(fit_mdpde(family, data, b), restriction).p_value);
      } catch (const NumericError&) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    out.p_values.push_back(std::move(row));
  }
  return out;
}

}  // namespace dpd
