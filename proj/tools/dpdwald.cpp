// Command-line front end. Results go to stdout as JSON; --csv writes a flat
// table next to it. Exit status: 0 ok, 2 bad input, 3 numeric failure.

#include "dpdwald/analysis.hpp"
#include "dpdwald/json_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using nlohmann::json;
using namespace dpd;

namespace {

constexpr int kInputError = 2;
constexpr int kNumericError = 3;

Theta to_theta(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw InputError(std::string("--") + what + " is required");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Solver parse_solver(const std::string& s) {
  if (s == "auto") return Solver::automatic;
  if (s == "fixed-point") return Solver::fixed_point;
  if (s == "newton") return Solver::newton;
  throw InputError("unknown solver '" + s + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string analysis_csv(const AnalysisRun& run) {
  std::ostringstream os;
  os << "curve,beta,ok";
  const auto names = make_family(run.family)->parameter_names();
  for (const auto& n : names) os << ',' << n;
  os << ",statistic,p_value,p_value_one_sided\n";
  for (const auto& c : run.curves)
    for (const auto& p : c.points) {
      os << c.label << ',' << num(p.beta) << ',' << (p.ok ? 1 : 0);
      for (std::size_t i = 0; i < names.size(); ++i)
        os << ',' << (p.ok ? num(p.theta_hat(static_cast<Eigen::Index>(i))) : "");
      os << ',' << (p.ok ? num(p.statistic) : "") << ',' << (p.ok ? num(p.p_value) : "") << ','
         << (p.p_value_one_sided ? num(*p.p_value_one_sided) : "") << '\n';
    }
  return os.str();
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "first_value,beta,p_value\n";
  for (std::size_t i = 0; i < s.first_values.size(); ++i)
    for (std::size_t j = 0; j < s.betas.size(); ++j)
      os << num(s.first_values[i]) << ',' << num(s.betas[j]) << ',' << num(s.p_values[i][j]) << '\n';
  return os.str();
}

std::vector<std::size_t> parse_indices(const std::string& spec) {
  std::vector<std::size_t> out;
  if (spec == "none" || spec.empty()) return out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    long v = -1;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
    }
    if (v < 0 || used != tok.size()) throw InputError("bad index '" + tok + "' in --filter");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Wald-type tests based on minimum density power divergence estimators"};
  app.require_subcommand(1);

  // Shared option storage; each subcommand binds what it needs.
  std::string family = "exponential", data, kind, mode, solver = "auto", alternative = "two-sided",
              reference = "t", sigma_form = "delta", size_form = "exact", nc_form = "inverse", grid, csv,
              filter, sweep, one_sided = "greater";
  double beta = 0.0, alpha = 0.05, target = 0.8, value = 0.0, pilot = 0.5;
  std::vector<double> theta0, theta_star, d;
  std::size_t n = 0, index = 0;
  bool single_start = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;

  auto* fit = app.add_subcommand("fit", "MDPDE of a family on a data set");
  fit->add_option("--family", family, "exponential | normal | weibull | weibull-sandwich");
  fit->add_option("--data", data, "built-in data set name or data file")->required();
  fit->add_option("--beta", beta, "DPD tuning parameter")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--solver", solver, "auto | fixed-point | newton");
  fit->add_flag("--single-start", single_start, "skip the multistart search");

  auto* test = app.add_subcommand("test", "Wald-type test");
  test->add_option("kind", kind, "simple | composite | signed")->required();
  test->add_option("--family", family);
  test->add_option("--data", data)->required();
  test->add_option("--beta", beta)->check(CLI::Range(0.0, 1.0));
  test->add_option("--theta0", theta0, "null parameter vector (simple)")->delimiter(',');
  test->add_option("--index", index, "restricted component (composite, signed)");
  test->add_option("--value", value, "null value of that component");
  test->add_option("--alternative", alternative, "two-sided | greater | less (signed)");
  test->add_option("--reference", reference, "t | normal (signed)");
  test->add_option("--solver", solver);

  auto* power = app.add_subcommand("power", "asymptotic power");
  power->add_option("mode", mode, "approx | contiguous")->required();
  power->add_option("--family", family);
  power->add_option("--theta0", theta0)->delimiter(',')->required();
  power->add_option("--theta-star", theta_star, "fixed alternative (approx)")->delimiter(',');
  power->add_option("--d", d, "local direction (contiguous)")->delimiter(',');
  power->add_option("--n", n, "sample size (approx)");
  power->add_option("--beta", beta)->check(CLI::Range(0.0, 1.0));
  power->add_option("--alpha", alpha);
  power->add_option("--index", index, "test theta[index] = theta0[index] instead of the full vector");
  auto* composite_flag = power->add_flag("--composite", "use the component null given by --index");
  power->add_option("--sigma-form", sigma_form, "delta | printed");
  power->add_option("--noncentrality-form", nc_form, "inverse | printed");

  auto* ss = app.add_subcommand("samplesize", "smallest n reaching a target power");
  ss->add_option("--family", family);
  ss->add_option("--theta0", theta0)->delimiter(',')->required();
  ss->add_option("--theta-star", theta_star)->delimiter(',')->required();
  ss->add_option("--alpha", alpha);
  ss->add_option("--power", target);
  ss->add_option("--beta", beta)->check(CLI::Range(0.0, 1.0));
  ss->add_option("--sigma-form", sigma_form, "delta | printed");
  ss->add_option("--size-form", size_form, "exact | printed");

  auto* tune = app.add_subcommand("tune", "data-driven choice of beta");
  tune->add_option("--family", family);
  tune->add_option("--data", data)->required();
  tune->add_option("--grid", grid, "beta grid, start:step:stop or a list");
  tune->add_option("--pilot-beta", pilot);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo level/power study");
  sim->add_option("scenario", data, "scenario JSON file")->required();
  sim->add_option("--seed", seed, "override the scenario seed");
  sim->add_option("--workers", workers, "override the worker count");
  sim->add_option("--csv", csv, "also write the cell table here");

  auto* ex = app.add_subcommand("example", "real-data analysis");
  ex->add_option("name", kind, "leukemia | telephone | darwin | aircon")->required();
  ex->add_option("--beta-grid", grid);
  ex->add_option("--filter", filter, "comma-separated zero-based indices to drop, or 'none'");
  ex->add_option("--data", data, "data file (aircon)");
  ex->add_option("--one-sided", one_sided, "direction of the one-sided tests");
  ex->add_option("--sweep-first", sweep, "telephone only: grid of values for the first observation");
  ex->add_option("--csv", csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kInputError;
  }

  try {
    FitOptions options;
    options.solver = parse_solver(solver);
    options.multistart = !single_start;
    const auto sigma = [&] {
      if (sigma_form == "delta") return SigmaWForm::delta_method;
      if (sigma_form == "printed") return SigmaWForm::as_printed;
      throw InputError("--sigma-form must be delta or printed");
    };

    if (*fit) {
      emit(to_json(fit_mdpde(make_family(family), load_dataset(data).sample(), beta, options)));
    } else if (*test) {
      const auto fam = make_family(family);
      const MdpdeFit f = fit_mdpde(fam, load_dataset(data).sample(), beta, options);
      json j;
      if (kind == "simple") {
        j = to_json(simple_wald(f, to_theta(theta0, "theta0")));
      } else if (kind == "composite") {
        j = to_json(composite_wald(f, Restriction::component(index, value, fam->dim())));
      } else if (kind == "signed") {
        if (reference != "t" && reference != "normal") throw InputError("--reference must be t or normal");
        j = to_json(signed_wald(f, index, value, parse_alternative(alternative),
                                reference == "t" ? Reference::student_t : Reference::normal));
      } else {
        throw InputError("test kind must be simple, composite or signed");
      }
      j["theta_hat"] = to_json(f.theta_hat);
      emit(j);
    } else if (*power) {
      const auto fam = make_family(family);
      const Theta t0 = to_theta(theta0, "theta0");
      const bool composite = composite_flag->count() > 0;
      if (mode == "approx") {
        if (n == 0) throw InputError("--n is required for approx power");
        const Theta ts = to_theta(theta_star, "theta-star");
        emit(to_json(composite ? composite_power_approx(*fam, ts, Restriction::component(index, t0(static_cast<Eigen::Index>(index)), fam->dim()),
                                                        beta, n, alpha)
                               : approx_power_simple(*fam, t0, ts, beta, n, alpha, sigma())));
      } else if (mode == "contiguous") {
        const Vector dv = to_theta(d, "d");
        if (nc_form != "inverse" && nc_form != "printed") throw InputError("--noncentrality-form must be inverse or printed");
        emit(to_json(composite ? contiguous_power_composite(*fam, Restriction::component(index, t0(static_cast<Eigen::Index>(index)), fam->dim()),
                                                            dv, t0, beta, alpha)
                               : contiguous_power_simple(*fam, dv, t0, beta, alpha,
                                                         nc_form == "inverse" ? NoncentralityForm::inverse
                                                                              : NoncentralityForm::as_printed)));
      } else {
        throw InputError("power mode must be approx or contiguous");
      }
    } else if (*ss) {
      if (size_form != "exact" && size_form != "printed") throw InputError("--size-form must be exact or printed");
      const auto fam = make_family(family);
      emit(to_json(required_sample_size(*fam, to_theta(theta_star, "theta-star"), to_theta(theta0, "theta0"), beta,
                                        alpha, target, sigma(),
                                        size_form == "exact" ? SampleSizeForm::exact_inversion
                                                             : SampleSizeForm::as_printed)));
    } else if (*tune) {
      const auto g = grid.empty() ? default_tuning_grid() : parse_grid(grid);
      emit(to_json(select_beta(make_family(family), load_dataset(data).sample(), g, pilot)));
    } else if (*sim) {
      McScenario s = load_scenario(data);
      if (seed) s.seed = *seed;
      if (workers) s.workers = *workers;
      const McReport r = run_scenario(s);
      if (!csv.empty()) write_file(csv, report_csv(r));
      emit({{"scenario", to_json(s)}, {"report", to_json(r)}});
    } else if (*ex) {
      if (!sweep.empty()) {
        if (kind != "telephone") throw InputError("--sweep-first applies to the telephone example only");
        const SweepResult r = telephone_sweep(parse_grid(sweep));
        if (!csv.empty()) write_file(csv, sweep_csv(r));
        emit(to_json(r));
      } else {
        ExampleOptions o;
        if (!grid.empty()) o.beta_grid = parse_grid(grid);
        if (!filter.empty()) o.filter = parse_indices(filter);
        o.data_file = data;
        o.one_sided = parse_alternative(one_sided);
        const AnalysisRun r = run_example(kind, o);
        if (!csv.empty()) write_file(csv, analysis_csv(r));
        emit(to_json(r));
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
