#include "dpdwald/tuning.hpp"

#include "dpdwald/error.hpp"

#include <cmath>
#include <limits>

namespace dpd {

std::vector<double> default_tuning_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

TuningResult select_beta(FamilyPtr family, const Sample& sample, std::vector<double> grid, double pilot_beta,
                         const FitOptions& options) {
  if (grid.empty()) throw InputError("select_beta: empty beta grid");
  for (double b : grid)
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("select_beta: grid values must be >= 0");

  TuningResult out;
  out.grid = grid;
  out.pilot_beta = pilot_beta;
  const MdpdeFit pilot = fit_mdpde(family, sample, pilot_beta, options);
  out.theta_pilot = pilot.theta_hat;

  std::vector<std::string> errors;
  const auto fits = fit_mdpde_path(family, sample, grid, options, &errors);
  const double n = static_cast<double>(sample.size());
  out.mse_curve.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  out.valid.assign(grid.size(), false);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!fits[i]) {
      out.warnings.push_back("beta = " + std::to_string(grid[i]) + " excluded: " + errors[i]);
      continue;
    }
    const Vector bias = fits[i]->theta_hat - pilot.theta_hat;
    const double mse = bias.squaredNorm() + fits[i]->Sigma.trace() / n;
    if (!std::isfinite(mse)) {
      out.warnings.push_back("beta = " + std::to_string(grid[i]) + " excluded: non-finite MSE");
      continue;
    }
    out.mse_curve[i] = mse;
    out.valid[i] = true;
    if (mse < best || (mse == best && grid[i] < out.beta_opt)) {
      best = mse;
      out.beta_opt = grid[i];
      found = true;
    }
  }
  if (!found) throw NumericError("select_beta: no grid point could be fitted");
  return out;
}

}  // namespace dpd
