#pragma once

// Data-driven choice of beta by minimising an empirical mean square error.

#include "dpdwald/estimation.hpp"

#include <string>
#include <vector>

namespace dpd {

struct TuningResult {
  double beta_opt = 0.0;
  std::vector<double> grid;
  /// NaN where the fit at that grid point failed.
  std::vector<double> mse_curve;
  std::vector<bool> valid;
  double pilot_beta = 0.5;
  Theta theta_pilot;
  std::vector<std::string> warnings;
};

/// beta grid 0, 0.01, ..., 1.
std::vector<double> default_tuning_grid();

/// MSE(beta) = |theta_beta - theta_pilot|^2 + trace(Sigma(theta_beta)) / n,
/// minimised over the grid; ties go to the smaller beta.
TuningResult select_beta(FamilyPtr family, const Sample& sample, std::vector<double> grid = default_tuning_grid(),
                         double pilot_beta = 0.5, const FitOptions& options = {});

}  // namespace dpd
