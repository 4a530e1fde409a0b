#pragma once

// Minimum density power divergence estimation.

#include "dpdwald/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dpd {

enum class Solver {
  automatic,    // fixed point for the exponential family, Newton otherwise
  fixed_point,  // exponential only
  newton,       // damped Newton on the estimating equation, log-scale coordinates
};

struct FitOptions {
  std::optional<Theta> init;
  Solver solver = Solver::automatic;
  /// Try every family starting point (plus `init`) and keep the lowest objective.
  bool multistart = true;
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
  double step_tolerance = 1e-10;
};

struct FitCandidate {
  Theta start;
  Theta theta;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

struct MdpdeFit {
  FamilyPtr family;
  double beta = 0.0;
  std::size_t n = 0;
  Theta theta_hat;
  Matrix J;
  Matrix K;
  Matrix Sigma;
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string solver;
  std::vector<FitCandidate> candidates;
};

/// int f^{1+beta} - (1 + 1/beta) mean f^beta(X_i); at beta = 0 the negative
/// mean log-likelihood.
double dpd_objective(const ModelFamily& family, const Theta& theta, double beta, const Sample& sample);

/// mean u f^beta(X_i) - int u f^{1+beta}. The gradient of dpd_objective is
/// -(1 + beta) times this vector, for every beta >= 0.
Vector estimating_residual(const ModelFamily& family, const Theta& theta, double beta,
                           const Sample& sample);

/// Dimensionless size of a residual: max_i |scale_i r_i| / int f^{1+beta}.
double residual_norm(const ModelFamily& family, const Theta& theta, double beta, const Vector& residual);

/// One step of theta <- sum x e^{-b x/theta} / (sum e^{-b x/theta} - n b/(1+b)^2).
/// Throws NumericError when the denominator is not positive.
double exp_fixed_point_step(const Sample& sample, double beta, double theta);

MdpdeFit fit_mdpde(FamilyPtr family, const Sample& sample, double beta, const FitOptions& options = {});

/// Fits along a beta grid, warm-starting each point from the previous fit.
/// Entries are empty where the fit failed; `errors` (if given) gets the reason.
std::vector<std::optional<MdpdeFit>> fit_mdpde_path(FamilyPtr family, const Sample& sample,
                                                    const std::vector<double>& betas,
                                                    const FitOptions& options = {},
                                                    std::vector<std::string>* errors = nullptr);

}  // namespace dpd
