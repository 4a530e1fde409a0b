#pragma once

// Wald-type tests built on the MDPDE and its sandwich covariance.

#include "dpdwald/estimation.hpp"

#include <functional>
#include <string>
#include <vector>

namespace dpd {

enum class Alternative { two_sided, greater, less };
/// Reference distribution of a signed statistic.
enum class Reference { student_t, normal };

std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& s);

/// Composite null m(theta) = 0 with r restrictions; M(theta) is the p x r
/// transpose of the Jacobian of m.
struct Restriction {
  std::size_t r = 0;
  std::function<Vector(const Theta&)> m;
  std::function<Matrix(const Theta&)> M;
  std::string description;

  /// theta_index = value, for a family of dimension `dim`.
  static Restriction component(std::size_t index, double value, std::size_t dim, const std::string& name = "");
};

struct WaldTestResult {
  double statistic = 0.0;
  int df = 0;
  Alternative alternative = Alternative::two_sided;
  double p_value = 1.0;
  double beta = 0.0;
  std::size_t n = 0;
  std::string null_description;
  /// "chi2", "t" or "normal".
  std::string reference = "chi2";
  std::vector<std::string> warnings;
};

/// n (theta_hat - theta0)^T Sigma(theta0)^{-1} (theta_hat - theta0), matrices at theta0.
WaldTestResult simple_wald(const MdpdeFit& fit, const Theta& theta0);

/// n (theta_hat - theta0)^2 / (h(beta) theta0^2) for the exponential mean.
WaldTestResult exp_simple_wald(const MdpdeFit& fit, double theta0);
WaldTestResult exp_simple_wald(const Sample& sample, double beta, double theta0, const FitOptions& options = {});

/// n m^T [M^T Sigma M]^{-1} m with everything evaluated at theta_hat.
WaldTestResult composite_wald(const MdpdeFit& fit, const Restriction& restriction);

/// n (mu_hat - mu0)^2 (2b+1)^{3/2} / (sigma_hat^2 (b+1)^3).
WaldTestResult normal_mean_wald(const MdpdeFit& fit, double mu0);
WaldTestResult normal_mean_wald(const Sample& sample, double beta, double mu0, const FitOptions& options = {});

/// H0: sigma = sigma0 with the Weibull shape as nuisance, through the
/// shape-only matrices R~ (the sigma dependence of J and K cancels).
WaldTestResult weibull_scale_wald(const MdpdeFit& fit, double sigma0);
WaldTestResult weibull_scale_wald(const Sample& sample, double beta, double sigma0,
                                  WeibullKForm k_form = WeibullKForm::closed_form, const FitOptions& options = {});

/// sqrt(n) m(theta_hat) / sqrt(M^T Sigma M) for a single restriction.
WaldTestResult signed_wald(const MdpdeFit& fit, const Restriction& restriction, Alternative alternative,
                           Reference reference = Reference::student_t);
WaldTestResult signed_wald(const MdpdeFit& fit, std::size_t index, double null_value, Alternative alternative,
                           Reference reference = Reference::student_t);

/// One-sample Student t test (sd with divisor n-1, t_{n-1} reference).
WaldTestResult classical_t_test(const Sample& sample, double mu0, Alternative alternative);

/// Tail probability of a signed statistic under the given reference.
double signed_p_value(double t, Alternative alternative, Reference reference, double df);

/// Shape-only Weibull building blocks used by weibull_scale_wald.
double weibull_epsilon(double alpha, double gamma, double shape);
double weibull_kappa(double alpha, int delta, double gamma, double shape);
/// R~_gamma(p): R_gamma = c D R~ D with D = diag(p/sigma, 1).
Matrix weibull_r_tilde(double gamma, double shape);

}  // namespace dpd
