#pragma once

// Special functions and adaptive quadrature shared by every other module.
// All functions are pure and reentrant.

#include <functional>
#include <limits>

namespace dpd {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Natural log of the gamma function for x > 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

double chi2_cdf(double x, double df);
/// Upper tail 1 - chi2_cdf without cancellation.
double chi2_sf(double x, double df);
double chi2_quantile(double p, double df);

/// Poisson mixture of central chi-square cdfs, truncated once the remaining
/// Poisson mass drops below 1e-14.
double noncentral_chi2_cdf(double x, double df, double delta);
double noncentral_chi2_sf(double x, double df, double delta);

double std_normal_cdf(double x);
double std_normal_sf(double x);
double std_normal_quantile(double p);

double student_t_cdf(double x, double df);
double student_t_sf(double x, double df);

struct QuadratureSpec {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-10;
  int max_subdivisions = 200;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Adaptive 21-point Gauss-Kronrod quadrature. Either bound may be infinite;
/// infinite ranges are mapped onto [0, 1) before subdivision. Throws
/// QuadratureError (carrying the best estimate) when the tolerance is not met
/// within max_subdivisions.
QuadratureResult integrate_with_error(const std::function<double(double)>& f, double lower,
                                      double upper, const QuadratureSpec& spec = {});

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec = {});

}  // namespace dpd
