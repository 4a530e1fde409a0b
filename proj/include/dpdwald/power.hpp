#pragma once

// Asymptotic power of the Wald-type tests and sample-size planning.

#include "dpdwald/hypothesis.hpp"

#include <string>

namespace dpd {

/// Variance of sqrt(n)(l(theta_hat) - l(theta*)) at a fixed alternative.
enum class SigmaWForm {
  /// 4 d^T Sigma0^{-1} Sigma* Sigma0^{-1} d with d = theta* - theta0 (delta method).
  delta_method,
  /// 4 d^T Sigma*^{-1} d, the commonly quoted form.
  as_printed,
};

/// Noncentrality of the simple test under theta0 + d / sqrt(n).
enum class NoncentralityForm {
  /// d^T Sigma0^{-1} d.
  inverse,
  /// d^T Sigma0 d, the commonly quoted form.
  as_printed,
};

enum class SampleSizeForm {
  /// Exact inversion of the normal power approximation.
  exact_inversion,
  /// (A + B + sqrt(A(A + 2B))) / (2 l^2) with B = chi2 l / 2, the commonly quoted form.
  as_printed,
};

struct PowerResult {
  double power = 0.0;
  double noncentrality = 0.0;  // contiguous mode
  double sigma_w = 0.0;        // approximation mode
  double l_value = 0.0;
  double critical_value = 0.0;
  std::string mode;
};

struct SampleSizeResult {
  std::size_t n = 0;
  double n_star = 0.0;
  double a = 0.0;
  double b = 0.0;
  double l_value = 0.0;
  double sigma_w = 0.0;
  double approx_power = 0.0;  // approx_power_simple at n
};

/// (theta - theta0)^T Sigma(theta0)^{-1} (theta - theta0).
double l_quadratic(const ModelFamily& family, const Theta& theta, const Theta& theta0, double beta);

double sigma_w_squared(const ModelFamily& family, const Theta& theta_star, const Theta& theta0, double beta,
                       SigmaWForm form = SigmaWForm::delta_method);

/// 1 - Phi( sqrt(n)/sigma_W (chi2_{p,alpha}/n - l(theta*)) ).
PowerResult approx_power_simple(const ModelFamily& family, const Theta& theta0, const Theta& theta_star,
                                double beta, std::size_t n, double alpha,
                                SigmaWForm form = SigmaWForm::delta_method);

SampleSizeResult required_sample_size(const ModelFamily& family, const Theta& theta_star, const Theta& theta0,
                                      double beta, double alpha, double target_power,
                                      SigmaWForm sigma_form = SigmaWForm::delta_method,
                                      SampleSizeForm size_form = SampleSizeForm::exact_inversion);

/// 1 - F_{chi2_p(delta)}(chi2_{p,alpha}).
PowerResult contiguous_power_simple(const ModelFamily& family, const Vector& d, const Theta& theta0, double beta,
                                   double alpha, NoncentralityForm form = NoncentralityForm::inverse);

/// l*(theta1, theta2) = m(theta1)^T [M^T Sigma M (theta2)]^{-1} m(theta1).
double l_star(const ModelFamily& family, const Restriction& restriction, const Theta& theta1, const Theta& theta2,
              double beta);

/// Normal approximation at a fixed alternative; the gradient of l*(., theta*)
/// is taken by central differences.
PowerResult composite_power_approx(const ModelFamily& family, const Theta& theta_star,
                                   const Restriction& restriction, double beta, std::size_t n, double alpha);

/// Noncentral chi2_r limit under theta0 + d / sqrt(n).
PowerResult contiguous_power_composite(const ModelFamily& family, const Restriction& restriction, const Vector& d,
                                       const Theta& theta0, double beta, double alpha);
/// Same under m(theta_n) = delta / sqrt(n).
PowerResult contiguous_power_composite_delta(const ModelFamily& family, const Restriction& restriction,
                                             const Vector& delta, const Theta& theta0, double beta, double alpha);

}  // namespace dpd
