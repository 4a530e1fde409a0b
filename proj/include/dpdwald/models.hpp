#pragma once

// Parametric families f_theta with their score functions and the sandwich
// matrices J_beta, K_beta evaluated at the model (g = f_theta).

#include "dpdwald/sample.hpp"
#include "dpdwald/special.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace dpd {

struct Support {
  double lower;
  double upper;
};

class ModelFamily {
public:
  virtual ~ModelFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual Support support() const = 0;
  virtual bool in_domain(const Theta& theta) const = 0;
  virtual bool has_closed_form_jk() const { return false; }

  // log_density and score are the unchecked inner-loop versions; density()
  // validates theta and x.
  virtual double log_density(const Theta& theta, double x) const = 0;
  virtual Vector score(const Theta& theta, double x) const = 0;

  /// Integral of f_theta^gamma over the support.
  virtual double density_power_integral(const Theta& theta, double gamma) const = 0;
  /// Integral of u_theta * f_theta^gamma; quadrature unless overridden.
  virtual Vector score_power_integral(const Theta& theta, double gamma) const;

  /// Only meaningful when has_closed_form_jk() is true.
  virtual Matrix closed_form_j(const Theta& theta, double beta) const;
  virtual Matrix closed_form_k(const Theta& theta, double beta) const;

  /// Inverse cdf, used for sampling.
  virtual double quantile(const Theta& theta, double u) const = 0;

  /// Coordinates constrained to (0, inf); optimisers work on their logs.
  virtual std::vector<bool> positive_coordinates() const = 0;
  /// Natural scale of each coordinate, used to make gradients dimensionless.
  virtual Vector coordinate_scale(const Theta& theta) const = 0;
  /// Location/scale used to standardise the variable of integration.
  virtual std::pair<double, double> quadrature_frame(const Theta& theta) const = 0;

  /// A handful of data-driven starting values for the estimating equations.
  virtual std::vector<Theta> starting_points(std::span<const double> data) const = 0;

  double density(const Theta& theta, double x) const;
  /// Open support interval unless a family overrides it.
  virtual bool in_support(double x) const;
  void check_theta(const Theta& theta) const;
  void check_observation(double x) const;
};

using FamilyPtr = std::shared_ptr<const ModelFamily>;

class ExponentialFamily final : public ModelFamily {
public:
  std::string name() const override { return "exponential"; }
  std::size_t dim() const override { return 1; }
  std::vector<std::string> parameter_names() const override { return {"theta"}; }
  Support support() const override { return {0.0, kInfinity}; }
  bool in_domain(const Theta& theta) const override;
  bool in_support(double x) const override;
  bool has_closed_form_jk() const override { return true; }
  double log_density(const Theta& theta, double x) const override;
  Vector score(const Theta& theta, double x) const override;
  double density_power_integral(const Theta& theta, double gamma) const override;
  Vector score_power_integral(const Theta& theta, double gamma) const override;
  Matrix closed_form_j(const Theta& theta, double beta) const override;
  Matrix closed_form_k(const Theta& theta, double beta) const override;
  double quantile(const Theta& theta, double u) const override;
  std::vector<bool> positive_coordinates() const override { return {true}; }
  Vector coordinate_scale(const Theta& theta) const override { return theta; }
  std::pair<double, double> quadrature_frame(const Theta& theta) const override;
  std::vector<Theta> starting_points(std::span<const double> data) const override;
};

/// theta = (mu, sigma).
class NormalFamily final : public ModelFamily {
public:
  std::string name() const override { return "normal"; }
  std::size_t dim() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"mu", "sigma"}; }
  Support support() const override { return {-kInfinity, kInfinity}; }
  bool in_domain(const Theta& theta) const override;
  bool has_closed_form_jk() const override { return true; }
  double log_density(const Theta& theta, double x) const override;
  Vector score(const Theta& theta, double x) const override;
  double density_power_integral(const Theta& theta, double gamma) const override;
  Vector score_power_integral(const Theta& theta, double gamma) const override;
  Matrix closed_form_j(const Theta& theta, double beta) const override;
  Matrix closed_form_k(const Theta& theta, double beta) const override;
  double quantile(const Theta& theta, double u) const override;
  std::vector<bool> positive_coordinates() const override { return {false, true}; }
  Vector coordinate_scale(const Theta& theta) const override;
  std::pair<double, double> quadrature_frame(const Theta& theta) const override;
  std::vector<Theta> starting_points(std::span<const double> data) const override;
};

/// How the Weibull K_beta is assembled. `closed_form` uses R_{1+2beta} alone;
/// `sandwich` also subtracts xi xi^T as for every other family.
enum class WeibullKForm { closed_form, sandwich };

/// theta = (sigma, p): scale then shape.
class WeibullFamily final : public ModelFamily {
public:
  explicit WeibullFamily(WeibullKForm k_form = WeibullKForm::closed_form) : k_form_(k_form) {}

  WeibullKForm k_form() const noexcept { return k_form_; }

  std::string name() const override { return "weibull"; }
  std::size_t dim() const override { return 2; }
  std::vector<std::string> parameter_names() const override { return {"sigma", "p"}; }
  Support support() const override { return {0.0, kInfinity}; }
  bool in_domain(const Theta& theta) const override;
  bool has_closed_form_jk() const override { return true; }
  double log_density(const Theta& theta, double x) const override;
  Vector score(const Theta& theta, double x) const override;
  double density_power_integral(const Theta& theta, double gamma) const override;
  Vector score_power_integral(const Theta& theta, double gamma) const override;
  Matrix closed_form_j(const Theta& theta, double beta) const override;
  Matrix closed_form_k(const Theta& theta, double beta) const override;
  double quantile(const Theta& theta, double u) const override;
  std::vector<bool> positive_coordinates() const override { return {true, true}; }
  Vector coordinate_scale(const Theta& theta) const override { return theta; }
  std::pair<double, double> quadrature_frame(const Theta& theta) const override;
  std::vector<Theta> starting_points(std::span<const double> data) const override;

private:
  WeibullKForm k_form_;
};

/// Accepts "exponential"/"exp", "normal"/"norm", "weibull"/"weibull-sandwich".
FamilyPtr make_family(const std::string& name);

/// J_beta(theta) = int u u^T f^{1+beta}; closed form when the family has one.
Matrix j_matrix(const ModelFamily& family, const Theta& theta, double beta);
/// K_beta(theta) = int u u^T f^{1+2beta} - xi xi^T (family-specific form).
Matrix k_matrix(const ModelFamily& family, const Theta& theta, double beta);
/// J^{-1} K J^{-1}: asymptotic covariance of sqrt(n)(theta_hat - theta).
Matrix sandwich_covariance(const ModelFamily& family, const Theta& theta, double beta);

/// Entrywise quadrature versions, independent of any closed form.
Matrix quadrature_j_matrix(const ModelFamily& family, const Theta& theta, double beta,
                           const QuadratureSpec& spec = {});
/// With `subtract_xi` false the xi xi^T correction is omitted.
Matrix quadrature_k_matrix(const ModelFamily& family, const Theta& theta, double beta,
                           bool subtract_xi = true, const QuadratureSpec& spec = {});
Vector quadrature_score_power_integral(const ModelFamily& family, const Theta& theta,
                                       double gamma, const QuadratureSpec& spec = {});
/// Integrates phi(x) * f_theta(x)^gamma over the support.
double integrate_against_density_power(const ModelFamily& family, const Theta& theta,
                                       double gamma, const std::function<double(double)>& phi,
                                       const QuadratureSpec& spec = {});

/// h(beta) = (1+beta)^2 P(beta) / ((1+beta^2)^2 (1+2beta)^3) with
/// P(beta) = 1 + 4b + 9b^2 + 14b^3 + 13b^4 + 8b^5 + 4b^6; the exponential MDPDE
/// has asymptotic variance h(beta) theta^2.
double exp_h_factor(double beta);

/// xi_{alpha,beta}(theta) = int (x/sigma)^alpha f_theta^beta(x) dx, closed form.
double weibull_xi(double alpha, double beta, const Theta& theta);
/// eta_{alpha,beta,gamma}(theta) = int (x/sigma)^alpha log(x/sigma)^beta f^gamma dx,
/// by quadrature on the log scale.
double weibull_eta(double alpha, int beta, double gamma, const Theta& theta,
                   const QuadratureSpec& spec = {});
/// R_gamma(theta) = int u u^T f^gamma dx assembled from xi and eta.
Matrix weibull_r_matrix(double gamma, const Theta& theta);
/// int_0^inf y^a log(y)^k exp(-gamma y^shape) dy.
double weibull_log_moment(double a, int k, double gamma, double shape,
                          const QuadratureSpec& spec = {});

/// n draws by inversion; identical for identical seeds.
Sample sample(const ModelFamily& family, const Theta& theta, std::size_t n, std::uint64_t seed);
std::vector<double> draw(const ModelFamily& family, const Theta& theta, std::size_t n, Rng& rng);

}  // namespace dpd
