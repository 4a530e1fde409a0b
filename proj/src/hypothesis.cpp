#include "dpdwald/hypothesis.hpp"

#include "dpdwald/error.hpp"
#include "linalg.hpp"

#include <cmath>
#include <cstdio>

namespace dpd {

namespace {

double sq(double x) { return x * x; }

WaldTestResult chi2_result(double w, int df, double beta, std::size_t n, std::string description) {
  WaldTestResult r;
  r.statistic = w;
  r.df = df;
  r.alternative = Alternative::two_sided;
  r.p_value = chi2_sf(std::max(w, 0.0), df);
  r.beta = beta;
  r.n = n;
  r.null_description = std::move(description);
  r.reference = "chi2";
  return r;
}

void require_family(const MdpdeFit& fit, const std::string& name, const char* op) {
  if (!fit.family || fit.family->name() != name)
    throw InputError(std::string(op) + ": requires a " + name + " fit");
}

void require_converged(const MdpdeFit& fit, const char* op) {
  if (!fit.converged) throw NumericError(std::string(op) + ": fit did not converge");
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "two-sided";
}

Alternative parse_alternative(const std::string& s) {
  if (s == "two-sided" || s == "two_sided" || s == "two") return Alternative::two_sided;
  if (s == "greater" || s == "g") return Alternative::greater;
  if (s == "less" || s == "l") return Alternative::less;
  throw InputError("unknown alternative '" + s + "' (expected two-sided, greater or less)");
}

Restriction Restriction::component(std::size_t index, double value, std::size_t dim, const std::string& name) {
  if (index >= dim) throw InputError("restriction: component index out of range");
  Restriction r;
  r.r = 1;
  r.m = [index, value](const Theta& t) {
    Vector v(1);
    v(0) = t(static_cast<Eigen::Index>(index)) - value;
    return v;
  };
  r.M = [index, dim](const Theta&) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), 1);
    m(static_cast<Eigen::Index>(index), 0) = 1.0;
    return m;
  };
  const std::string label = name.empty() ? "theta[" + std::to_string(index) + "]" : name;
  r.description = label + " = " + format_value(value);
  return r;
}

WaldTestResult simple_wald(const MdpdeFit& fit, const Theta& theta0) {
  require_converged(fit, "simple_wald");
  const ModelFamily& family = *fit.family;
  family.check_theta(theta0);
  std::vector<std::string> warnings;
  const Matrix sigma0 = sandwich_covariance(family, theta0, fit.beta);
  const Matrix precision = detail::spd_inverse(sigma0, "Sigma(theta0)", &warnings);
  const Vector d = fit.theta_hat - theta0;
  const double w = static_cast<double>(fit.n) * d.dot(precision * d);
  std::string desc = "theta = (";
  for (Eigen::Index i = 0; i < theta0.size(); ++i) desc += (i ? ", " : "") + format_value(theta0(i));
  desc += ")";
  auto r = chi2_result(w, static_cast<int>(family.dim()), fit.beta, fit.n, desc);
  r.warnings = std::move(warnings);
  return r;
}

WaldTestResult exp_simple_wald(const MdpdeFit& fit, double theta0) {
  require_family(fit, "exponential", "exp_simple_wald");
  require_converged(fit, "exp_simple_wald");
  if (!(theta0 > 0.0)) throw DomainError("exp_simple_wald: theta0 must be positive");
  const double w = static_cast<double>(fit.n) * sq(fit.theta_hat(0) - theta0) / (exp_h_factor(fit.beta) * sq(theta0));
  return chi2_result(w, 1, fit.beta, fit.n, "theta = " + format_value(theta0));
}

WaldTestResult exp_simple_wald(const Sample& sample, double beta, double theta0, const FitOptions& options) {
  return exp_simple_wald(fit_mdpde(make_family("exponential"), sample, beta, options), theta0);
}

WaldTestResult composite_wald(const MdpdeFit& fit, const Restriction& restriction) {
  require_converged(fit, "composite_wald");
  const ModelFamily& family = *fit.family;
  if (restriction.r == 0 || restriction.r > family.dim())
    throw RestrictionError("composite_wald: need 1 <= r <= p restrictions");
  const Vector m = restriction.m(fit.theta_hat);
  const Matrix big_m = restriction.M(fit.theta_hat);
  if (static_cast<std::size_t>(m.size()) != restriction.r || static_cast<std::size_t>(big_m.cols()) != restriction.r ||
      static_cast<std::size_t>(big_m.rows()) != family.dim())
    throw RestrictionError("composite_wald: restriction dimensions do not match the family");
  Eigen::JacobiSVD<Matrix> svd(big_m);
  if (!(svd.singularValues().minCoeff() > 1e-10)) throw RestrictionError("composite_wald: M(theta_hat) is rank deficient");

  std::vector<std::string> warnings;
  const Matrix middle = big_m.transpose() * fit.Sigma * big_m;
  const Matrix inv = detail::spd_inverse(middle, "M^T Sigma M", &warnings);
  const double w = static_cast<double>(fit.n) * m.dot(inv * m);
  auto r = chi2_result(w, static_cast<int>(restriction.r), fit.beta, fit.n, restriction.description);
  r.warnings = std::move(warnings);
  return r;
}

WaldTestResult normal_mean_wald(const MdpdeFit& fit, double mu0) {
  require_family(fit, "normal", "normal_mean_wald");
  require_converged(fit, "normal_mean_wald");
  const double b = fit.beta;
  const double w = static_cast<double>(fit.n) * sq(fit.theta_hat(0) - mu0) * std::pow(2.0 * b + 1.0, 1.5) /
                   (sq(fit.theta_hat(1)) * std::pow(b + 1.0, 3));
  return chi2_result(w, 1, b, fit.n, "mu = " + format_value(mu0));
}

WaldTestResult normal_mean_wald(const Sample& sample, double beta, double mu0, const FitOptions& options) {
  return normal_mean_wald(fit_mdpde(make_family("normal"), sample, beta, options), mu0);
}

double weibull_epsilon(double alpha, double gamma, double shape) {
  const double s = ((shape - 1.0) * gamma + alpha + 1.0) / shape;
  if (!(s > 0.0)) throw DomainError("weibull_epsilon: integral diverges");
  return std::exp(log_gamma(s) - s * std::log(gamma));
}

double weibull_kappa(double alpha, int delta, double gamma, double shape) {
  return shape * weibull_log_moment((shape - 1.0) * gamma + alpha, delta, gamma, shape);
}

Matrix weibull_r_tilde(double gamma, double shape) {
  const double p = shape;
  const double e0 = weibull_epsilon(0.0, gamma, p);
  const double ep = weibull_epsilon(p, gamma, p);
  const double e2p = weibull_epsilon(2.0 * p, gamma, p);
  const double k01 = weibull_kappa(0.0, 1, gamma, p);
  const double kp1 = weibull_kappa(p, 1, gamma, p);
  const double k2p1 = weibull_kappa(2.0 * p, 1, gamma, p);
  const double k02 = weibull_kappa(0.0, 2, gamma, p);
  const double kp2 = weibull_kappa(p, 2, gamma, p);
  const double k2p2 = weibull_kappa(2.0 * p, 2, gamma, p);
  Matrix r(2, 2);
  r(0, 0) = e0 - 2.0 * ep + e2p;
  r(0, 1) = (ep - e0) / p - k01 + 2.0 * kp1 - k2p1;
  r(1, 0) = r(0, 1);
  r(1, 1) = e0 / (p * p) + 2.0 * (k01 - kp1) / p + k02 - 2.0 * kp2 + k2p2;
  return r;
}

WaldTestResult weibull_scale_wald(const MdpdeFit& fit, double sigma0) {
  require_family(fit, "weibull", "weibull_scale_wald");
  require_converged(fit, "weibull_scale_wald");
  if (!(sigma0 > 0.0)) throw DomainError("weibull_scale_wald: sigma0 must be positive");
  const auto* weibull = dynamic_cast<const WeibullFamily*>(fit.family.get());
  const double b = fit.beta;
  const double sigma = fit.theta_hat(0);
  const double p = fit.theta_hat(1);

  const Matrix r1 = weibull_r_tilde(b + 1.0, p);
  Matrix k = weibull_r_tilde(2.0 * b + 1.0, p);
  if (weibull && weibull->k_form() == WeibullKForm::sandwich) {
    const double g = 1.0 + b;
    const double e0 = weibull_epsilon(0.0, g, p);
    Vector x(2);
    x(0) = weibull_epsilon(p, g, p) - e0;
    x(1) = e0 / p + weibull_kappa(0.0, 1, g, p) - weibull_kappa(p, 1, g, p);
    k -= x * x.transpose();
  }
  const double det = r1(0, 0) * r1(1, 1) - r1(0, 1) * r1(0, 1);
  Vector v(2);
  v << -r1(1, 1), r1(0, 1);
  const double denom = v.dot(k * v);
  if (!(denom > 0.0)) throw MatrixError("weibull_scale_wald: variance of sigma_hat is not positive");
  const double w = static_cast<double>(fit.n) * sq(sigma - sigma0) * sq(p / sigma) * sq(det) / denom;
  return chi2_result(w, 1, b, fit.n, "sigma = " + format_value(sigma0));
}

WaldTestResult weibull_scale_wald(const Sample& sample, double beta, double sigma0, WeibullKForm k_form,
                                  const FitOptions& options) {
  auto family = std::make_shared<WeibullFamily>(k_form);
  return weibull_scale_wald(fit_mdpde(family, sample, beta, options), sigma0);
}

double signed_p_value(double t, Alternative alternative, Reference reference, double df) {
  const bool normal = reference == Reference::normal || !(df >= 1.0);
  const auto sf = [&](double x) { return normal ? std_normal_sf(x) : student_t_sf(x, df); };
  switch (alternative) {
    case Alternative::greater: return sf(t);
    case Alternative::less: return sf(-t);
    case Alternative::two_sided: return std::min(1.0, 2.0 * sf(std::fabs(t)));
  }
  return 1.0;
}

WaldTestResult signed_wald(const MdpdeFit& fit, const Restriction& restriction, Alternative alternative,
                           Reference reference) {
  require_converged(fit, "signed_wald");
  if (restriction.r != 1) throw RestrictionError("signed_wald: needs exactly one restriction");
  const Vector m = restriction.m(fit.theta_hat);
  const Matrix big_m = restriction.M(fit.theta_hat);
  if (big_m.rows() != fit.theta_hat.size() || big_m.cols() != 1 || m.size() != 1)
    throw RestrictionError("signed_wald: restriction dimensions do not match the family");
  const double var = (big_m.transpose() * fit.Sigma * big_m)(0, 0);
  if (!(var > 0.0)) throw MatrixError("signed_wald: asymptotic variance is not positive");
  const double t = std::sqrt(static_cast<double>(fit.n)) * m(0) / std::sqrt(var);

  WaldTestResult r;
  r.statistic = t;
  r.df = 1;
  r.alternative = alternative;
  r.beta = fit.beta;
  r.n = fit.n;
  r.null_description = restriction.description;
  const double df = static_cast<double>(fit.n) - 1.0;
  const bool normal = reference == Reference::normal || df < 1.0;
  r.reference = normal ? "normal" : "t";
  if (!normal) r.df = static_cast<int>(fit.n) - 1;
  r.p_value = signed_p_value(t, alternative, reference, df);
  return r;
}

WaldTestResult signed_wald(const MdpdeFit& fit, std::size_t index, double null_value, Alternative alternative,
                           Reference reference) {
  const auto names = fit.family->parameter_names();
  const Restriction restriction =
      Restriction::component(index, null_value, fit.family->dim(), index < names.size() ? names[index] : "");
  return signed_wald(fit, restriction, alternative, reference);
}

WaldTestResult classical_t_test(const Sample& sample, double mu0, Alternative alternative) {
  const std::size_t n = sample.size();
  if (n < 2) throw DegenerateSampleError("classical_t_test: needs at least two observations");
  const double mean = sample.mean();
  double ss = 0.0;
  for (double x : sample.values()) ss += sq(x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateSampleError("classical_t_test: sample has zero variance");
  WaldTestResult r;
  r.statistic = std::sqrt(static_cast<double>(n)) * (mean - mu0) / sd;
  r.df = static_cast<int>(n) - 1;
  r.alternative = alternative;
  r.n = n;
  r.null_description = "mu = " + format_value(mu0);
  r.reference = "t";
  r.p_value = signed_p_value(r.statistic, alternative, Reference::student_t, static_cast<double>(n - 1));
  return r;
}

}  // namespace dpd
