#include "dpdwald/power.hpp"

#include "dpdwald/error.hpp"
#include "linalg.hpp"

#include <cmath>

namespace dpd {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

Matrix sigma_inverse(const ModelFamily& family, const Theta& theta, double beta) {
  return detail::spd_inverse(sandwich_covariance(family, theta, beta), "Sigma", nullptr);
}

Matrix restricted_precision(const ModelFamily& family, const Restriction& restriction, const Theta& theta,
                            double beta) {
  const Matrix big_m = restriction.M(theta);
  if (static_cast<std::size_t>(big_m.rows()) != family.dim() ||
      static_cast<std::size_t>(big_m.cols()) != restriction.r)
    throw RestrictionError("restriction dimensions do not match the family");
  const Matrix middle = big_m.transpose() * sandwich_covariance(family, theta, beta) * big_m;
  return detail::spd_inverse(middle, "M^T Sigma M", nullptr);
}

double normal_power(double n, double sigma_w, double crit, double l) {
  return std_normal_sf(std::sqrt(n) / sigma_w * (crit / n - l));
}

}  // namespace

double l_quadratic(const ModelFamily& family, const Theta& theta, const Theta& theta0, double beta) {
  family.check_theta(theta);
  family.check_theta(theta0);
  const Vector d = theta - theta0;
  return d.dot(sigma_inverse(family, theta0, beta) * d);
}

double sigma_w_squared(const ModelFamily& family, const Theta& theta_star, const Theta& theta0, double beta,
                       SigmaWForm form) {
  family.check_theta(theta_star);
  family.check_theta(theta0);
  const Vector d = theta_star - theta0;
  if (form == SigmaWForm::as_printed) return 4.0 * d.dot(sigma_inverse(family, theta_star, beta) * d);
  const Vector g = sigma_inverse(family, theta0, beta) * d;
  return 4.0 * g.dot(sandwich_covariance(family, theta_star, beta) * g);
}

PowerResult approx_power_simple(const ModelFamily& family, const Theta& theta0, const Theta& theta_star,
                                double beta, std::size_t n, double alpha, SigmaWForm form) {
  check_alpha(alpha);
  if (n == 0) throw DomainError("approx_power_simple: n must be at least 1");
  PowerResult r;
  r.mode = "approx";
  r.l_value = l_quadratic(family, theta_star, theta0, beta);
  const double s2 = sigma_w_squared(family, theta_star, theta0, beta, form);
  if (!(s2 > 0.0)) throw DomainError("approx_power_simple: theta* equals theta0, sigma_W is zero");
  r.sigma_w = std::sqrt(s2);
  r.critical_value = chi2_quantile(1.0 - alpha, static_cast<double>(family.dim()));
  r.power = normal_power(static_cast<double>(n), r.sigma_w, r.critical_value, r.l_value);
  return r;
}

SampleSizeResult required_sample_size(const ModelFamily& family, const Theta& theta_star, const Theta& theta0,
                                      double beta, double alpha, double target_power, SigmaWForm sigma_form,
                                      SampleSizeForm size_form) {
  check_alpha(alpha);
  if (!(target_power > 0.0 && target_power < 1.0)) throw DomainError("target power must lie in (0, 1)");
  SampleSizeResult s;
  s.l_value = l_quadratic(family, theta_star, theta0, beta);
  const double s2 = sigma_w_squared(family, theta_star, theta0, beta, sigma_form);
  if (!(s2 > 0.0) || !(s.l_value > 0.0)) throw DomainError("required_sample_size: theta* equals theta0");
  s.sigma_w = std::sqrt(s2);
  const double crit = chi2_quantile(1.0 - alpha, static_cast<double>(family.dim()));
  const double z = std_normal_quantile(target_power);
  const double l = s.l_value;
  s.a = s2 * z * z;
  if (size_form == SampleSizeForm::as_printed) {
    s.b = 0.5 * crit * l;
    s.n_star = (s.a + s.b + std::sqrt(s.a * (s.a + 2.0 * s.b))) / (2.0 * l * l);
  } else {
    // l n - z sigma sqrt(n) - crit = 0, solved for sqrt(n); valid for any target.
    s.b = 2.0 * crit * l;
    const double root = (z * s.sigma_w + std::sqrt(s.a + 4.0 * l * crit)) / (2.0 * l);
    s.n_star = root * root;
  }
  s.n = static_cast<std::size_t>(std::floor(s.n_star)) + 1;
  s.approx_power = normal_power(static_cast<double>(s.n), s.sigma_w, crit, l);
  return s;
}

PowerResult contiguous_power_simple(const ModelFamily& family, const Vector& d, const Theta& theta0, double beta,
                                   double alpha, NoncentralityForm form) {
  check_alpha(alpha);
  family.check_theta(theta0);
  if (static_cast<std::size_t>(d.size()) != family.dim()) throw InputError("contiguous_power_simple: d has wrong length");
  PowerResult r;
  r.mode = "contiguous";
  const Matrix a = form == NoncentralityForm::inverse ? sigma_inverse(family, theta0, beta)
                                                      : sandwich_covariance(family, theta0, beta);
  r.noncentrality = std::max(0.0, d.dot(a * d));
  const double p = static_cast<double>(family.dim());
  r.critical_value = chi2_quantile(1.0 - alpha, p);
  r.power = noncentral_chi2_sf(r.critical_value, p, r.noncentrality);
  return r;
}

double l_star(const ModelFamily& family, const Restriction& restriction, const Theta& theta1, const Theta& theta2,
              double beta) {
  const Vector m = restriction.m(theta1);
  return m.dot(restricted_precision(family, restriction, theta2, beta) * m);
}

PowerResult composite_power_approx(const ModelFamily& family, const Theta& theta_star,
                                   const Restriction& restriction, double beta, std::size_t n, double alpha) {
  check_alpha(alpha);
  family.check_theta(theta_star);
  if (n == 0) throw DomainError("composite_power_approx: n must be at least 1");
  PowerResult r;
  r.mode = "approx";
  const Matrix precision = restricted_precision(family, restriction, theta_star, beta);
  const auto l_at = [&](const Theta& t) {
    const Vector m = restriction.m(t);
    return m.dot(precision * m);
  };
  r.l_value = l_at(theta_star);
  if (!(r.l_value > 0.0)) throw DomainError("composite_power_approx: theta* satisfies the null");

  const auto p = theta_star.size();
  Vector grad(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = 1e-6 * std::max(std::fabs(theta_star(i)), 1e-3);
    Theta up = theta_star;
    Theta dn = theta_star;
    up(i) += h;
    dn(i) -= h;
    grad(i) = (l_at(up) - l_at(dn)) / (2.0 * h);
  }
  const double s2 = grad.dot(sandwich_covariance(family, theta_star, beta) * grad);
  if (!(s2 > 0.0)) throw DomainError("composite_power_approx: sigma_W is zero");
  r.sigma_w = std::sqrt(s2);
  r.critical_value = chi2_quantile(1.0 - alpha, static_cast<double>(restriction.r));
  r.power = normal_power(static_cast<double>(n), r.sigma_w, r.critical_value, r.l_value);
  return r;
}

PowerResult contiguous_power_composite_delta(const ModelFamily& family, const Restriction& restriction,
                                             const Vector& delta, const Theta& theta0, double beta, double alpha) {
  check_alpha(alpha);
  family.check_theta(theta0);
  if (static_cast<std::size_t>(delta.size()) != restriction.r)
    throw InputError("contiguous_power_composite: delta must have r entries");
  PowerResult r;
  r.mode = "contiguous";
  r.noncentrality = std::max(0.0, delta.dot(restricted_precision(family, restriction, theta0, beta) * delta));
  const double df = static_cast<double>(restriction.r);
  r.critical_value = chi2_quantile(1.0 - alpha, df);
  r.power = noncentral_chi2_sf(r.critical_value, df, r.noncentrality);
  return r;
}

PowerResult contiguous_power_composite(const ModelFamily& family, const Restriction& restriction, const Vector& d,
                                       const Theta& theta0, double beta, double alpha) {
  if (static_cast<std::size_t>(d.size()) != family.dim())
    throw InputError("contiguous_power_composite: d has wrong length");
  const Vector delta = restriction.M(theta0).transpose() * d;
  return contiguous_power_composite_delta(family, restriction, delta, theta0, beta, alpha);
}

}  // namespace dpd
