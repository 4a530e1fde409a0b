#include "dpdwald/models.hpp"

#include "dpdwald/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpd {

namespace {

std::vector<double> sorted_positive(std::span<const double> data) {
  std::vector<double> v;
  v.reserve(data.size());
  for (double x : data)
    if (x > 0.0 && std::isfinite(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v;
}

double type7_quantile(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

bool WeibullFamily::in_domain(const Theta& theta) const {
  return theta.size() == 2 && theta(0) > 0.0 && theta(1) > 0.0 && std::isfinite(theta(0)) &&
         std::isfinite(theta(1));
}

double WeibullFamily::log_density(const Theta& theta, double x) const {
  if (!(x > 0.0)) return -kInfinity;
  const double s = theta(0);
  const double p = theta(1);
  const double ly = std::log(x / s);
  return std::log(p / s) + (p - 1.0) * ly - std::exp(p * ly);
}

Vector WeibullFamily::score(const Theta& theta, double x) const {
  const double s = theta(0);
  const double p = theta(1);
  const double ly = std::log(x / s);
  const double yp = std::exp(p * ly);
  Vector u(2);
  u(0) = (p / s) * (yp - 1.0);
  u(1) = 1.0 / p + ly - yp * ly;
  return u;
}

double WeibullFamily::density_power_integral(const Theta& theta, double gamma) const {
  return weibull_xi(0.0, gamma, theta);
}

Vector WeibullFamily::score_power_integral(const Theta& theta, double gamma) const {
  const double s = theta(0);
  const double p = theta(1);
  Vector v(2);
  v(0) = (p / s) * (weibull_xi(p, gamma, theta) - weibull_xi(0.0, gamma, theta));
  v(1) = weibull_xi(0.0, gamma, theta) / p + weibull_eta(0.0, 1, gamma, theta) -
         weibull_eta(p, 1, gamma, theta);
  return v;
}

Matrix WeibullFamily::closed_form_j(const Theta& theta, double beta) const {
  return weibull_r_matrix(1.0 + beta, theta);
}

Matrix WeibullFamily::closed_form_k(const Theta& theta, double beta) const {
  Matrix k = weibull_r_matrix(1.0 + 2.0 * beta, theta);
  if (k_form_ == WeibullKForm::sandwich) {
    const Vector xi = score_power_integral(theta, 1.0 + beta);
    k -= xi * xi.transpose();
  }
  return k;
}

double WeibullFamily::quantile(const Theta& theta, double u) const {
  return theta(0) * std::pow(-std::log1p(-u), 1.0 / theta(1));
}

std::pair<double, double> WeibullFamily::quadrature_frame(const Theta& theta) const {
  return {0.0, theta(0)};
}

std::vector<Theta> WeibullFamily::starting_points(std::span<const double> data) const {
  const auto v = sorted_positive(data);
  std::vector<Theta> starts;
  if (v.empty()) return starts;
  const auto push = [&](double sigma, double p) {
    if (sigma > 0.0 && p > 0.0 && std::isfinite(sigma) && std::isfinite(p))
      starts.push_back(make_theta({sigma, p}));
  };

  // Quartile matching: log(x_q/sigma) = log(-log(1-q))/p.
  const double q1 = type7_quantile(v, 0.25);
  const double q3 = type7_quantile(v, 0.75);
  const double med = type7_quantile(v, 0.5);
  double p_quart = kInfinity;
  if (q3 > q1 && q1 > 0.0) {
    p_quart = std::log(std::log(4.0) / std::log(4.0 / 3.0)) / std::log(q3 / q1);
    push(med / std::pow(std::numbers::ln2, 1.0 / p_quart), p_quart);
  }

  // log X is Gumbel-min with sd pi/(p sqrt 6) and mean log(sigma) - euler/p.
  double ml = 0.0;
  for (double x : v) ml += std::log(x);
  ml /= static_cast<double>(v.size());
  double sl = 0.0;
  for (double x : v) sl += (std::log(x) - ml) * (std::log(x) - ml);
  if (v.size() > 1) sl = std::sqrt(sl / static_cast<double>(v.size() - 1));
  if (sl > 0.0) {
    const double p_mom = std::numbers::pi / (sl * std::sqrt(6.0));
    push(std::exp(ml + std::numbers::egamma / p_mom), p_mom);
    push(std::exp(ml + std::numbers::egamma / (2.0 * p_mom)), 2.0 * p_mom);
  }
  if (std::isfinite(p_quart)) push(med / std::pow(std::numbers::ln2, 0.5 / p_quart), 0.5 * p_quart);
  // Exponential fallback, also the only option for a single distinct value.
  double mean = 0.0;
  for (double x : v) mean += x;
  push(mean / static_cast<double>(v.size()), 1.0);
  return starts;
}

double weibull_xi(double alpha, double beta, const Theta& theta) {
  const double s = theta(0);
  const double p = theta(1);
  if (!(beta > 0.0)) throw DomainError("weibull_xi: beta must be positive");
  const double shape = (beta * p - beta + alpha + 1.0) / p;
  if (!(shape > 0.0)) throw DomainError("weibull_xi: integral diverges for these arguments");
  return std::exp((beta - 1.0) * std::log(p / s) - shape * std::log(beta) + log_gamma(shape));
}

double weibull_log_moment(double a, int k, double gamma, double shape, const QuadratureSpec& spec) {
  if (!(a > -1.0)) throw DomainError("weibull_log_moment: requires a > -1");
  if (!(gamma > 0.0) || !(shape > 0.0)) throw DomainError("weibull_log_moment: gamma and shape must be positive");
  if (k < 0) throw DomainError("weibull_log_moment: k must be nonnegative");

  // With y = e^t the integrand is t^k exp((a+1)t - gamma e^{shape t}); its
  // exponential part peaks at t0. Each side gets its own natural width.
  const double b = a + 1.0;
  const double t0 = std::log(b / (gamma * shape)) / shape;
  const double peak = b * t0 - gamma * std::exp(shape * t0);
  const auto g = [&](double t) {
    const double e = b * t - gamma * std::exp(shape * t) - peak;
    if (e < -745.0) return 0.0;
    return std::exp(e) * (k == 0 ? 1.0 : std::pow(t, k));
  };
  const double wl = 1.0 / b;
  const double wr = 1.0 / shape;
  const double left = integrate([&](double z) { return g(t0 - wl * z); }, 0.0, kInfinity, spec) * wl;
  const double right = integrate([&](double z) { return g(t0 + wr * z); }, 0.0, kInfinity, spec) * wr;
  return (left + right) * std::exp(peak);
}

double weibull_eta(double alpha, int beta, double gamma, const Theta& theta, const QuadratureSpec& spec) {
  const double s = theta(0);
  const double p = theta(1);
  const double a = alpha + gamma * p - gamma;
  return s * std::pow(p / s, gamma) * weibull_log_moment(a, beta, gamma, p, spec);
}

Matrix weibull_r_matrix(double gamma, const Theta& theta) {
  const double s = theta(0);
  const double p = theta(1);
  const double xi0 = weibull_xi(0.0, gamma, theta);
  const double xip = weibull_xi(p, gamma, theta);
  const double xi2p = weibull_xi(2.0 * p, gamma, theta);
  const double e01 = weibull_eta(0.0, 1, gamma, theta);
  const double ep1 = weibull_eta(p, 1, gamma, theta);
  const double e2p1 = weibull_eta(2.0 * p, 1, gamma, theta);
  const double e02 = weibull_eta(0.0, 2, gamma, theta);
  const double ep2 = weibull_eta(p, 2, gamma, theta);
  const double e2p2 = weibull_eta(2.0 * p, 2, gamma, theta);

  Matrix r(2, 2);
  r(0, 0) = (p / s) * (p / s) * (xi0 - 2.0 * xip + xi2p);
  r(0, 1) = (p / s) * (-xi0 / p - e01 + 2.0 * ep1 + xip / p - e2p1);
  r(1, 0) = r(0, 1);
  r(1, 1) = xi0 / (p * p) + e02 + e2p2 + 2.0 * e01 / p - 2.0 * ep2 - 2.0 * ep1 / p;
  return r;
}

}  // namespace dpd
