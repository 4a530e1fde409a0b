#include "dpdwald/models.hpp"

#include "dpdwald/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dpd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

std::vector<double> sorted_copy(std::span<const double> data) {
  std::vector<double> v(data.begin(), data.end());
  std::sort(v.begin(), v.end());
  return v;
}

// Type-7 sample quantile of sorted data.
double sorted_quantile(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sample

Sample Sample::without(std::span<const std::size_t> indices) const {
  std::vector<bool> drop(values_.size(), false);
  for (std::size_t i : indices) {
    if (i >= values_.size())
      throw InputError("Sample::without: index " + std::to_string(i) + " out of range");
    drop[i] = true;
  }
  std::vector<double> kept;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!drop[i]) kept.push_back(values_[i]);
  return Sample(std::move(kept));
}

Sample Sample::scaled(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= c;
  return Sample(std::move(v));
}

Sample Sample::shifted(double c) const {
  std::vector<double> v = values_;
  for (double& x : v) x += c;
  return Sample(std::move(v));
}

// ---------------------------------------------------------------------------
// ModelFamily defaults

double ModelFamily::density(const Theta& theta, double x) const {
  check_theta(theta);
  check_observation(x);
  return std::exp(log_density(theta, x));
}

bool ModelFamily::in_support(double x) const {
  const Support s = support();
  if (!std::isfinite(x)) return false;
  if (std::isfinite(s.lower) && !(x > s.lower)) return false;
  if (std::isfinite(s.upper) && !(x < s.upper)) return false;
  return true;
}

void ModelFamily::check_theta(const Theta& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim())
    throw DomainError(name() + ": parameter vector must have length " + std::to_string(dim()));
  if (!in_domain(theta)) throw DomainError(name() + ": parameter outside the parameter space");
}

void ModelFamily::check_observation(double x) const {
  if (!in_support(x))
    throw DomainError(name() + ": observation " + std::to_string(x) + " outside the support");
}

Vector ModelFamily::score_power_integral(const Theta& theta, double gamma) const {
  return quadrature_score_power_integral(*this, theta, gamma);
}

Matrix ModelFamily::closed_form_j(const Theta&, double) const {
  throw NumericError(name() + ": no closed-form J matrix");
}

Matrix ModelFamily::closed_form_k(const Theta&, double) const {
  throw NumericError(name() + ": no closed-form K matrix");
}

// ---------------------------------------------------------------------------
// Exponential, mean parameterisation: f(x) = exp(-x/theta)/theta.

bool ExponentialFamily::in_domain(const Theta& theta) const {
  return theta.size() == 1 && theta(0) > 0.0 && std::isfinite(theta(0));
}

bool ExponentialFamily::in_support(double x) const { return x >= 0.0 && std::isfinite(x); }

double ExponentialFamily::log_density(const Theta& theta, double x) const {
  if (x < 0.0) return -kInfinity;
  return -x / theta(0) - std::log(theta(0));
}

Vector ExponentialFamily::score(const Theta& theta, double x) const {
  const double t = theta(0);
  Vector u(1);
  u(0) = (x - t) / (t * t);
  return u;
}

double ExponentialFamily::density_power_integral(const Theta& theta, double gamma) const {
  return std::pow(theta(0), 1.0 - gamma) / gamma;
}

Vector ExponentialFamily::score_power_integral(const Theta& theta, double gamma) const {
  Vector v(1);
  v(0) = std::pow(theta(0), -gamma) * (1.0 - gamma) / (gamma * gamma);
  return v;
}

Matrix ExponentialFamily::closed_form_j(const Theta& theta, double beta) const {
  Matrix j(1, 1);
  j(0, 0) = std::pow(theta(0), -2.0 - beta) * (1.0 + beta * beta) / std::pow(1.0 + beta, 3);
  return j;
}

Matrix ExponentialFamily::closed_form_k(const Theta& theta, double beta) const {
  Matrix k(1, 1);
  k(0, 0) = std::pow(theta(0), -2.0 - 2.0 * beta) *
            ((1.0 + 4.0 * beta * beta) / std::pow(1.0 + 2.0 * beta, 3) -
             beta * beta / std::pow(1.0 + beta, 4));
  return k;
}

double ExponentialFamily::quantile(const Theta& theta, double u) const {
  return -theta(0) * std::log1p(-u);
}

std::pair<double, double> ExponentialFamily::quadrature_frame(const Theta& theta) const {
  return {0.0, theta(0)};
}

std::vector<Theta> ExponentialFamily::starting_points(std::span<const double> data) const {
  const auto v = sorted_copy(data);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  const double median = sorted_quantile(v, 0.5);
  const double q1 = sorted_quantile(v, 0.25);
  std::vector<Theta> starts;
  for (double t : {mean, median / std::numbers::ln2, q1 / std::log(4.0 / 3.0), 0.5 * mean, 2.0 * mean})
    if (t > 0.0 && std::isfinite(t)) starts.push_back(make_theta({t}));
  return starts;
}

// ---------------------------------------------------------------------------
// Normal, theta = (mu, sigma).

bool NormalFamily::in_domain(const Theta& theta) const {
  return theta.size() == 2 && std::isfinite(theta(0)) && theta(1) > 0.0 && std::isfinite(theta(1));
}

double NormalFamily::log_density(const Theta& theta, double x) const {
  const double z = (x - theta(0)) / theta(1);
  return -0.5 * kLog2Pi - std::log(theta(1)) - 0.5 * z * z;
}

Vector NormalFamily::score(const Theta& theta, double x) const {
  const double s = theta(1);
  const double d = x - theta(0);
  Vector u(2);
  u(0) = d / (s * s);
  u(1) = (d * d - s * s) / (s * s * s);
  return u;
}

double NormalFamily::density_power_integral(const Theta& theta, double gamma) const {
  return std::exp(0.5 * (1.0 - gamma) * kLog2Pi) * std::pow(theta(1), 1.0 - gamma) / std::sqrt(gamma);
}

Vector NormalFamily::score_power_integral(const Theta& theta, double gamma) const {
  Vector v(2);
  v(0) = 0.0;
  v(1) = std::exp(0.5 * (1.0 - gamma) * kLog2Pi) * std::pow(theta(1), -gamma) / std::sqrt(gamma) *
         (1.0 - gamma) / gamma;
  return v;
}

Matrix NormalFamily::closed_form_j(const Theta& theta, double beta) const {
  const double s = theta(1);
  const double c = 1.0 / (std::sqrt(1.0 + beta) * std::exp(0.5 * beta * kLog2Pi) * std::pow(s, 2.0 + beta));
  Matrix j = Matrix::Zero(2, 2);
  j(0, 0) = c / (1.0 + beta);
  j(1, 1) = c * (beta * beta + 2.0) / ((1.0 + beta) * (1.0 + beta));
  return j;
}

Matrix NormalFamily::closed_form_k(const Theta& theta, double beta) const {
  const double s = theta(1);
  const double c = 1.0 / (std::pow(s, 2.0 + 2.0 * beta) * std::exp(beta * kLog2Pi));
  const double b2 = 1.0 + 2.0 * beta;
  Matrix k = Matrix::Zero(2, 2);
  k(0, 0) = c / std::pow(b2, 1.5);
  k(1, 1) = c * ((4.0 * beta * beta + 2.0) / (b2 * std::pow(b2, 1.5)) - beta * beta / std::pow(1.0 + beta, 3));
  return k;
}

double NormalFamily::quantile(const Theta& theta, double u) const {
  return theta(0) + theta(1) * std_normal_quantile(u);
}

Vector NormalFamily::coordinate_scale(const Theta& theta) const {
  Vector s(2);
  s << theta(1), theta(1);
  return s;
}

std::pair<double, double> NormalFamily::quadrature_frame(const Theta& theta) const {
  return {theta(0), theta(1)};
}

std::vector<Theta> NormalFamily::starting_points(std::span<const double> data) const {
  const auto v = sorted_copy(data);
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / n);
  const double median = sorted_quantile(v, 0.5);
  std::vector<double> dev;
  dev.reserve(v.size());
  for (double x : v) dev.push_back(std::fabs(x - median));
  std::sort(dev.begin(), dev.end());
  double madn = 1.482602218505602 * sorted_quantile(dev, 0.5);
  if (!(madn > 0.0)) madn = sd;
  const double iqr = (sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25)) / 1.3489795003921634;
  // 20% trimmed mean
  const auto cut = static_cast<std::size_t>(std::floor(0.2 * n));
  double trimmed = 0.0;
  for (std::size_t i = cut; i < v.size() - cut; ++i) trimmed += v[i];
  trimmed /= static_cast<double>(v.size() - 2 * cut);

  std::vector<Theta> starts;
  const auto push = [&](double m, double s) {
    if (std::isfinite(m) && s > 0.0 && std::isfinite(s)) starts.push_back(make_theta({m, s}));
  };
  push(mean, sd);
  push(median, madn);
  push(trimmed, iqr > 0.0 ? iqr : madn);
  push(median, 0.5 * madn);
  push(median, 2.0 * madn);
  return starts;
}

// ---------------------------------------------------------------------------
// Generic quadrature of the sandwich ingredients.

double integrate_against_density_power(const ModelFamily& family, const Theta& theta, double gamma,
                                       const std::function<double(double)>& phi,
                                       const QuadratureSpec& spec) {
  const auto [loc, scale] = family.quadrature_frame(theta);
  const Support s = family.support();
  const auto weight = [&](double x) -> double {
    if (!std::isfinite(x)) return 0.0;
    const double lf = family.log_density(theta, x);
    if (!std::isfinite(lf)) return 0.0;
    const double w = std::exp(gamma * lf);
    if (w == 0.0) return 0.0;
    return phi(x) * w;
  };
  if (std::isfinite(s.lower) && s.lower == 0.0 && loc == 0.0) {
    // Positive support: integrate over t = log(x / scale) so endpoint
    // singularities at 0 become smooth exponential tails.
    const auto g = [&](double t) {
      const double z = std::exp(t);
      const double x = scale * z;
      const double v = weight(x);
      return v == 0.0 ? 0.0 : v * x;
    };
    return integrate(g, -kInfinity, 0.0, spec) + integrate(g, 0.0, kInfinity, spec);
  }
  const auto g = [&](double z) { return weight(loc + scale * z) * scale; };
  const double lo = std::isfinite(s.lower) ? (s.lower - loc) / scale : -kInfinity;
  const double hi = std::isfinite(s.upper) ? (s.upper - loc) / scale : kInfinity;
  const double mid = std::clamp(0.0, lo, hi);
  return integrate(g, lo, mid, spec) + integrate(g, mid, hi, spec);
}

Vector quadrature_score_power_integral(const ModelFamily& family, const Theta& theta, double gamma,
                                       const QuadratureSpec& spec) {
  const auto p = static_cast<Eigen::Index>(family.dim());
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    v(i) = integrate_against_density_power(
        family, theta, gamma, [&](double x) { return family.score(theta, x)(i); }, spec);
  }
  return v;
}

namespace {

Matrix quadrature_outer(const ModelFamily& family, const Theta& theta, double gamma,
                        const QuadratureSpec& spec) {
  const auto p = static_cast<Eigen::Index>(family.dim());
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      m(i, j) = integrate_against_density_power(
          family, theta, gamma,
          [&](double x) {
            const Vector u = family.score(theta, x);
            return u(i) * u(j);
          },
          spec);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

void require_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("tuning parameter beta must be >= 0");
}

}  // namespace

Matrix quadrature_j_matrix(const ModelFamily& family, const Theta& theta, double beta,
                           const QuadratureSpec& spec) {
  require_beta(beta);
  family.check_theta(theta);
  return quadrature_outer(family, theta, 1.0 + beta, spec);
}

Matrix quadrature_k_matrix(const ModelFamily& family, const Theta& theta, double beta,
                           bool subtract_xi, const QuadratureSpec& spec) {
  require_beta(beta);
  family.check_theta(theta);
  Matrix k = quadrature_outer(family, theta, 1.0 + 2.0 * beta, spec);
  if (subtract_xi) {
    const Vector xi = quadrature_score_power_integral(family, theta, 1.0 + beta, spec);
    k -= xi * xi.transpose();
  }
  return k;
}

Matrix j_matrix(const ModelFamily& family, const Theta& theta, double beta) {
  require_beta(beta);
  family.check_theta(theta);
  Matrix j = family.has_closed_form_jk() ? family.closed_form_j(theta, beta)
                                         : quadrature_j_matrix(family, theta, beta);
  if (!j.allFinite()) throw NumericError(family.name() + ": J matrix is not finite");
  return j;
}

Matrix k_matrix(const ModelFamily& family, const Theta& theta, double beta) {
  require_beta(beta);
  family.check_theta(theta);
  Matrix k = family.has_closed_form_jk() ? family.closed_form_k(theta, beta)
                                         : quadrature_k_matrix(family, theta, beta);
  if (!k.allFinite()) throw NumericError(family.name() + ": K matrix is not finite");
  return k;
}

Matrix sandwich_covariance(const ModelFamily& family, const Theta& theta, double beta) {
  const Matrix j = j_matrix(family, theta, beta);
  const Matrix k = k_matrix(family, theta, beta);
  Eigen::FullPivLU<Matrix> lu(j);
  if (!lu.isInvertible()) throw MatrixError(family.name() + ": J matrix is singular");
  const Matrix j_inv = lu.inverse();
  Matrix sigma = j_inv * k * j_inv;
  return 0.5 * (sigma + sigma.transpose());
}

double exp_h_factor(double beta) {
  require_beta(beta);
  const double b = beta;
  const double poly = 1.0 + b * (4.0 + b * (9.0 + b * (14.0 + b * (13.0 + b * (8.0 + b * 4.0)))));
  return (1.0 + b) * (1.0 + b) * poly / ((1.0 + b * b) * (1.0 + b * b) * std::pow(1.0 + 2.0 * b, 3));
}

// ---------------------------------------------------------------------------

FamilyPtr make_family(const std::string& name) {
  if (name == "exponential" || name == "exp") return std::make_shared<ExponentialFamily>();
  if (name == "normal" || name == "norm" || name == "gaussian") return std::make_shared<NormalFamily>();
  if (name == "weibull") return std::make_shared<WeibullFamily>(WeibullKForm::closed_form);
  if (name == "weibull-sandwich") return std::make_shared<WeibullFamily>(WeibullKForm::sandwich);
  throw InputError("unknown model family '" + name + "'");
}

std::vector<double> draw(const ModelFamily& family, const Theta& theta, std::size_t n, Rng& rng) {
  family.check_theta(theta);
  std::vector<double> out(n);
  for (double& x : out) x = family.quantile(theta, rng.uniform01());
  return out;
}

Sample sample(const ModelFamily& family, const Theta& theta, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("sample: n must be at least 1");
  Rng rng(seed);
  return Sample(draw(family, theta, n, rng));
}

}  // namespace dpd
