#include "dpdwald/special.hpp"

#include "dpdwald/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

namespace dpd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// Asymptotic Stirling series, accurate to ~1e-15 for x >= 10.
double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x > a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 200000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) with the complement y = 1 - x supplied separately so callers can
// avoid cancellation when x is close to 1.
double incomplete_beta_xy(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                           b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

void require_probability(double p, const char* fn) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(fn) + ": probability must lie in (0, 1)");
}

void require_positive(double v, const char* fn, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string(fn) + ": " + what + " must be positive and finite");
}

double chi2_log_pdf(double x, double df) {
  const double k = 0.5 * df;
  return (k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - log_gamma(k);
}

// Poisson(lambda) weights summed outward from the mode; `term(j)` must lie in [0, 1].
template <typename Term>
double poisson_mixture(double lambda, Term term) {
  const double mode = std::floor(lambda);
  const auto log_weight = [lambda](double j) {
    return -lambda + j * std::log(lambda) - log_gamma(j + 1.0);
  };
  double total = 0.0;
  for (double j = mode;; j += 1.0) {
    const double w = std::exp(log_weight(j));
    total += w * term(j);
    if (w < 1e-16 && j > mode + 1.0) break;
  }
  for (double j = mode - 1.0; j >= 0.0; j -= 1.0) {
    const double w = std::exp(log_weight(j));
    total += w * term(j);
    if (w < 1e-16) break;
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) {
    // Reflection keeps the Lanczos sum in its accurate range.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
  }
  if (x >= 10.0) return stirling_log_gamma(x);
  return lanczos_log_gamma(x);
}

double gamma_p(double a, double x) {
  require_positive(a, "gamma_p", "shape");
  if (x < 0.0) throw DomainError("gamma_p: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return std::clamp(gamma_series(a, x), 0.0, 1.0);
  return std::clamp(1.0 - gamma_continued_fraction(a, x), 0.0, 1.0);
}

double gamma_q(double a, double x) {
  require_positive(a, "gamma_q", "shape");
  if (x < 0.0) throw DomainError("gamma_q: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_continued_fraction(a, x), 0.0, 1.0);
}

double incomplete_beta(double x, double a, double b) {
  require_positive(a, "incomplete_beta", "a");
  require_positive(b, "incomplete_beta", "b");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x must lie in [0, 1]");
  return std::clamp(incomplete_beta_xy(x, 1.0 - x, a, b), 0.0, 1.0);
}

double chi2_cdf(double x, double df) {
  require_positive(df, "chi2_cdf", "degrees of freedom");
  if (x < 0.0) throw DomainError("chi2_cdf: x must be nonnegative");
  return gamma_p(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, double df) {
  require_positive(df, "chi2_sf", "degrees of freedom");
  if (x < 0.0) throw DomainError("chi2_sf: x must be nonnegative");
  return gamma_q(0.5 * df, 0.5 * x);
}

double chi2_quantile(double p, double df) {
  require_probability(p, "chi2_quantile");
  require_positive(df, "chi2_quantile", "degrees of freedom");
  // Solve in whichever tail keeps the target away from 1.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  const auto tail = [&](double x) { return upper ? chi2_sf(x, df) : chi2_cdf(x, df); };

  // Wilson-Hilferty starting point; for small p the leading term of the
  // lower series, P(a, x) ~ x^a / Gamma(a + 1), is far better.
  const double a = 0.5 * df;
  const double z = std_normal_quantile(p);
  const double c = 2.0 / (9.0 * df);
  double x = df * std::pow(std::max(1.0 - c + z * std::sqrt(c), 1e-3), 3.0);
  if (p < 0.05) x = std::min(x, 2.0 * std::exp((std::log(p) + log_gamma(a + 1.0)) / a));

  double lo = 0.0;
  double hi = std::max(2.0 * x, df + 10.0);
  while (chi2_cdf(hi, df) < p) hi *= 2.0;
  x = std::clamp(x, lo, hi);

  constexpr double tol = 4.0 * std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 400; ++iter) {
    const double diff = tail(x) - target;  // sign relative to the cdf depends on the tail
    const double cdf_minus_p = upper ? -diff : diff;
    if (cdf_minus_p == 0.0) return x;
    if (cdf_minus_p > 0.0)
      hi = x;
    else
      lo = x;
    double next = x - cdf_minus_p / std::exp(chi2_log_pdf(x, df));
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= tol * x) return next;
    x = next;
    if (hi - lo <= tol * hi) break;
  }
  return x;
}

double noncentral_chi2_cdf(double x, double df, double delta) {
  require_positive(df, "noncentral_chi2_cdf", "degrees of freedom");
  if (delta < 0.0 || !std::isfinite(delta))
    throw DomainError("noncentral_chi2_cdf: noncentrality must be nonnegative");
  if (x < 0.0) throw DomainError("noncentral_chi2_cdf: x must be nonnegative");
  if (delta == 0.0) return chi2_cdf(x, df);
  return poisson_mixture(0.5 * delta, [&](double j) { return chi2_cdf(x, df + 2.0 * j); });
}

double noncentral_chi2_sf(double x, double df, double delta) {
  require_positive(df, "noncentral_chi2_sf", "degrees of freedom");
  if (delta < 0.0 || !std::isfinite(delta))
    throw DomainError("noncentral_chi2_sf: noncentrality must be nonnegative");
  if (x < 0.0) throw DomainError("noncentral_chi2_sf: x must be nonnegative");
  if (delta == 0.0) return chi2_sf(x, df);
  return poisson_mixture(0.5 * delta, [&](double j) { return chi2_sf(x, df + 2.0 * j); });
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  require_probability(p, "std_normal_quantile");
  if (p > 0.5) return -std_normal_quantile(1.0 - p);

  // Acklam's rational approximation followed by Halley refinement.
  constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                       -2.759285104469687e+02, 1.383577518672690e+02,
                                       -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                       -1.556989798598866e+02, 6.680131188771972e+01,
                                       -1.328068155288572e+01};
  constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                       -2.400758277161838e+00, -2.549732539343734e+00,
                                       4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                       2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = std_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double student_t_sf(double x, double df) {
  require_positive(df, "student_t_sf", "degrees of freedom");
  if (std::isnan(x)) throw DomainError("student_t_sf: argument is NaN");
  if (x == 0.0) return 0.5;
  const double x2 = x * x;
  // Tail mass beyond |x|: 0.5 * I_{df/(df+x^2)}(df/2, 1/2).
  const double tail = 0.5 * incomplete_beta_xy(df / (df + x2), x2 / (df + x2), 0.5 * df, 0.5);
  return x > 0.0 ? tail : 1.0 - tail;
}

double student_t_cdf(double x, double df) {
  require_positive(df, "student_t_cdf", "degrees of freedom");
  return student_t_sf(-x, df);
}

void QuadratureSpec::validate() const {
  if (!(absolute_tolerance > 0.0) || !(relative_tolerance > 0.0))
    throw DomainError("QuadratureSpec: tolerances must be positive");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

namespace {

constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208034408924, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_21(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw NumericError("integrate: integrand is not finite at x = " + std::to_string(x));
    return v;
  };

  const double fc = eval(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  double resabs = std::fabs(kronrod);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = eval(center - dx);
    f2[j] = eval(center + dx);
    const double sum = f1[j] + f2[j];
    kronrod += kWgk[j] * sum;
    resabs += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kWgk[10] * std::fabs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double abs_half = std::fabs(half);
  const double result = kronrod * half;
  resabs *= abs_half;
  resasc *= abs_half;
  double error = std::fabs((kronrod - gauss) * half);
  if (resasc != 0.0 && error != 0.0) error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps))
    error = std::max(50.0 * kEps * resabs, error);
  return {a, b, result, error};
}

QuadratureResult adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec) {
  std::priority_queue<Segment> heap;
  const Segment first = gauss_kronrod_21(f, a, b);
  heap.push(first);
  double total = first.value;
  double total_error = first.error;
  int count = 1;
  const auto tolerance = [&] {
    return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::fabs(total));
  };
  while (total_error > tolerance()) {
    if (count >= spec.max_subdivisions) {
      throw QuadratureError("integrate: tolerance not reached within " +
                                std::to_string(spec.max_subdivisions) + " subdivisions",
                            total, total_error);
    }
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (std::fabs(worst.b - worst.a) <= 1e3 * kEps * std::max(std::fabs(mid), 1e-300)) {
      throw QuadratureError("integrate: roundoff prevents further subdivision", total, total_error);
    }
    heap.pop();
    const Segment left = gauss_kronrod_21(f, worst.a, mid);
    const Segment right = gauss_kronrod_21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
    // Recompute sums periodically to keep incremental drift out of the estimate.
    if (count % 64 == 0) {
      auto copy = heap;
      total = 0.0;
      total_error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, total_error, count};
}

}  // namespace

QuadratureResult integrate_with_error(const std::function<double(double)>& f, double lower,
                                      double upper, const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(lower) || std::isnan(upper)) throw DomainError("integrate: NaN bound");
  if (lower == upper) return {};
  if (lower > upper) {
    auto r = integrate_with_error(f, upper, lower, spec);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(lower);
  const bool upper_inf = std::isinf(upper);
  if (!lower_inf && !upper_inf) return adaptive(f, lower, upper, spec);

  // Map the infinite range onto [0, 1) with x = base +/- t / (1 - t). The
  // finite end sits at t = 0, where subdivision keeps full relative precision
  // around an endpoint singularity.
  std::function<double(double)> mapped;
  if (lower_inf && upper_inf) {
    mapped = [&f](double t) {
      const double u = 1.0 - t;
      const double s = t / u;
      return (f(s) + f(-s)) / (u * u);
    };
  } else if (upper_inf) {
    mapped = [&f, lower](double t) {
      const double u = 1.0 - t;
      return f(lower + t / u) / (u * u);
    };
  } else {
    mapped = [&f, upper](double t) {
      const double u = 1.0 - t;
      return f(upper - t / u) / (u * u);
    };
  }
  return adaptive(mapped, 0.0, 1.0, spec);
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSpec& spec) {
  return integrate_with_error(f, lower, upper, spec).value;
}

}  // namespace dpd
