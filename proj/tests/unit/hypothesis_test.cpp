#include "dpdwald/hypothesis.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpd;

namespace {

const auto kExp = make_family("exponential");
const auto kNormal = make_family("normal");
const auto kWeibull = make_family("weibull");

double rel(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

TEST_CASE("simple Wald: null point and classical reduction") {
  const Sample s = sample(*kExp, make_theta({2.0}), 40, 1);
  const MdpdeFit fit0 = fit_mdpde(kExp, s, 0.0);
  const auto at_hat = simple_wald(fit0, fit0.theta_hat);
  CHECK(at_hat.statistic == 0.0);
  CHECK(at_hat.p_value == 1.0);

  // n (xbar - theta0)^2 / theta0^2: Fisher information 1/theta0^2 evaluated at theta0.
  for (double theta0 : {1.0, 2.0, 3.5}) {
    const double classical = 40.0 * std::pow(s.mean() - theta0, 2) / (theta0 * theta0);
    CHECK(simple_wald(fit0, make_theta({theta0})).statistic == doctest::Approx(classical).epsilon(1e-10));
  }

  const MdpdeFit nfit = fit_mdpde(kNormal, Sample(fixture::darwin), 0.0);
  const Theta th0 = make_theta({0.0, 30.0});
  const Vector d = nfit.theta_hat - th0;
  const double classical = 15.0 * (d(0) * d(0) / 900.0 + 2.0 * d(1) * d(1) / 900.0);
  const auto w = simple_wald(nfit, th0);
  CHECK(w.statistic == doctest::Approx(classical).epsilon(1e-10));
  CHECK(w.df == 2);
  CHECK(w.p_value == doctest::Approx(chi2_sf(classical, 2.0)).epsilon(1e-12));
}

TEST_CASE("leukemia classical Wald p-values") {
  const Sample full(fixture::leukemia);
  const std::size_t drop[] = {13, 15};
  const auto a = exp_simple_wald(full, 0.0, 140.0);
  CHECK(a.statistic == doctest::Approx(9.24).epsilon(0.01 / 9.24));
  CHECK(a.p_value == doctest::Approx(0.0024).epsilon(0.0002 / 0.0024));
  const auto b = exp_simple_wald(full.without(drop), 0.0, 140.0);
  CHECK(b.p_value == doctest::Approx(0.9733).epsilon(0.0002 / 0.9733));
}

TEST_CASE("exponential closed form equals the generic simple Wald path") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Sample s = sample(*kExp, make_theta({2.0}), 30 + seed, 77 + seed);
    for (double beta : {0.0, 0.1, 0.25, 0.5, 1.0}) {
      const MdpdeFit fit = fit_mdpde(kExp, s, beta);
      for (double theta0 : {1.5, 2.0, 2.5}) {
        CHECK(rel(exp_simple_wald(fit, theta0).statistic, simple_wald(fit, make_theta({theta0})).statistic) < 1e-10);
      }
      CHECK(exp_simple_wald(fit, fit.theta_hat(0)).statistic == 0.0);
    }
  }
}

TEST_CASE("composite Wald: normal mean") {
  const Sample s(fixture::telephone);
  const MdpdeFit fit0 = fit_mdpde(kNormal, s, 0.0);
  const Restriction mean0 = Restriction::component(0, 0.0, 2, "mu");
  const auto w = composite_wald(fit0, mean0);
  const double mu = fit0.theta_hat(0), sd = fit0.theta_hat(1);
  CHECK(w.statistic == doctest::Approx(14.0 * mu * mu / (sd * sd)).epsilon(1e-10));
  CHECK(w.df == 1);
  CHECK(composite_wald(fit0, Restriction::component(0, mu, 2)).statistic == doctest::Approx(0.0).scale(1.0));

  // Multiplier (2b + 1)^{3/2} / (b + 1)^3.
  CHECK(std::pow(2.0, 1.5) / 3.375 == doctest::Approx(0.83805).epsilon(1e-5));
  for (double beta : {0.0, 0.15, 0.5, 1.0}) {
    const MdpdeFit fit = fit_mdpde(kNormal, s, beta);
    const double m = std::pow(2.0 * beta + 1.0, 1.5) / std::pow(beta + 1.0, 3);
    const double expected = 14.0 * std::pow(fit.theta_hat(0), 2) * m / std::pow(fit.theta_hat(1), 2);
    CHECK(normal_mean_wald(fit, 0.0).statistic == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("normal closed form equals the generic composite path") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Sample s = sample(*kNormal, make_theta({0.3, 1.5}), 25 + seed % 10, 300 + seed);
    for (double beta : {0.0, 0.2, 0.5}) {
      const MdpdeFit fit = fit_mdpde(kNormal, s, beta);
      const Restriction r = Restriction::component(0, 0.0, 2);
      CHECK(rel(normal_mean_wald(fit, 0.0).statistic, composite_wald(fit, r).statistic) < 1e-10);
    }
  }
}

TEST_CASE("Weibull closed form equals the generic composite path") {
  for (auto form : {WeibullKForm::closed_form, WeibullKForm::sandwich}) {
    auto fam = std::make_shared<WeibullFamily>(form);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Sample s = sample(*fam, make_theta({1.5, 1.5}), 60, 900 + seed);
      for (double beta : {0.0, 0.2, 0.5}) {
        const MdpdeFit fit = fit_mdpde(fam, s, beta);
        for (double sigma0 : {1.0, 1.5, 2.0}) {
          const Restriction r = Restriction::component(0, sigma0, 2);
          CHECK(rel(weibull_scale_wald(fit, sigma0).statistic, composite_wald(fit, r).statistic) < 1e-8);
        }
        CHECK(weibull_scale_wald(fit, fit.theta_hat(0)).statistic == 0.0);
      }
    }
  }
}

TEST_CASE("Weibull beta = 0 is the classical Wald test with quadrature Fisher information") {
  const Sample s = sample(*kWeibull, make_theta({1.5, 1.5}), 80, 4);
  const MdpdeFit fit = fit_mdpde(kWeibull, s, 0.0);
  const Matrix info = quadrature_j_matrix(*kWeibull, fit.theta_hat, 0.0);
  const double var = info.inverse()(0, 0);
  const double expected = 80.0 * std::pow(fit.theta_hat(0) - 1.2, 2) / var;
  CHECK(weibull_scale_wald(fit, 1.2).statistic == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("signed statistic") {
  const Sample s(fixture::darwin);
  for (double beta : {0.0, 0.15, 0.3}) {
    const MdpdeFit fit = fit_mdpde(kNormal, s, beta);
    const auto g = signed_wald(fit, 0, 0.0, Alternative::greater);
    const auto l = signed_wald(fit, 0, 0.0, Alternative::less);
    const auto two = composite_wald(fit, Restriction::component(0, 0.0, 2));
    CHECK(g.statistic * g.statistic == doctest::Approx(two.statistic).epsilon(1e-12));
    CHECK(g.p_value + l.p_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.reference == "t");
    CHECK(g.df == 14);
    const auto at_hat = signed_wald(fit, 0, fit.theta_hat(0), Alternative::greater);
    CHECK(at_hat.p_value == doctest::Approx(0.5).epsilon(1e-12));
    const auto z = signed_wald(fit, 0, 0.0, Alternative::greater, Reference::normal);
    CHECK(z.p_value == doctest::Approx(std_normal_sf(g.statistic)).epsilon(1e-12));
    CHECK(z.p_value < g.p_value);  // t tails are heavier
  }
  const MdpdeFit fit = fit_mdpde(kNormal, s, 0.2);
  CHECK_THROWS_AS(signed_wald(fit, 5, 0.0, Alternative::greater), InputError);
}

TEST_CASE("statistic grows with the distance to the null") {
  const Sample s(fixture::telephone);
  const MdpdeFit fit = fit_mdpde(kNormal, s, 0.2);
  double prev = -1.0;
  for (double off = 0.0; off <= 400.0; off += 10.0) {
    const double w = composite_wald(fit, Restriction::component(0, fit.theta_hat(0) - off, 2)).statistic;
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("restriction validation") {
  const MdpdeFit fit = fit_mdpde(kNormal, Sample(fixture::darwin), 0.1);
  Restriction flat;
  flat.r = 1;
  flat.m = [](const Theta& t) { Vector v(1); v(0) = t(0); return v; };
  flat.M = [](const Theta&) { return Matrix::Zero(2, 1).eval(); };
  CHECK_THROWS_AS(composite_wald(fit, flat), RestrictionError);
  Restriction wrong = Restriction::component(0, 0.0, 3);
  CHECK_THROWS_AS(composite_wald(fit, wrong), RestrictionError);

  // Two restrictions on a two-parameter family: equals the simple test with matrices at theta_hat.
  Restriction both;
  both.r = 2;
  both.m = [](const Theta& t) { return (t - make_theta({0.0, 30.0})).eval(); };
  both.M = [](const Theta&) { return Matrix::Identity(2, 2).eval(); };
  const auto w = composite_wald(fit, both);
  const Vector d = fit.theta_hat - make_theta({0.0, 30.0});
  CHECK(w.statistic == doctest::Approx(15.0 * d.dot(fit.Sigma.inverse() * d)).epsilon(1e-10));
  CHECK(w.df == 2);
}

TEST_CASE("classical t test") {
  const auto two = classical_t_test(Sample(fixture::telephone), 0.0, Alternative::two_sided);
  const auto one = classical_t_test(Sample(fixture::telephone), 0.0, Alternative::greater);
  CHECK(one.p_value == doctest::Approx(two.p_value / 2.0).epsilon(1e-12));
  CHECK(two.df == 13);
  const auto darwin = classical_t_test(Sample(fixture::darwin), 0.0, Alternative::greater);
  CHECK(darwin.p_value == doctest::Approx(0.025).epsilon(0.003 / 0.025));
  CHECK_THROWS_AS(classical_t_test(Sample({1.0}), 0.0, Alternative::greater), DegenerateSampleError);
  CHECK(parse_alternative("greater") == Alternative::greater);
  CHECK(to_string(Alternative::two_sided) == "two-sided");
  CHECK_THROWS_AS(parse_alternative("sideways"), InputError);
}

TEST_CASE("chi-square calibration under the null") {
  // 2000 replications at n = 200; rejection rate at 0.05 must lie in [0.035, 0.065].
  for (double beta : {0.0, 0.2, 0.5}) {
    int rej_exp = 0, rej_norm = 0;
    for (std::uint64_t r = 0; r < 2000; ++r) {
      const Sample e = sample(*kExp, make_theta({2.0}), 200, stream_seed(17, 1, r));
      rej_exp += exp_simple_wald(e, beta, 2.0).p_value < 0.05;
      const Sample z = sample(*kNormal, make_theta({0.0, 1.0}), 200, stream_seed(17, 2, r));
      FitOptions quick;
      quick.multistart = false;
      rej_norm += normal_mean_wald(z, beta, 0.0, quick).p_value < 0.05;
    }
    CAPTURE(beta);
    CHECK(rej_exp / 2000.0 >= 0.035);
    CHECK(rej_exp / 2000.0 <= 0.065);
    CHECK(rej_norm / 2000.0 >= 0.035);
    CHECK(rej_norm / 2000.0 <= 0.065);
  }
}
