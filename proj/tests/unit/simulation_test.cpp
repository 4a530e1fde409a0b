#include "dpdwald/simulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace dpd;

namespace {

const auto kExp = make_family("exponential");
const auto kNormal = make_family("normal");

MixtureSpec two(FamilyPtr f, Theta a, Theta b, double wa) {
  MixtureSpec m;
  m.components = {{f, std::move(a)}, {f, std::move(b)}};
  m.weights = {wa, 1.0 - wa};
  return m;
}

McScenario exp_scenario(MixtureSpec law) {
  McScenario s;
  s.name = "exp";
  s.data_law = std::move(law);
  s.test.family = "exponential";
  s.test.kind = NullKind::simple;
  s.test.theta0 = make_theta({2.0});
  s.beta_grid = {0.0, 0.1, 0.2, 0.5};
  s.n_grid = {100};
  s.replications = 2000;
  s.seed = 31;
  return s;
}

}  // namespace

TEST_CASE("single-component mixture reproduces models.sample") {
  Rng rng(123);
  const Sample a = sample_mixture(MixtureSpec::single(kExp, make_theta({2.0})), 50, rng);
  const Sample b = sample(*kExp, make_theta({2.0}), 50, 123);
  CHECK(a.vector() == b.vector());
}

TEST_CASE("mixture moments") {
  Rng rng(5);
  const Sample m = sample_mixture(two(kExp, make_theta({2.0}), make_theta({10.0}), 0.95), 1'000'000, rng);
  CHECK(std::fabs(m.mean() - 2.4) < 0.02);

  Rng rng2(6);
  const Sample z = sample_mixture(two(kNormal, make_theta({0.0, 1.0}), make_theta({10.0, 1.0}), 0.9), 1'000'000, rng2);
  std::size_t above = 0;
  for (double x : z.values()) above += x > 5.0;
  CHECK(std::fabs(static_cast<double>(above) / 1e6 - 0.10) < 0.005);
}

TEST_CASE("mixture validation") {
  MixtureSpec bad = two(kExp, make_theta({2.0}), make_theta({10.0}), 0.95);
  bad.weights = {0.9, 0.2};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.weights = {1.1, -0.1};
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad.weights = {1.0};
  CHECK_THROWS_AS(bad.validate(), InputError);
  MixtureSpec neg = MixtureSpec::single(kExp, make_theta({-1.0}));
  CHECK_THROWS_AS(neg.validate(), DomainError);
  McScenario s = exp_scenario(MixtureSpec::single(kExp, make_theta({2.0})));
  s.nominal_alpha = 1.0;
  CHECK_THROWS_AS(s.validate(), InputError);
  s = exp_scenario(MixtureSpec::single(kExp, make_theta({2.0})));
  s.replications = 0;
  CHECK_THROWS_AS(s.validate(), InputError);
}

TEST_CASE("level under pure exponential data") {
  McScenario s = exp_scenario(MixtureSpec::single(kExp, make_theta({2.0})));
  s.beta_grid = {0.0};
  s.replications = 10000;
  const McReport r = run_scenario(s);
  CHECK(std::fabs(r.cell(0.0, 100).rejection_rate - 0.05) < 0.01);
  CHECK(r.cell(0.0, 100).failures == 0);
}

TEST_CASE("contamination inflates the classical level only") {
  const McReport r = run_scenario(exp_scenario(two(kExp, make_theta({2.0}), make_theta({10.0}), 0.95)));
  const McCell& c0 = r.cell(0.0, 100);
  const McCell& c5 = r.cell(0.5, 100);
  CHECK(c0.rejection_rate > 0.2);
  CHECK(c0.rejection_rate > c5.rejection_rate + 3.0 * std::hypot(c0.mc_se, c5.mc_se));
  CHECK(c5.rejection_rate < 0.1);
}

TEST_CASE("power against Exp(1) is practically one") {
  McScenario s = exp_scenario(MixtureSpec::single(kExp, make_theta({1.0})));
  s.n_grid = {50, 100};
  s.replications = 1000;
  const McReport r = run_scenario(s);
  for (const auto& c : r.cells) {
    CAPTURE(c.beta);
    CHECK(c.rejection_rate > (c.n == 50 ? 0.95 : 0.995));
  }
  CHECK(r.cells.size() == 8);
  CHECK(r.cells.front().n == 50);
  CHECK(r.cells.back().n == 100);
}

TEST_CASE("determinism across runs and worker counts") {
  McScenario s = exp_scenario(two(kExp, make_theta({2.0}), make_theta({10.0}), 0.95));
  s.replications = 300;
  s.n_grid = {30, 60};
  const std::string a = report_csv(run_scenario(s));
  const std::string b = report_csv(run_scenario(s));
  s.workers = 3;
  const std::string c = report_csv(run_scenario(s));
  CHECK(a == b);
  CHECK(a == c);
  s.seed = 32;
  CHECK(report_csv(run_scenario(s)) != a);
}

TEST_CASE("failures are counted and flagged, never folded into the rate") {
  McScenario s = exp_scenario(MixtureSpec::single(kNormal, make_theta({1.0, 1.0})));
  s.replications = 200;
  s.n_grid = {20};
  s.beta_grid = {0.2};
  const McReport r = run_scenario(s);
  const McCell& c = r.cell(0.2, 20);
  CHECK(c.failures > 150);
  CHECK(c.failures + c.completed == 200);
  CHECK(c.flagged);
}

TEST_CASE("component null and report layout") {
  McScenario s;
  s.name = "normal";
  s.data_law = MixtureSpec::single(kNormal, make_theta({0.0, 1.0}));
  s.test.family = "normal";
  s.test.kind = NullKind::component;
  s.test.index = 0;
  s.test.value = 0.0;
  s.beta_grid = {0.0, 0.3};
  s.n_grid = {40};
  s.replications = 400;
  s.nominal_alpha = 0.1;
  const McReport r = run_scenario(s);
  for (const auto& c : r.cells) {
    CHECK(c.rejection_rate >= 0.0);
    CHECK(c.rejection_rate <= 1.0);
    CHECK(c.mc_se == doctest::Approx(std::sqrt(c.rejection_rate * (1.0 - c.rejection_rate) / c.completed)));
  }
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("beta,n,rejection_rate,mc_se,failures\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK_THROWS_AS(r.cell(0.7, 40), InputError);
}
