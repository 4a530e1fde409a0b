// Acceptance gate: one PASS/FAIL line per criterion, preceded by the measured
// values. `--only N` runs a single criterion.

#include "dpdwald/analysis.hpp"
#include "dpdwald/power.hpp"
#include "dpdwald/simulation.hpp"
#include "dpdwald/tuning.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

using namespace dpd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the individual checks of one criterion.
class Criterion {
public:
  explicit Criterion(int id) : id_(id) {}

  bool near(const std::string& what, double got, double want, double tol) {
    const bool ok = std::fabs(got - want) <= tol;
    std::printf("  [%s] %s = %.6g (target %.6g +/- %.2g)\n", ok ? "ok" : "MISS", what.c_str(), got, want, tol);
    ok_ = ok_ && ok;
    return ok;
  }

  bool holds(const std::string& what, bool ok) {
    std::printf("  [%s] %s\n", ok ? "ok" : "MISS", what.c_str());
    ok_ = ok_ && ok;
    return ok;
  }

  void info(const std::string& text) const { std::printf("  [info] %s\n", text.c_str()); }

  bool finish(const std::string& title) const {
    std::printf("%s criterion %d: %s\n", ok_ ? "PASS" : "FAIL", id_, title.c_str());
    std::fflush(stdout);
    return ok_;
  }

private:
  int id_;
  bool ok_ = true;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double p_at(const AnalysisCurve& c, double beta, bool one_sided = false) {
  for (const auto& pt : c.points)
    if (std::fabs(pt.beta - beta) < 1e-12) return one_sided ? pt.p_value_one_sided.value_or(NAN) : pt.p_value;
  return NAN;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

bool criterion1() {
  Criterion c(1);
  const auto t0 = Clock::now();
  ExampleOptions o;
  o.beta_grid = {0.0};
  const AnalysisRun r = run_example("leukemia", o);
  const double elapsed = seconds_since(t0);
  c.near("full-data classical Wald p", r.curves[0].points[0].p_value, 0.0024, 0.0002);
  c.near("outlier-deleted classical Wald p", r.curves[1].points[0].p_value, 0.9733, 0.0002);
  c.near("full-data MLE", r.curves[0].points[0].theta_hat(0), 246.41, 0.01);
  c.near("outlier-deleted MLE", r.curves[1].points[0].theta_hat(0), 138.75, 0.01);
  c.holds(fmt("runtime %.3f s < 1 s", elapsed), elapsed < 1.0);
  return c.finish("Leukemia golden numbers");
}

bool criterion2() {
  Criterion c(2);
  const auto t0 = Clock::now();
  ExampleOptions o;
  o.beta_grid = {0.0, 0.15, 0.30};
  const AnalysisRun r = run_example("telephone", o);
  const double elapsed = seconds_since(t0);
  const auto& full = r.curves[0];
  const auto& clean = r.curves[1];
  c.near("classical two-sided p, full", full.classical_two_sided->p_value, 0.6584, 0.001);
  c.near("classical two-sided p, cleaned", clean.classical_two_sided->p_value, 0.0076, 0.001);
  c.near("classical one-sided p, full", full.classical_one_sided->p_value, 0.33, 0.01);
  c.near("classical one-sided p, cleaned", clean.classical_one_sided->p_value, 0.004, 0.001);
  c.near("signed p beta=0.15, full", p_at(full, 0.15, true), 0.0033, 0.0015);
  c.near("signed p beta=0.30, full", p_at(full, 0.30, true), 0.0020, 0.0015);
  c.near("signed p beta=0.15, cleaned", p_at(clean, 0.15, true), 0.0040, 0.0015);
  c.near("signed p beta=0.30, cleaned", p_at(clean, 0.30, true), 0.0030, 0.0015);
  c.info(fmt("beta=0 chi-square Wald (MLE sigma) two-sided p, full: %.4f", p_at(full, 0.0)));
  c.holds(fmt("runtime %.3f s < 10 s", elapsed), elapsed < 10.0);
  return c.finish("Telephone-Fault p-values");
}

bool criterion3() {
  Criterion c(3);
  ExampleOptions o;
  o.beta_grid = {0.0, 0.15, 0.30};
  const AnalysisRun r = run_example("darwin", o);
  const auto& full = r.curves[0];
  const auto& clean = r.curves[1];
  c.near("classical one-sided p, full", full.classical_one_sided->p_value, 0.025, 0.003);
  c.near("classical one-sided p, cleaned", clean.classical_one_sided->p_value, 0.00007, 0.00005);
  c.near("signed p beta=0.15, full", p_at(full, 0.15, true), 0.0145, 0.005);
  c.near("signed p beta=0.30, full", p_at(full, 0.30, true), 0.0027, 0.005);
  const double a = p_at(clean, 0.15, true);
  const double b = p_at(clean, 0.30, true);
  c.holds(fmt("signed p cleaned, beta=0.15: %.6f <= 0.0002", a), a <= 0.0002);
  c.holds(fmt("signed p cleaned, beta=0.30: %.6f <= 0.0002", b), b <= 0.0002);
  return c.finish("Darwin p-values");
}

bool criterion4() {
  Criterion c(4);
  c.near("h(0.5)", exp_h_factor(0.5), 1.4625, 1e-12);
  const auto fam = make_family("exponential");
  const std::size_t n = 1000;
  const int reps = 2000;
  for (double beta : {0.1, 0.25, 0.5}) {
    double s = 0.0, ss = 0.0;
    for (int r = 0; r < reps; ++r) {
      const Sample x = sample(*fam, make_theta({2.0}), n, stream_seed(2024, n, static_cast<std::uint64_t>(r)));
      const double z = std::sqrt(static_cast<double>(n)) * (fit_mdpde(fam, x, beta).theta_hat(0) - 2.0);
      s += z;
      ss += z * z;
    }
    const double var = (ss - s * s / reps) / (reps - 1);
    const double target = exp_h_factor(beta) * 4.0;
    c.holds(fmt("beta=%.2f: MC variance %.4f vs h*theta^2 = %.4f", beta, var, target),
            std::fabs(var / target - 1.0) <= 0.05);
  }
  return c.finish("exponential variance law");
}

McScenario scenario(const std::string& name, MixtureSpec law, TestSpec test, double alpha) {
  McScenario s;
  s.name = name;
  s.data_law = std::move(law);
  s.test = std::move(test);
  s.beta_grid = {0.0, 0.1, 0.2, 0.5};
  s.n_grid = {100};
  s.replications = 2000;
  s.nominal_alpha = alpha;
  s.seed = 20160501;
  s.workers = workers();
  return s;
}

MixtureSpec mix(const std::string& family, Theta a, Theta b, double wa) {
  const auto f = make_family(family);
  MixtureSpec m;
  m.components = {{f, std::move(a)}, {f, std::move(b)}};
  m.weights = {wa, 1.0 - wa};
  return m;
}

bool criterion5() {
  Criterion c(5);
  const auto t0 = Clock::now();

  struct Design {
    std::string family;
    TestSpec test;
    double alpha;
    MixtureSpec pure, cont_level, cont_power;
  };
  TestSpec exp_test;
  exp_test.family = "exponential";
  exp_test.kind = NullKind::simple;
  exp_test.theta0 = make_theta({2.0});
  TestSpec norm_test;
  norm_test.family = "normal";
  norm_test.kind = NullKind::component;
  norm_test.index = 0;
  norm_test.value = 0.0;
  TestSpec wb_test;
  wb_test.family = "weibull";
  wb_test.kind = NullKind::component;
  wb_test.index = 0;
  wb_test.value = 1.5;

  const std::vector<Design> designs = {
      {"exponential", exp_test, 0.05, MixtureSpec::single(make_family("exponential"), make_theta({2.0})),
       mix("exponential", make_theta({2.0}), make_theta({10.0}), 0.95),
       mix("exponential", make_theta({1.0}), make_theta({10.0}), 0.95)},
      {"normal", norm_test, 0.10, MixtureSpec::single(make_family("normal"), make_theta({0.0, 1.0})),
       mix("normal", make_theta({0.0, 1.0}), make_theta({10.0, 1.0}), 0.9),
       mix("normal", make_theta({-1.0, 1.0}), make_theta({10.0, 1.0}), 0.9)},
      {"weibull", wb_test, 0.05, MixtureSpec::single(make_family("weibull"), make_theta({1.5, 1.5})),
       mix("weibull", make_theta({1.5, 1.5}), make_theta({10.0, 1.5}), 0.95),
       mix("weibull", make_theta({1.0, 1.5}), make_theta({10.0, 1.5}), 0.95)},
  };

  for (const auto& d : designs) {
    const double se_nominal = std::sqrt(d.alpha * (1.0 - d.alpha) / 2000.0);
    const McReport pure = run_scenario(scenario(d.family + "-pure", d.pure, d.test, d.alpha));
    for (const auto& cell : pure.cells) {
      c.holds(d.family + fmt(" pure level, beta=%.1f: %.4f", cell.beta, cell.rejection_rate) +
                  fmt(" (band %.4f..%.4f)", d.alpha - 3 * se_nominal, d.alpha + 3 * se_nominal),
              std::fabs(cell.rejection_rate - d.alpha) <= 3.0 * se_nominal && !cell.flagged);
    }
    const McReport lev = run_scenario(scenario(d.family + "-contaminated-level", d.cont_level, d.test, d.alpha));
    const McReport pow = run_scenario(scenario(d.family + "-contaminated-power", d.cont_power, d.test, d.alpha));
    const McCell& l0 = lev.cell(0.0, 100);
    const McCell& l5 = lev.cell(0.5, 100);
    const McCell& p0 = pow.cell(0.0, 100);
    const McCell& p5 = pow.cell(0.5, 100);
    const double se_l = std::hypot(l0.mc_se, l5.mc_se);
    const double se_p = std::hypot(p0.mc_se, p5.mc_se);
    c.holds(d.family + fmt(" contaminated level: beta=0 %.4f > beta=0.5 %.4f + 3 SE (%.4f)", l0.rejection_rate,
                           l5.rejection_rate, 3 * se_l),
            l0.rejection_rate > l5.rejection_rate + 3.0 * se_l);
    c.holds(d.family + fmt(" contaminated power: beta=0.5 %.4f > beta=0 %.4f + 3 SE (%.4f)", p5.rejection_rate,
                           p0.rejection_rate, 3 * se_p),
            p5.rejection_rate > p0.rejection_rate + 3.0 * se_p);
    for (const McReport* rep : {&lev, &pow})
      for (const auto& cell : rep->cells)
        c.info(rep->scenario + fmt(": beta=%.1f rate %.4f failures %.0f", cell.beta, cell.rejection_rate,
                                   static_cast<double>(cell.failures)));
  }

  // The Weibull K form matters for the level at larger beta; report the alternative.
  McScenario alt = scenario("weibull-sandwich-pure", designs[2].pure, wb_test, 0.05);
  alt.test.family = "weibull-sandwich";
  for (const auto& cell : run_scenario(alt).cells)
    c.info(fmt("weibull sandwich-K pure level, beta=%.1f: %.4f", cell.beta, cell.rejection_rate));

  const double elapsed = seconds_since(t0);
  c.holds(fmt("runtime %.1f s < 600 s", elapsed), elapsed < 600.0);
  return c.finish("level calibration and contamination behaviour");
}

bool criterion6() {
  Criterion c(6);
  const auto ex = make_family("exponential");
  const auto no = make_family("normal");
  const auto wb = make_family("weibull");
  const auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-8 * std::max(1.0, std::fabs(a)); };
  int bad_e = 0, bad_n = 0, bad_w = 0;
  double worst_e = 0.0, worst_n = 0.0, worst_w = 0.0;
  const auto track = [](double a, double b, double& worst) {
    worst = std::max(worst, std::fabs(a - b) / std::max(1.0, std::fabs(a)));
  };
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Sample se = sample(*ex, make_theta({2.0}), 20 + 2 * k, stream_seed(6, 1, k));
    const Sample sn = sample(*no, make_theta({0.5, 2.0}), 20 + 2 * k, stream_seed(6, 2, k));
    const Sample sw = sample(*wb, make_theta({1.5, 1.5}), 20 + 2 * k, stream_seed(6, 3, k));
    for (double beta : {0.0, 0.2, 0.5}) {
      const MdpdeFit fe = fit_mdpde(ex, se, beta);
      const double a = exp_simple_wald(fe, 2.0).statistic, b = simple_wald(fe, make_theta({2.0})).statistic;
      bad_e += !close(a, b);
      track(a, b, worst_e);
      const MdpdeFit fn = fit_mdpde(no, sn, beta);
      const double x = normal_mean_wald(fn, 0.0).statistic;
      const double y = composite_wald(fn, Restriction::component(0, 0.0, 2)).statistic;
      bad_n += !close(x, y);
      track(x, y, worst_n);
      const MdpdeFit fw = fit_mdpde(wb, sw, beta);
      const double u = weibull_scale_wald(fw, 1.5).statistic;
      const double v = composite_wald(fw, Restriction::component(0, 1.5, 2)).statistic;
      bad_w += !close(u, v);
      track(u, v, worst_w);
    }
  }
  c.holds(fmt("exponential: %.0f of 150 disagree, worst rel diff %.2e", bad_e, worst_e), bad_e == 0);
  c.holds(fmt("normal: %.0f of 150 disagree, worst rel diff %.2e", bad_n, worst_n), bad_n == 0);
  c.holds(fmt("weibull: %.0f of 150 disagree, worst rel diff %.2e", bad_w, worst_w), bad_w == 0);
  return c.finish("closed-form statistics match the generic paths");
}

double mc_exp_power(std::size_t n, int reps) {
  const auto fam = make_family("exponential");
  int rej = 0;
  for (int r = 0; r < reps; ++r) {
    const Sample s = sample(*fam, make_theta({1.0}), n, stream_seed(77, n, static_cast<std::uint64_t>(r)));
    rej += exp_simple_wald(s, 0.0, 2.0).p_value < 0.05;
  }
  return static_cast<double>(rej) / reps;
}

bool criterion7() {
  Criterion c(7);
  const ExponentialFamily ex;
  const Theta t0 = make_theta({2.0}), ts = make_theta({1.0});
  const int reps = 10000;

  const SampleSizeResult s = required_sample_size(ex, ts, t0, 0.0, 0.05, 0.8);
  const double approx = approx_power_simple(ex, t0, ts, 0.0, s.n, 0.05).power;
  const double mc = mc_exp_power(s.n, reps);
  c.info(fmt("default (delta-method sigma_W, exact inversion): n* = %.3f, n = %.0f", s.n_star, static_cast<double>(s.n)));
  c.holds(fmt("approx power at n: %.4f >= 0.79", approx), approx >= 0.79);
  c.near("Monte Carlo power at n", mc, 0.8, 0.05);

  const SampleSizeResult p =
      required_sample_size(ex, ts, t0, 0.0, 0.05, 0.8, SigmaWForm::as_printed, SampleSizeForm::as_printed);
  const double p_approx = approx_power_simple(ex, t0, ts, 0.0, p.n, 0.05, SigmaWForm::as_printed).power;
  c.info(fmt("alternative forms (--sigma-form printed --size-form printed): A = %.4f, B = %.5f, n* = %.3f", p.a, p.b, p.n_star) +
         fmt(", n = %.0f, printed-sigma approx power %.4f", static_cast<double>(p.n), p_approx) +
         fmt(", Monte Carlo power %.4f", mc_exp_power(p.n, reps)));
  const SampleSizeResult mixed = required_sample_size(ex, ts, t0, 0.0, 0.05, 0.8, SigmaWForm::as_printed);
  c.info(fmt("printed sigma_W with exact inversion: n = %.0f, Monte Carlo power %.4f", static_cast<double>(mixed.n),
             mc_exp_power(mixed.n, reps)));
  return c.finish("sample-size round trip");
}

bool criterion8() {
  Criterion c(8);
  const auto no = make_family("normal");
  const TuningResult tel = select_beta(no, load_dataset("telephone").sample());
  const TuningResult dar = select_beta(no, load_dataset("darwin").sample());
  c.near("Telephone beta_opt", tel.beta_opt, 0.1919, 0.1);
  c.near("Darwin beta_opt", dar.beta_opt, 0.5657, 0.1);

  const int runs = 200;
  std::vector<double> picks(runs);
  const unsigned w = workers();
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      for (int r = static_cast<int>(k); r < runs; r += static_cast<int>(w)) {
        const Sample s = sample(*no, make_theta({0.0, 1.0}), 500, stream_seed(8, 500, static_cast<std::uint64_t>(r)));
        picks[static_cast<std::size_t>(r)] = select_beta(no, s).beta_opt;
      }
    });
  for (auto& t : pool) t.join();
  std::sort(picks.begin(), picks.end());
  const double median = 0.5 * (picks[runs / 2 - 1] + picks[runs / 2]);
  const double small = static_cast<double>(std::count_if(picks.begin(), picks.end(), [](double b) { return b <= 0.2; }));
  c.holds(fmt("N(0,1), n=500: median beta_opt over 200 runs %.3f <= 0.2", median), median <= 0.2);
  c.info(fmt("fraction of runs with beta_opt <= 0.2: %.3f", small / runs));
  return c.finish("tuning-parameter selection");
}

bool criterion9() {
  Criterion c(9);

  double worst = 0.0;
  for (double k : {1.0, 2.0, 5.0, 30.0})
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999}) {
      worst = std::max(worst, std::fabs(chi2_cdf(chi2_quantile(p, k), k) - p) / p);
      worst = std::max(worst, std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) / p);
    }
  c.holds(fmt("cdf(quantile(p)) = p, worst relative error %.2e", worst), worst < 1e-9);

  struct Case { FamilyPtr f; Theta t; };
  const std::vector<Case> cases = {{make_family("exponential"), make_theta({2.0})},
                                   {make_family("normal"), make_theta({1.0, 2.0})},
                                   {make_family("weibull"), make_theta({1.5, 1.5})},
                                   {make_family("weibull-sandwich"), make_theta({0.7, 2.5})}};
  bool spd = true, agree = true;
  double worst_q = 0.0;
  for (const auto& cs : cases)
    for (double beta : {0.0, 0.1, 0.25, 0.5, 1.0}) {
      const Matrix j = j_matrix(*cs.f, cs.t, beta), k = k_matrix(*cs.f, cs.t, beta);
      for (const Matrix* m : {&j, &k}) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(*m);
        spd = spd && (*m - m->transpose()).cwiseAbs().maxCoeff() <= 1e-9 * m->cwiseAbs().maxCoeff() &&
              es.eigenvalues().minCoeff() > 0.0;
      }
      const bool closed_k = cs.f->name() == "weibull" &&
                           static_cast<const WeibullFamily&>(*cs.f).k_form() == WeibullKForm::closed_form;
      const Matrix jq = quadrature_j_matrix(*cs.f, cs.t, beta);
      const Matrix kq = quadrature_k_matrix(*cs.f, cs.t, beta, !closed_k);
      const double dj = (j - jq).cwiseAbs().maxCoeff() / j.cwiseAbs().maxCoeff();
      const double dk = (k - kq).cwiseAbs().maxCoeff() / k.cwiseAbs().maxCoeff();
      worst_q = std::max({worst_q, dj, dk});
      agree = agree && dj < 1e-6 && dk < 1e-6;
    }
  c.holds("J, K symmetric positive definite for every family and beta in {0, 0.1, 0.25, 0.5, 1}", spd);
  c.holds(fmt("closed-form vs quadrature J/K, worst relative difference %.2e", worst_q), agree);

  double worst_g = 0.0;
  for (const auto& cs : cases) {
    const Sample s = sample(*cs.f, cs.t, 40, 99);
    const Theta at = cs.t * 1.1;
    for (double beta : {0.0, 0.3, 0.8}) {
      const Vector r = estimating_residual(*cs.f, at, beta, s);
      for (Eigen::Index i = 0; i < at.size(); ++i) {
        const double h = 1e-5 * std::fabs(at(i));
        Theta up = at, dn = at;
        up(i) += h;
        dn(i) -= h;
        const double fd = (dpd_objective(*cs.f, up, beta, s) - dpd_objective(*cs.f, dn, beta, s)) / (2 * h);
        worst_g = std::max(worst_g, std::fabs(-(1.0 + beta) * r(i) - fd) / std::max(1e-3, std::fabs(fd)));
      }
    }
  }
  c.holds(fmt("estimating residual = objective gradient (FD), worst relative error %.2e", worst_g), worst_g < 1e-5);

  const Sample tel = load_dataset("telephone").sample();
  const MdpdeFit f0 = fit_mdpde(make_family("normal"), tel, 0.0);
  const double classical = 14.0 * f0.theta_hat(0) * f0.theta_hat(0) / (f0.theta_hat(1) * f0.theta_hat(1));
  const double w0 = normal_mean_wald(f0, 0.0).statistic;
  const Sample leu = load_dataset("leukemia").sample();
  const double we = exp_simple_wald(leu, 0.0, 140.0).statistic;
  const double ce = 16.0 * std::pow(leu.mean() - 140.0, 2) / (140.0 * 140.0);
  c.holds(fmt("beta=0 reduces to the classical Wald statistic (normal %.3e, exponential %.3e)",
              std::fabs(w0 - classical) / classical, std::fabs(we - ce) / ce),
          std::fabs(w0 - classical) <= 1e-10 * classical && std::fabs(we - ce) <= 1e-10 * ce);

  McScenario s;
  s.name = "determinism";
  s.data_law = mix("exponential", make_theta({2.0}), make_theta({10.0}), 0.95);
  s.test.family = "exponential";
  s.test.theta0 = make_theta({2.0});
  s.beta_grid = {0.0, 0.5};
  s.n_grid = {50};
  s.replications = 200;
  s.seed = 42;
  const std::string a = report_csv(run_scenario(s));
  s.workers = 4;
  const std::string b = report_csv(run_scenario(s));
  c.holds("harness is seed-deterministic across runs and worker counts", a == b);
  return c.finish("property suites");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpdwald acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<bool()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9};
  bool ok = true;
  for (int i = 1; i <= 9; ++i) {
    if (only != 0 && only != i) continue;
    try {
      ok = all[static_cast<std::size_t>(i - 1)]() && ok;
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: exception: %s\n", i, e.what());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
