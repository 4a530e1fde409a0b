#include "dpdwald/simulation.hpp"

#include "dpdwald/error.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace dpd {

void MixtureSpec::validate() const {
  if (components.empty()) throw InputError("mixture: at least one component is required");
  if (components.size() != weights.size()) throw InputError("mixture: one weight per component is required");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("mixture: weights must be nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InputError("mixture: weights must sum to 1");
  for (const auto& c : components) {
    if (!c.family) throw InputError("mixture: component without a family");
    c.family->check_theta(c.theta);
  }
}

MixtureSpec MixtureSpec::single(FamilyPtr family, Theta theta) {
  MixtureSpec s;
  s.components.push_back({std::move(family), std::move(theta)});
  s.weights.push_back(1.0);
  return s;
}

Sample sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n == 0) throw InputError("sample_mixture: n must be at least 1");
  if (spec.components.size() == 1) {
    const auto& c = spec.components.front();
    return Sample(draw(*c.family, c.theta, n, rng));
  }
  std::vector<double> out(n);
  for (double& x : out) {
    const double u = rng.uniform01();
    std::size_t k = 0;
    double acc = spec.weights[0];
    while (u >= acc && k + 1 < spec.components.size()) acc += spec.weights[++k];
    const auto& c = spec.components[k];
    x = c.family->quantile(c.theta, rng.uniform01());
  }
  return Sample(std::move(out));
}

void McScenario::validate() const {
  data_law.validate();
  if (replications < 1) throw InputError("scenario: replications must be >= 1");
  if (!(nominal_alpha > 0.0 && nominal_alpha < 1.0)) throw InputError("scenario: nominal_alpha must lie in (0, 1)");
  if (beta_grid.empty() || n_grid.empty()) throw InputError("scenario: beta_grid and n_grid must be nonempty");
  for (double b : beta_grid)
    if (!(b >= 0.0)) throw InputError("scenario: beta values must be >= 0");
  for (std::size_t n : n_grid)
    if (n < 2) throw InputError("scenario: sample sizes must be >= 2");
  const FamilyPtr fam = make_family(test.family);
  if (test.kind == NullKind::simple) {
    fam->check_theta(test.theta0);
  } else if (test.index >= fam->dim()) {
    throw InputError("scenario: restricted component index out of range");
  }
}

const McCell& McReport::cell(double beta, std::size_t n) const {
  for (const auto& c : cells)
    if (c.beta == beta && c.n == n) return c;
  throw InputError("McReport: no cell for the requested (beta, n)");
}

McReport run_scenario(const McScenario& scenario) {
  scenario.validate();
  const FamilyPtr family = make_family(scenario.test.family);
  const Restriction restriction = Restriction::component(scenario.test.index, scenario.test.value, family->dim());
  const double crit_level = scenario.nominal_alpha;
  const std::size_t nb = scenario.beta_grid.size();
  const std::size_t reps = scenario.replications;

  FitOptions options;
  options.multistart = scenario.multistart;

  McReport report;
  report.scenario = scenario.name;
  report.replications = reps;
  report.nominal_alpha = scenario.nominal_alpha;
  report.seed = scenario.seed;

  for (std::size_t n : scenario.n_grid) {
    // -1 failure, 0 accept, 1 reject; indexed [rep][beta].
    std::vector<signed char> outcome(reps * nb, -1);
    const auto work = [&](std::size_t r) {
      Rng rng(stream_seed(scenario.seed, n, r));
      const Sample data = sample_mixture(scenario.data_law, n, rng);
      for (std::size_t b = 0; b < nb; ++b) {
        try {
          const MdpdeFit fit = fit_mdpde(family, data, scenario.beta_grid[b], options);
          const WaldTestResult t = scenario.test.kind == NullKind::simple ? simple_wald(fit, scenario.test.theta0)
                                                                          : composite_wald(fit, restriction);
          outcome[r * nb + b] = t.p_value < crit_level ? 1 : 0;
        } catch (const NumericError&) {
          outcome[r * nb + b] = -1;
        } catch (const DomainError&) {
          // e.g. a contaminating component put an observation outside the test family's support
          outcome[r * nb + b] = -1;
        }
      }
    };

    const unsigned workers = std::max(1u, scenario.workers);
    if (workers == 1) {
      for (std::size_t r = 0; r < reps; ++r) work(r);
    } else {
      std::exception_ptr error;
      std::mutex error_mutex;
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t r = w; r < reps; r += workers) work(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }

    for (std::size_t b = 0; b < nb; ++b) {
      McCell c;
      c.beta = scenario.beta_grid[b];
      c.n = n;
      for (std::size_t r = 0; r < reps; ++r) {
        const signed char o = outcome[r * nb + b];
        if (o < 0) {
          ++c.failures;
        } else {
          ++c.completed;
          c.rejections += static_cast<std::size_t>(o);
        }
      }
      if (c.completed > 0) {
        c.rejection_rate = static_cast<double>(c.rejections) / static_cast<double>(c.completed);
        c.mc_se = std::sqrt(c.rejection_rate * (1.0 - c.rejection_rate) / static_cast<double>(c.completed));
      } else {
        c.rejection_rate = std::nan("");
        c.mc_se = std::nan("");
      }
      c.flagged = static_cast<double>(c.failures) > 0.01 * static_cast<double>(reps);
      report.cells.push_back(c);
    }
  }
  return report;
}

std::string report_csv(const McReport& report) {
  std::ostringstream os;
  os << "beta,n,rejection_rate,mc_se,failures\n";
  char buf[160];
  for (const auto& c : report.cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%.17g,%.17g,%zu\n", c.beta, c.n, c.rejection_rate, c.mc_se, c.failures);
    os << buf;
  }
  return os.str();
}

}  // namespace dpd
