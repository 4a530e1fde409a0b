#pragma once

// Monte Carlo level and power studies.

#include "dpdwald/hypothesis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpd {

struct MixtureComponent {
  FamilyPtr family;
  Theta theta;
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
  std::vector<double> weights;

  /// Weights nonnegative and summing to 1 within 1e-12; parameters valid.
  void validate() const;
  static MixtureSpec single(FamilyPtr family, Theta theta);
};

/// Each observation comes from a component picked by the weights.
Sample sample_mixture(const MixtureSpec& spec, std::size_t n, Rng& rng);

enum class NullKind { simple, component };

struct TestSpec {
  std::string family = "exponential";
  NullKind kind = NullKind::simple;
  Theta theta0;              // simple null
  std::size_t index = 0;     // component null: theta[index] = value
  double value = 0.0;
};

struct McScenario {
  std::string name;
  MixtureSpec data_law;
  TestSpec test;
  std::vector<double> beta_grid;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 2000;
  double nominal_alpha = 0.05;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool multistart = true;

  void validate() const;
};

struct McCell {
  double beta = 0.0;
  std::size_t n = 0;
  std::size_t rejections = 0;
  std::size_t completed = 0;
  std::size_t failures = 0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
  /// More than 1% of the replications failed to produce a test.
  bool flagged = false;
};

struct McReport {
  std::string scenario;
  std::size_t replications = 0;
  double nominal_alpha = 0.0;
  std::uint64_t seed = 0;
  /// Ordered by n (outer) then beta (inner), as in the scenario grids.
  std::vector<McCell> cells;

  const McCell& cell(double beta, std::size_t n) const;
};

/// Replication r at sample size n draws from stream_seed(seed, n, r), so all
/// betas see the same samples and the result does not depend on `workers`.
McReport run_scenario(const McScenario& scenario);

/// Columns: beta,n,rejection_rate,mc_se,failures.
std::string report_csv(const McReport& report);

}  // namespace dpd
