#pragma once

// The real-data analyses: p-value and estimate curves over a beta grid.

#include "dpdwald/datasets.hpp"
#include "dpdwald/hypothesis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dpd {

/// "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec);

struct AnalysisPoint {
  double beta = 0.0;
  bool ok = false;
  std::string error;
  Theta theta_hat;
  double statistic = 0.0;
  double p_value = 0.0;
  /// Signed statistic and one-sided p-value (normal examples only).
  std::optional<double> signed_statistic;
  std::optional<double> p_value_one_sided;
};

struct AnalysisCurve {
  std::string label;  // "full" or "filtered"
  std::vector<std::size_t> removed;
  std::size_t n = 0;
  std::vector<AnalysisPoint> points;
  /// Student t test for the normal examples.
  std::optional<WaldTestResult> classical_two_sided;
  std::optional<WaldTestResult> classical_one_sided;
};

struct AnalysisRun {
  std::string dataset;
  std::string family;
  std::string null_description;
  std::string test;  // "simple" or "composite"
  std::vector<double> beta_grid;
  std::vector<AnalysisCurve> curves;
};

struct ExampleOptions {
  std::vector<double> beta_grid = parse_grid("0:0.05:1");
  /// Zero-based indices to drop for the second curve. Unset means the
  /// example's default; an empty list repeats the full-data analysis.
  std::optional<std::vector<std::size_t>> filter;
  /// Data file for examples without an embedded table ("aircon").
  std::string data_file;
  Alternative one_sided = Alternative::greater;
};

/// leukemia, telephone, darwin, or aircon (requires data_file).
AnalysisRun run_example(const std::string& name, const ExampleOptions& options = {});

/// Default outlier indices of each example.
std::vector<std::size_t> default_filter(const std::string& name, const std::vector<double>& values);

struct SweepResult {
  std::vector<double> first_values;
  std::vector<double> betas;
  /// p_values[i][j]: beta j with the first observation set to first_values[i]; NaN on failure.
  std::vector<std::vector<double>> p_values;
};

/// Replace the first telephone observation by each value and record the
/// two-sided p-value of H0: mu = 0.
SweepResult telephone_sweep(const std::vector<double>& first_values, const std::vector<double>& betas = {0.0, 0.15});

}  // namespace dpd
