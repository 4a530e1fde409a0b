#pragma once

#include "dpdwald/error.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace dpd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Parameter vector of a model family; coordinate order is fixed per family.
using Theta = Eigen::VectorXd;

inline Theta make_theta(std::initializer_list<double> values) {
  Theta t(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) t(i++) = v;
  return t;
}

/// Observed data X_1..X_n; never empty.
class Sample {
public:
  Sample() = delete;
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InputError("Sample: at least one observation is required");
  }
  Sample(std::initializer_list<double> values) : Sample(std::vector<double>(values)) {}

  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double mean() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  /// Copy without the listed (zero-based) indices.
  Sample without(std::span<const std::size_t> indices) const;
  Sample scaled(double c) const;
  Sample shifted(double c) const;

private:
  std::vector<double> values_;
};

/// Deterministic generator: mt19937_64 has a fully specified output sequence,
/// and uniform01 uses only its raw bits, so draws are identical across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(seed) ^ a) ^ b);
}

}  // namespace dpd
