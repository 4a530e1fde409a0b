#pragma once

#include "dpdwald/error.hpp"
#include "dpdwald/sample.hpp"

#include <string>
#include <vector>

namespace dpd::detail {

inline constexpr double kConditionWarning = 1e12;

/// Inverse of a symmetric positive definite matrix via LDL^T. Throws
/// MatrixError when the matrix is not positive definite; appends a warning
/// when its condition number exceeds kConditionWarning.
inline Matrix spd_inverse(const Matrix& a, const std::string& what, std::vector<std::string>* warnings) {
  if (!a.allFinite()) throw MatrixError(what + " is not finite");
  const Matrix s = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw MatrixError(what + " is not positive definite");
  if (warnings && hi / lo > kConditionWarning)
    warnings->push_back(what + " is ill-conditioned (condition number " + std::to_string(hi / lo) + ")");
  Eigen::LDLT<Matrix> ldlt(s);
  if (ldlt.info() != Eigen::Success) throw MatrixError(what + ": factorisation failed");
  Matrix inv = ldlt.solve(Matrix::Identity(s.rows(), s.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace dpd::detail
