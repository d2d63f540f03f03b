#pragma once

// Allocation-light rank tests on raw Eigen matrices for the enumeration hot loops.

#include <algorithm>

#include <Eigen/Dense>

namespace phaseret::detail {

/// Same cutoff as numerical_rank: sigma_k > rtol * sigma_max * max(rows, cols).
inline int rank_from_singular_values(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols,
                              double rtol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rtol * sv(0) * static_cast<double>(std::max(rows, cols));
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cut) ++r;
  }
  return r;
}

template <typename MatrixT>
int rank_of(const MatrixT& a, double rtol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixT> svd(a);
  return rank_from_singular_values(svd.singularValues(), a.rows(), a.cols(), rtol);
}

}  // namespace phaseret::detail
