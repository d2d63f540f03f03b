#pragma once

#include <initializer_list>
#include <vector>

#include "phaseret/frames.hpp"
#include "phaseret/numlin.hpp"

namespace th {

using phaseret::CMatrix;
using phaseret::Complex;
using phaseret::Index;
using phaseret::Mat;

/// Real matrix given column by column.
inline Mat real_cols(std::initializer_list<std::initializer_list<double>> cols) {
  const auto m = static_cast<Index>(cols.size());
  const auto n = static_cast<Index>(cols.begin()->size());
  Eigen::MatrixXd a(n, m);
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (double v : c) a(i++, j) = v;
    ++j;
  }
  return Mat::from_real(a);
}

inline Mat complex_cols(std::initializer_list<std::initializer_list<Complex>> cols) {
  const auto m = static_cast<Index>(cols.size());
  const auto n = static_cast<Index>(cols.begin()->size());
  CMatrix a(n, m);
  Index j = 0;
  for (const auto& c : cols) {
    Index i = 0;
    for (Complex v : c) a(i++, j) = v;
    ++j;
  }
  return Mat::from_complex(a);
}

inline Mat basis_vector(phaseret::Field field, Index n, Index k) {
  CMatrix e = CMatrix::Zero(n, 1);
  e(k, 0) = 1.0;
  return Mat(field, e);
}

/// Projection onto the span of the given columns.
inline Mat proj_onto(const Mat& cols, const phaseret::Tolerances& tol = {}) {
  return phaseret::projector_from_basis(phaseret::orthonormalize(cols, tol), tol);
}

inline phaseret::ProjectionFamily family_of(std::initializer_list<Mat> spans) {
  std::vector<Mat> ps;
  for (const auto& s : spans) ps.push_back(proj_onto(s));
  return phaseret::ProjectionFamily::from_projections(ps);
}

/// Distance between u and the closest unimodular multiple of w.
inline double phase_distance(const CMatrix& u, const CMatrix& w) {
  const Complex ip = (w.adjoint() * u)(0, 0);
  const Complex c = std::abs(ip) > 0 ? ip / std::abs(ip) : Complex(1.0);
  return (u - c * w).norm();
}

}  // namespace th
