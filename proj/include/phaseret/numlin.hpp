#pragma once

// Field-tagged dense linear algebra: tolerant rank, orthonormalization,
// projectors and orthogonal complements over R^n and C^n.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phaseret {

enum class Field { Real, Complex };

const char* to_string(Field f);

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Dense matrix over R or C. Storage is always complex; a Real-tagged Mat has
/// identically zero imaginary parts, which the constructor enforces. Entries
/// are finite.
class Mat {
 public:
  Mat() = default;
  Mat(Field field, CMatrix entries);

  static Mat zeros(Field field, Index rows, Index cols);
  static Mat identity(Field field, Index n);
  static Mat from_real(const Eigen::MatrixXd& entries);
  static Mat from_complex(const CMatrix& entries) { return Mat(Field::Complex, entries); }

  Field field() const { return field_; }
  bool is_real() const { return field_ == Field::Real; }
  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  bool empty() const { return entries_.size() == 0; }

  const CMatrix& entries() const { return entries_; }
  Complex operator()(Index r, Index c) const { return entries_(r, c); }

  Mat col(Index j) const;
  /// Columns in the given order.
  Mat select_cols(std::span<const std::size_t> idx) const;
  Eigen::MatrixXd real_part() const { return entries_.real(); }
  /// Frobenius norm.
  double norm() const { return entries_.norm(); }
  /// Same entries retagged as Complex.
  Mat promoted() const { return Mat(Field::Complex, entries_); }

 private:
  Field field_ = Field::Real;
  CMatrix entries_;
};

/// Throws FieldError unless both operands carry the same tag.
void require_same_field(const Mat& a, const Mat& b, const char* op);

struct Tolerances {
  /// Relative singular-value cutoff: sigma_k counts when sigma_k > rank_rtol * sigma_max * max(rows, cols).
  double rank_rtol = 1e-10;
  /// Bound on ||P^2 - P||_max, ||P - P*||_max and Gram deviations.
  double proj_tol = 1e-9;
  /// Bound on max_i | ||P_i u||^2 - ||P_i v||^2 |.
  double witness_tol = 1e-9;
  /// Minimum 1 - |<u,v>|/(||u|| ||v||) for u, v to count as phase-inequivalent.
  double phase_tol = 1e-6;

  /// Throws InputDomainError on non-positive values or rank_rtol >= 1.
  void validate() const;
};

/// Singular values in decreasing order, computed on the real part for Real matrices.
Eigen::VectorXd singular_values(const Mat& m);

std::size_t numerical_rank(const Mat& m, const Tolerances& tol);

/// Smallest of the min(rows, cols) singular values.
double min_singular_value(const Mat& m);

/// Orthonormal basis of the column span, built by two-pass Gram-Schmidt in
/// column order. Columns whose residual falls under the rank cutoff are skipped.
Mat orthonormalize(const Mat& vectors, const Tolerances& tol);

/// P = B B*. Rejects B whose Gram matrix is not the identity within proj_tol.
Mat projector_from_basis(const Mat& onb, const Tolerances& tol);

/// Unit vector orthogonal to every column of `vectors` (which may have zero
/// columns; rows fixes the ambient dimension). Seeded Gaussian vectors
/// complete the basis; the first one that leaves the span is returned.
Mat orthogonal_complement_point(const Mat& vectors, const Tolerances& tol, std::uint64_t seed = 0);

/// <a, b> = b* a for single columns.
Complex inner(const Mat& a, const Mat& b);

/// max |a_ij|.
double max_abs(const CMatrix& m);

/// Standard Gaussian matrix; complex entries are (N(0,1) + i N(0,1)) / sqrt(2).
Mat gaussian(Field field, Index rows, Index cols, std::mt19937_64& rng);

/// Haar-distributed orthogonal (Real) or unitary (Complex) k x k matrix.
Mat haar_unitary(Field field, Index k, std::mt19937_64& rng);

/// Columns of `a` followed by columns of `b`.
Mat hstack(const Mat& a, const Mat& b);

}  // namespace phaseret
