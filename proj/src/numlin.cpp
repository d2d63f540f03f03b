#include "phaseret/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phaseret/detail/rank_kernel.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"

namespace phaseret {

const char* to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

Mat::Mat(Field field, CMatrix entries) : field_(field), entries_(std::move(entries)) {
  if (!entries_.allFinite()) throw InputDomainError("matrix has non-finite entries");
  if (field_ == Field::Real && entries_.size() > 0 && entries_.imag().cwiseAbs().maxCoeff() != 0.0)
    throw FieldError("real-tagged matrix has nonzero imaginary parts");
}

Mat Mat::zeros(Field field, Index rows, Index cols) {
  return Mat(field, CMatrix::Zero(rows, cols));
}

Mat Mat::identity(Field field, Index n) { return Mat(field, CMatrix::Identity(n, n)); }

Mat Mat::from_real(const Eigen::MatrixXd& entries) {
  return Mat(Field::Real, entries.cast<Complex>());
}

Mat Mat::col(Index j) const { return Mat(field_, entries_.col(j)); }

Mat Mat::select_cols(std::span<const std::size_t> idx) const {
  CMatrix out(rows(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = entries_.col(static_cast<Index>(idx[k]));
  return Mat(field_, std::move(out));
}

void require_same_field(const Mat& a, const Mat& b, const char* op) {
  if (a.field() != b.field())
    throw FieldError(std::string(op) + ": mixed-field operands (" + to_string(a.field()) + " vs " +
                     to_string(b.field()) + ")");
}

void Tolerances::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw InputDomainError(std::string("tolerance ") + name + " must be a positive finite number");
  };
  positive(rank_rtol, "rank_rtol");
  positive(proj_tol, "proj_tol");
  positive(witness_tol, "witness_tol");
  positive(phase_tol, "phase_tol");
  if (rank_rtol >= 1.0) throw InputDomainError("tolerance rank_rtol must be < 1");
}

Eigen::VectorXd singular_values(const Mat& m) {
  if (m.empty()) return {};
  if (m.is_real()) return Eigen::JacobiSVD<Eigen::MatrixXd>(m.real_part()).singularValues();
  return Eigen::JacobiSVD<CMatrix>(m.entries()).singularValues();
}

std::size_t numerical_rank(const Mat& m, const Tolerances& tol) {
  if (m.empty()) throw PreconditionError("numerical_rank: empty matrix");
  const auto sv = singular_values(m);
  return static_cast<std::size_t>(
      detail::rank_from_singular_values(sv, m.rows(), m.cols(), tol.rank_rtol));
}

double min_singular_value(const Mat& m) {
  if (m.empty()) throw PreconditionError("min_singular_value: empty matrix");
  const auto sv = singular_values(m);
  return sv(sv.size() - 1);
}

Mat orthonormalize(const Mat& vectors, const Tolerances& tol) {
  if (vectors.empty() || vectors.norm() == 0.0)
    throw EmptySpanError("orthonormalize: input spans the zero subspace");
  const auto target = static_cast<Index>(numerical_rank(vectors, tol));
  if (target == 0) throw EmptySpanError("orthonormalize: input spans the zero subspace");

  const Index n = vectors.rows();
  CMatrix residual = vectors.entries();
  const double cut = tol.rank_rtol * residual.colwise().norm().maxCoeff() *
                     static_cast<double>(std::max(vectors.rows(), vectors.cols()));
  CMatrix basis(n, target);
  std::vector<bool> used(static_cast<std::size_t>(residual.cols()), false);
  Index found = 0;
  while (found < target) {
    // Pivot on the largest remaining residual; first index wins ties.
    Index best = -1;
    double best_norm = cut;
    for (Index j = 0; j < residual.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double r = residual.col(j).norm();
      if (r > best_norm) {
        best_norm = r;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    CVector q = residual.col(best);
    for (int pass = 0; pass < 2; ++pass) {
      if (found > 0) q -= basis.leftCols(found) * (basis.leftCols(found).adjoint() * q);
    }
    q /= q.norm();
    basis.col(found++) = q;
    // Deflate the remaining columns against the new direction.
    for (Index j = 0; j < residual.cols(); ++j) {
      if (!used[static_cast<std::size_t>(j)]) residual.col(j) -= q * q.dot(residual.col(j));
    }
  }
  if (found < target) {
    const auto u = vectors.is_real()
                       ? CMatrix(Eigen::JacobiSVD<Eigen::MatrixXd>(vectors.real_part(), Eigen::ComputeThinU)
                                     .matrixU()
                                     .leftCols(target)
                                     .cast<Complex>())
                       : CMatrix(Eigen::JacobiSVD<CMatrix>(vectors.entries(), Eigen::ComputeThinU)
                                     .matrixU()
                                     .leftCols(target));
    return Mat(vectors.field(), u);
  }
  if (vectors.is_real()) basis = basis.real().cast<Complex>();
  return Mat(vectors.field(), std::move(basis));
}

Mat projector_from_basis(const Mat& onb, const Tolerances& tol) {
  if (onb.empty()) throw PreconditionError("projector_from_basis: empty basis");
  const CMatrix gram = onb.entries().adjoint() * onb.entries();
  const double dev = max_abs(gram - CMatrix::Identity(onb.cols(), onb.cols()));
  if (dev >= tol.proj_tol)
    throw PreconditionError("projector_from_basis: columns are not orthonormal (Gram deviation " +
                            std::to_string(dev) + ")");
  CMatrix p = onb.entries() * onb.entries().adjoint();
  if (onb.is_real()) p = p.real().cast<Complex>();
  return Mat(onb.field(), std::move(p));
}

Mat orthogonal_complement_point(const Mat& vectors, const Tolerances& tol, std::uint64_t seed) {
  const Index n = vectors.rows();
  if (n == 0) throw PreconditionError("orthogonal_complement_point: zero ambient dimension");
  CMatrix q(n, 0);
  if (vectors.cols() > 0 && vectors.norm() > 0.0) q = orthonormalize(vectors, tol).entries();
  if (q.cols() >= n)
    throw NoComplementError("orthogonal_complement_point: columns already span the space");

  auto rng = stream(seed, Stream::Complement);
  for (;;) {
    CVector g = gaussian(vectors.field(), n, 1, rng).entries().col(0);
    const double g_norm = g.norm();
    for (int pass = 0; pass < 2; ++pass) g -= q * (q.adjoint() * g);
    // A random draw lands in a proper subspace with probability zero; reject near misses.
    if (g.norm() <= 1e-8 * g_norm) continue;
    g /= g.norm();
    if (vectors.is_real()) g = g.real().cast<Complex>();
    return Mat(vectors.field(), g);
  }
}

Complex inner(const Mat& a, const Mat& b) {
  require_same_field(a, b, "inner");
  if (a.cols() != 1 || b.cols() != 1 || a.rows() != b.rows())
    throw PreconditionError("inner: operands must be columns of equal length");
  return b.entries().col(0).dot(a.entries().col(0));
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Mat gaussian(Field field, Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix out(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      if (field == Field::Real) {
        out(i, j) = Complex(normal(rng), 0.0);
      } else {
        const double re = normal(rng);
        const double im = normal(rng);
        out(i, j) = Complex(s * re, s * im);
      }
    }
  }
  return Mat(field, std::move(out));
}

Mat haar_unitary(Field field, Index k, std::mt19937_64& rng) {
  const CMatrix g = gaussian(field, k, k, rng).entries();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(k, k);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  if (field == Field::Real) q = q.real().cast<Complex>();
  return Mat(field, std::move(q));
}

Mat hstack(const Mat& a, const Mat& b) {
  require_same_field(a, b, "hstack");
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows()) throw PreconditionError("hstack: row counts differ");
  CMatrix out(a.rows(), a.cols() + b.cols());
  out << a.entries(), b.entries();
  return Mat(a.field(), std::move(out));
}

}  // namespace phaseret
