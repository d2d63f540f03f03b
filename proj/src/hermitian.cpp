// Witnesses from the kernel of the Hermitian measurement map
// Q -> (x_i* Q x_i)_i. Any Q = uu* - vv* in that kernel makes (u, v) a
// witness pair: |<u, x_i>|^2 - |<v, x_i>|^2 = x_i* Q x_i = 0.

#include <algorithm>
#include <cmath>

#include "phaseret/certify.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"
#include "phaseret/search.hpp"

namespace phaseret {

Eigen::VectorXd hermitian_to_coords(const CMatrix& q) {
  const Index n = q.rows();
  Eigen::VectorXd c(n * n);
  for (Index j = 0; j < n; ++j) c(j) = q(j, j).real();
  Index k = n;
  for (Index j = 0; j < n; ++j) {
    for (Index l = j + 1; l < n; ++l) {
      c(k++) = q(j, l).real();
      c(k++) = q(j, l).imag();
    }
  }
  return c;
}

CMatrix hermitian_from_coords(const Eigen::VectorXd& c, Index n) {
  if (c.size() != n * n) throw PreconditionError("hermitian_from_coords: expected n^2 coordinates");
  CMatrix q = CMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) q(j, j) = c(j);
  Index k = n;
  for (Index j = 0; j < n; ++j) {
    for (Index l = j + 1; l < n; ++l) {
      q(j, l) = Complex(c(k), c(k + 1));
      q(l, j) = std::conj(q(j, l));
      k += 2;
    }
  }
  return q;
}

Eigen::MatrixXd trace_constraint_matrix(const Frame& f) {
  const Index n = f.dim();
  const auto m = static_cast<Index>(f.size());
  const CMatrix& x = f.vectors().entries();
  Eigen::MatrixXd c(m, n * n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) c(i, j) = std::norm(x(j, i));
    Index k = n;
    for (Index j = 0; j < n; ++j) {
      for (Index l = j + 1; l < n; ++l) {
        // 2 Re(conj(x_j) Q_jl x_l) with Q_jl = a + ib.
        const Complex prod = std::conj(x(j, i)) * x(l, i);
        c(i, k++) = 2.0 * prod.real();
        c(i, k++) = -2.0 * prod.imag();
      }
    }
  }
  return c;
}

namespace {

/// Splits Q along its extreme eigenpairs, scaled so ||u||^2 + ||v||^2 = 4.
std::optional<std::pair<CVector, CVector>> split_indefinite(const CMatrix& q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(q);
  const auto& lam = es.eigenvalues();
  const Index n = q.rows();
  const double top = lam(n - 1);
  const double bottom = lam(0);
  if (!(top > 0.0) || !(bottom < 0.0)) return std::nullopt;
  const double scale = 4.0 / (top - bottom);
  CVector u = std::sqrt(top * scale) * es.eigenvectors().col(n - 1);
  CVector v = std::sqrt(-bottom * scale) * es.eigenvectors().col(0);
  return std::make_pair(std::move(u), std::move(v));
}

/// Energy of Q outside its two eigenvalues of largest magnitude, relative to ||Q||_F.
double tail_ratio(const Eigen::VectorXd& lam) {
  std::vector<double> a(lam.data(), lam.data() + lam.size());
  std::sort(a.begin(), a.end(), [](double l, double r) { return std::abs(l) > std::abs(r); });
  double tail = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    total += a[k] * a[k];
    if (k >= 2) tail += a[k] * a[k];
  }
  return total > 0.0 ? std::sqrt(tail / total) : 1.0;
}

/// Nearest matrix of rank at most two with one positive and one negative eigenvalue.
CMatrix truncate_indefinite(const CMatrix& q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(q);
  const Index n = q.rows();
  const auto& lam = es.eigenvalues();
  const auto& vec = es.eigenvectors();
  CMatrix out = CMatrix::Zero(n, n);
  if (lam(n - 1) > 0.0) out += lam(n - 1) * vec.col(n - 1) * vec.col(n - 1).adjoint();
  if (lam(0) < 0.0) out += lam(0) * vec.col(0) * vec.col(0).adjoint();
  return out;
}

std::optional<PrWitness> verified(const ProjectionFamily& family, CVector u, CVector v, const Tolerances& tol) {
  Mat mu(Field::Complex, u);
  Mat mv(Field::Complex, v);
  auto check = verify_pr_witness(family, mu, mv, tol);
  if (!check.valid) {
    const auto polished = search::polish_pair(family, {std::move(u), std::move(v), 0.0});
    mu = Mat(Field::Complex, polished.u);
    mv = Mat(Field::Complex, polished.v);
    if (mu.norm() == 0.0 || mv.norm() == 0.0) return std::nullopt;
    check = verify_pr_witness(family, mu, mv, tol);
  }
  if (!check.valid) return std::nullopt;
  return PrWitness{mu, mv, check.max_mismatch, check.phase_gap};
}

}  // namespace

std::optional<PrWitness> hermitian_nullspace_witness(const Frame& f, const Tolerances& tol, std::uint64_t seed,
                                                     std::size_t restarts, std::size_t max_iters) {
  if (f.field() != Field::Complex) throw FieldError("hermitian_nullspace_witness: requires a complex frame");
  const Index n = f.dim();
  const auto m = static_cast<Index>(f.size());
  if (m >= n * n) throw PreconditionError("hermitian_nullspace_witness: requires m < n^2");

  const Eigen::MatrixXd c = trace_constraint_matrix(f);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const auto rank = static_cast<Index>(numerical_rank(Mat::from_real(c), tol));
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(n * n - rank);
  const auto family = ProjectionFamily::rank_one(f, tol);

  // Every kernel element is rank <= 2 when n = 2, and indefinite when the frame spans.
  if (n == 2) {
    if (auto pair = split_indefinite(hermitian_from_coords(kernel.col(0), n)))
      if (auto w = verified(family, pair->first, pair->second, tol)) return w;
  }

  const Index d = kernel.cols();
  for (std::size_t r = 0; r < restarts; ++r) {
    auto rng = stream(seed, Stream::HermitianRestart, r);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd coeff(d);
    for (Index k = 0; k < d; ++k) coeff(k) = normal(rng);
    coeff.normalize();
    CMatrix q = hermitian_from_coords(kernel * coeff, n);
    double best = tail_ratio(Eigen::SelfAdjointEigenSolver<CMatrix>(q, Eigen::EigenvaluesOnly).eigenvalues());
    int stalled = 0;
    for (std::size_t it = 0; it < max_iters && best > 1e-13; ++it) {
      // Alternate between the rank-two indefinite set and the kernel.
      coeff = kernel.transpose() * hermitian_to_coords(truncate_indefinite(q));
      const double cn = coeff.norm();
      if (cn == 0.0) break;
      coeff /= cn;
      q = hermitian_from_coords(kernel * coeff, n);
      const double t = tail_ratio(Eigen::SelfAdjointEigenSolver<CMatrix>(q, Eigen::EigenvaluesOnly).eigenvalues());
      stalled = t > best * (1.0 - 1e-4) ? stalled + 1 : 0;
      best = std::min(best, t);
      if (stalled >= 25) break;
    }
    if (best > 1e-4) continue;
    if (auto pair = split_indefinite(q))
      if (auto w = verified(family, pair->first, pair->second, tol)) return w;
  }
  return std::nullopt;
}

}  // namespace phaseret
