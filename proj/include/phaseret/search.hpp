#pragma once

// Local search engines behind the falsifiers. Exposed for testing.

#include <cstddef>
#include <functional>
#include <random>

#include "phaseret/frames.hpp"

namespace phaseret::search {

/// Realified coordinates: Re z for Real, [Re z; Im z] for Complex. Under this
/// map Re<a, b> is the Euclidean dot product.
Eigen::VectorXd pack(const CVector& z, Field field);
CVector unpack(const Eigen::VectorXd& r, Field field);

struct PrObjective {
  double value = 0.0;
  /// Gradients with respect to the real coordinates, stored as complex vectors
  /// (real part -> d/dRe, imaginary part -> d/dIm).
  CVector grad_u;
  CVector grad_v;
};

/// h(u, v) = sum_i (||P_i u||^2 - ||P_i v||^2)^2 + w * max(0, 2 tau - gap)^2 / tau^2,
/// gap = 1 - |<u, v>| / (||u|| ||v||), tau = phase_tol.
PrObjective pr_objective(const ProjectionFamily& p, const CVector& u, const CVector& v, double phase_tol,
                         double barrier_weight);

/// Minimum-norm Gauss-Newton iteration for a zero-residual system, using a
/// central-difference Jacobian. `renormalize` is applied after every step.
Eigen::VectorXd gauss_newton_polish(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                    Eigen::VectorXd z, const std::function<void(Eigen::VectorXd&)>& renormalize,
                                    int max_iter = 30);

struct SpanCandidate {
  CVector x;
  /// sigma_n(A(x))^2 at the end of the restart.
  double objective = 0.0;
};

/// One restart of alternating minimization of sum_i |<P_i x, w>|^2 over unit x, w.
SpanCandidate spanning_restart(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters);

struct PairCandidate {
  CVector u;
  CVector v;
  double objective = 0.0;
};

/// One restart over u = x + y, v = x - y with unit x, y, minimizing
/// sum_i (Re<P_i x, y>)^2. In C^n, y is kept real-orthogonal to i x, which
/// removes the trivial solutions y = +-i x and makes <u, v> vanish.
PairCandidate pr_restart_alternating(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters);

/// One restart of projected gradient descent on h over unit u, v.
PairCandidate pr_restart_gradient(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters,
                                  double phase_tol, double barrier_weight);

/// Gauss-Newton on d_i(u, v) = ||P_i u||^2 - ||P_i v||^2 with the joint norm of (u, v) held fixed.
PairCandidate polish_pair(const ProjectionFamily& p, const PairCandidate& c);

/// Gauss-Newton on r_i(x, w) = <P_i x, w> for unit x, w; returns the polished x.
CVector polish_nonspanning(const ProjectionFamily& p, const CVector& x);

/// Unit eigenvector of the smallest eigenvalue of a Hermitian matrix, real for Real.
CVector min_eigvec(const CMatrix& h, Field field, double* eigenvalue = nullptr);

}  // namespace phaseret::search
