#include "phaseret/search.hpp"

#include <cmath>
#include <limits>

#include "phaseret/errors.hpp"

namespace phaseret::search {

namespace {

CVector random_unit(Field field, Index n, std::mt19937_64& rng) {
  CVector z = gaussian(field, n, 1, rng).entries().col(0);
  return z / z.norm();
}

Eigen::VectorXd random_unit_real(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (Index k = 0; k < d; ++k) z(k) = normal(rng);
  return z / z.norm();
}

/// Realified multiplication by i.
Eigen::VectorXd times_i(const Eigen::VectorXd& r) {
  const Index n = r.size() / 2;
  Eigen::VectorXd out(r.size());
  out.head(n) = -r.tail(n);
  out.tail(n) = r.head(n);
  return out;
}

/// Smallest eigenvector of G restricted to the orthogonal complement of unit t.
Eigen::VectorXd restricted_min_eigvec(const Eigen::MatrixXd& g, const Eigen::VectorXd* t) {
  if (t == nullptr) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    return es.eigenvectors().col(0);
  }
  const Index d = g.rows();
  const Eigen::MatrixXd pi = Eigen::MatrixXd::Identity(d, d) - (*t) * t->transpose();
  const double lift = g.trace() + 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pi * g * pi + lift * (*t) * t->transpose());
  Eigen::VectorXd y = es.eigenvectors().col(0);
  y -= t->dot(y) * (*t);
  return y / y.norm();
}

/// Gram of the realified images: sum_i a_i a_i^T, a_i = pack(P_i z).
Eigen::MatrixXd realified_gram(const ProjectionFamily& p, const CVector& z) {
  const Index d = p.field() == Field::Real ? p.dim() : 2 * p.dim();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (const auto& proj : p.projections()) {
    const Eigen::VectorXd a = pack(proj.entries() * z, p.field());
    g.noalias() += a * a.transpose();
  }
  return g;
}

double pair_residual_norm2(const ProjectionFamily& p, const CVector& x, const CVector& y) {
  double s = 0.0;
  for (const auto& proj : p.projections()) {
    const double r = (y.dot(proj.entries() * x)).real();
    s += r * r;
  }
  return s;
}

struct Stall {
  double prev = std::numeric_limits<double>::infinity();
  int count = 0;
  /// True once the objective has stopped improving for a while.
  bool update(double obj) {
    if (obj > prev * (1.0 - 1e-6)) {
      ++count;
    } else {
      count = 0;
    }
    prev = std::min(prev, obj);
    return count >= 8;
  }
};

}  // namespace

Eigen::VectorXd pack(const CVector& z, Field field) {
  if (field == Field::Real) return z.real();
  Eigen::VectorXd r(2 * z.size());
  r << z.real(), z.imag();
  return r;
}

CVector unpack(const Eigen::VectorXd& r, Field field) {
  if (field == Field::Real) return r.cast<Complex>();
  const Index n = r.size() / 2;
  CVector z(n);
  for (Index k = 0; k < n; ++k) z(k) = Complex(r(k), r(n + k));
  return z;
}

CVector min_eigvec(const CMatrix& h, Field field, double* eigenvalue) {
  if (field == Field::Real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (eigenvalue) *eigenvalue = es.eigenvalues()(0);
    return es.eigenvectors().col(0).cast<Complex>();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (eigenvalue) *eigenvalue = es.eigenvalues()(0);
  return es.eigenvectors().col(0);
}

PrObjective pr_objective(const ProjectionFamily& p, const CVector& u, const CVector& v, double phase_tol,
                         double barrier_weight) {
  PrObjective out;
  out.grad_u = CVector::Zero(u.size());
  out.grad_v = CVector::Zero(v.size());
  for (const auto& proj : p.projections()) {
    const CVector pu = proj.entries() * u;
    const CVector pv = proj.entries() * v;
    const double d = pu.squaredNorm() - pv.squaredNorm();
    out.value += d * d;
    out.grad_u += 4.0 * d * pu;
    out.grad_v -= 4.0 * d * pv;
  }
  const double nu = u.norm();
  const double nv = v.norm();
  const Complex s = u.dot(v);  // u* v
  const double abs_s = std::abs(s);
  const double ratio = abs_s / (nu * nv);
  const double gap = 1.0 - ratio;
  if (gap < 2.0 * phase_tol && abs_s > 0.0) {
    const double slack = 2.0 * phase_tol - gap;
    out.value += barrier_weight * slack * slack / (phase_tol * phase_tol);
    // d(barrier)/d(ratio) = 2 w slack / tau^2.
    const double coef = 2.0 * barrier_weight * slack / (phase_tol * phase_tol);
    const CVector g_ratio_u = std::conj(s) * v / (abs_s * nu * nv) - ratio * u / (nu * nu);
    const CVector g_ratio_v = s * u / (abs_s * nu * nv) - ratio * v / (nv * nv);
    out.grad_u += coef * g_ratio_u;
    out.grad_v += coef * g_ratio_v;
  }
  return out;
}

Eigen::VectorXd gauss_newton_polish(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                                    Eigen::VectorXd z, const std::function<void(Eigen::VectorXd&)>& renormalize,
                                    int max_iter) {
  constexpr double h = 1e-3;
  Eigen::VectorXd r = residual(z);
  for (int it = 0; it < max_iter; ++it) {
    const double rn = r.norm();
    if (rn == 0.0) break;
    Eigen::MatrixXd jac(r.size(), z.size());
    for (Index k = 0; k < z.size(); ++k) {
      Eigen::VectorXd zp = z;
      Eigen::VectorXd zm = z;
      zp(k) += h;
      zm(k) -= h;
      jac.col(k) = (residual(zp) - residual(zm)) / (2.0 * h);
    }
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
    bool accepted = false;
    double t = 1.0;
    for (int ls = 0; ls < 12; ++ls, t *= 0.5) {
      Eigen::VectorXd trial = z + t * step;
      renormalize(trial);
      Eigen::VectorXd rt = residual(trial);
      if (rt.norm() < rn) {
        z = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return z;
}

SpanCandidate spanning_restart(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters) {
  const Field field = p.field();
  const Index n = p.dim();
  CVector x = random_unit(field, n, rng);
  double obj = 0.0;
  Stall stall;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const CMatrix a = p.images(Mat(field, x)).entries();
    const CVector w = min_eigvec(a * a.adjoint(), field);
    CMatrix b(n, static_cast<Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) b.col(static_cast<Index>(i)) = p.projection(i).entries() * w;
    x = min_eigvec(b * b.adjoint(), field, &obj);
    obj = std::max(obj, 0.0);
    if (obj < 1e-30 || stall.update(obj)) break;
  }
  const CMatrix a = p.images(Mat(field, x)).entries();
  double final_obj = 0.0;
  min_eigvec(a * a.adjoint(), field, &final_obj);
  return {x, std::max(final_obj, 0.0)};
}

CVector polish_nonspanning(const ProjectionFamily& p, const CVector& x0) {
  const Field field = p.field();
  const CMatrix a = p.images(Mat(field, x0)).entries();
  const CVector w0 = min_eigvec(a * a.adjoint(), field);
  const Eigen::VectorXd px = pack(x0, field);
  const Eigen::VectorXd pw = pack(w0, field);
  const Index half = px.size();
  Eigen::VectorXd z(2 * half);
  z << px, pw;
  const auto residual = [&](const Eigen::VectorXd& q) {
    const CVector x = unpack(q.head(half), field);
    const CVector w = unpack(q.tail(half), field);
    const Index per = field == Field::Real ? 1 : 2;
    Eigen::VectorXd r(per * static_cast<Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Complex c = w.dot(p.projection(i).entries() * x);
      r(per * static_cast<Index>(i)) = c.real();
      if (per == 2) r(2 * static_cast<Index>(i) + 1) = c.imag();
    }
    return r;
  };
  const auto renormalize = [half](Eigen::VectorXd& q) {
    q.head(half).normalize();
    q.tail(half).normalize();
  };
  z = gauss_newton_polish(residual, z, renormalize);
  CVector x = unpack(z.head(half), field);
  return x / x.norm();
}

PairCandidate pr_restart_alternating(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters) {
  const Field field = p.field();
  const Index d = field == Field::Real ? p.dim() : 2 * p.dim();
  const bool complex = field == Field::Complex;
  Eigen::VectorXd x = random_unit_real(d, rng);
  Eigen::VectorXd y = random_unit_real(d, rng);
  double obj = 0.0;
  Stall stall;
  for (std::size_t it = 0; it < max_iters; ++it) {
    Eigen::VectorXd tx;
    if (complex) tx = times_i(x);
    y = restricted_min_eigvec(realified_gram(p, unpack(x, field)), complex ? &tx : nullptr);
    Eigen::VectorXd ty;
    if (complex) ty = times_i(y);
    const Eigen::MatrixXd gy = realified_gram(p, unpack(y, field));
    x = restricted_min_eigvec(gy, complex ? &ty : nullptr);
    obj = std::max(x.dot(gy * x), 0.0);
    if (obj < 1e-30 || stall.update(obj)) break;
  }
  const CVector cx = unpack(x, field);
  const CVector cy = unpack(y, field);
  return {cx + cy, cx - cy, pair_residual_norm2(p, cx, cy)};
}

PairCandidate pr_restart_gradient(const ProjectionFamily& p, std::mt19937_64& rng, std::size_t max_iters,
                                  double phase_tol, double barrier_weight) {
  const Field field = p.field();
  const Index n = p.dim();
  CVector u = random_unit(field, n, rng);
  CVector v = random_unit(field, n, rng);
  auto tangent = [](const CVector& g, const CVector& z) -> CVector { return g - z.dot(g).real() * z; };
  auto keep_field = [field](CVector z) {
    if (field == Field::Real) z = z.real().cast<Complex>();
    return z;
  };
  PrObjective cur = pr_objective(p, u, v, phase_tol, barrier_weight);
  double alpha = 0.25;
  for (std::size_t it = 0; it < max_iters; ++it) {
    const CVector gu = keep_field(tangent(cur.grad_u, u));
    const CVector gv = keep_field(tangent(cur.grad_v, v));
    const double gnorm2 = gu.squaredNorm() + gv.squaredNorm();
    if (cur.value < 1e-30 || gnorm2 < 1e-32) break;
    bool accepted = false;
    alpha = std::min(alpha * 2.0, 4.0);
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      CVector un = u - alpha * gu;
      CVector vn = v - alpha * gv;
      un.normalize();
      vn.normalize();
      const PrObjective trial = pr_objective(p, un, vn, phase_tol, barrier_weight);
      if (trial.value <= cur.value - 1e-4 * alpha * gnorm2) {
        u = std::move(un);
        v = std::move(vn);
        cur = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {u, v, cur.value};
}

PairCandidate polish_pair(const ProjectionFamily& p, const PairCandidate& c) {
  const Field field = p.field();
  const Eigen::VectorXd pu = pack(c.u, field);
  const Eigen::VectorXd pv = pack(c.v, field);
  const Index half = pu.size();
  Eigen::VectorXd z(2 * half);
  z << pu, pv;
  const double scale = z.norm();
  const auto residual = [&](const Eigen::VectorXd& q) {
    const CVector u = unpack(q.head(half), field);
    const CVector v = unpack(q.tail(half), field);
    Eigen::VectorXd r(static_cast<Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const CMatrix& e = p.projection(i).entries();
      r(static_cast<Index>(i)) = (e * u).squaredNorm() - (e * v).squaredNorm();
    }
    return r;
  };
  const auto renormalize = [scale](Eigen::VectorXd& q) { q *= scale / q.norm(); };
  z = gauss_newton_polish(residual, z, renormalize);
  PairCandidate out{unpack(z.head(half), field), unpack(z.tail(half), field), 0.0};
  out.objective = residual(z).squaredNorm();
  return out;
}

}  // namespace phaseret::search
