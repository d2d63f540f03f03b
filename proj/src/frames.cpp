#include "phaseret/frames.hpp"

#include <algorithm>
#include <string>

#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"

namespace phaseret {

Frame::Frame(Mat vectors, const Tolerances& tol) : vectors_(std::move(vectors)) {
  if (vectors_.rows() == 0) throw PreconditionError("frame: zero ambient dimension");
  for (Index j = 0; j < vectors_.cols(); ++j) {
    if (vectors_.entries().col(j).norm() <= tol.proj_tol)
      throw PreconditionError("frame: vector " + std::to_string(j + 1) + " is zero");
  }
}

Subspace::Subspace(Mat onb, const Tolerances& tol) : onb_(std::move(onb)) {
  if (onb_.cols() < 1 || onb_.cols() > onb_.rows())
    throw PreconditionError("subspace: basis must have between 1 and n columns");
  const CMatrix gram = onb_.entries().adjoint() * onb_.entries();
  const double dev = max_abs(gram - CMatrix::Identity(onb_.cols(), onb_.cols()));
  if (dev >= tol.proj_tol)
    throw PreconditionError("subspace: basis is not orthonormal (Gram deviation " + std::to_string(dev) + ")");
}

namespace {

Mat range_basis(const Mat& p) {
  if (p.is_real()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.real_part(), Eigen::ComputeThinU);
    const Index k = (svd.singularValues().array() > 0.5).count();
    return Mat::from_real(svd.matrixU().leftCols(k));
  }
  Eigen::JacobiSVD<CMatrix> svd(p.entries(), Eigen::ComputeThinU);
  const Index k = (svd.singularValues().array() > 0.5).count();
  return Mat(Field::Complex, svd.matrixU().leftCols(k));
}

}  // namespace

ProjectionFamily ProjectionFamily::from_projections(std::vector<Mat> projections, const Tolerances& tol) {
  if (projections.empty()) throw PreconditionError("projection family: no projections");
  const Index n = projections.front().rows();
  const Field field = projections.front().field();
  std::vector<Subspace> subspaces;
  subspaces.reserve(projections.size());
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const Mat& p = projections[i];
    if (p.field() != field) throw FieldError("projection family: mixed fields at projection " + std::to_string(i + 1));
    if (p.rows() != n || p.cols() != n)
      throw PreconditionError("projection family: projection " + std::to_string(i + 1) + " is not " +
                              std::to_string(n) + "x" + std::to_string(n));
    const CMatrix& e = p.entries();
    const double idem = max_abs(e * e - e);
    if (idem >= tol.proj_tol) throw ProjectorError(i, idem, "||P^2 - P||_max");
    const double adj = max_abs(e - e.adjoint());
    if (adj >= tol.proj_tol) throw ProjectorError(i, adj, "||P - P*||_max");
    Mat onb = range_basis(p);
    if (onb.cols() == 0) throw ProjectorError(i, 0.0, "zero projection, rank 0,");
    subspaces.emplace_back(std::move(onb), tol);
    const double rebuild = max_abs(projector_from_basis(subspaces.back().onb(), tol).entries() - e);
    if (rebuild >= tol.proj_tol) throw ProjectorError(i, rebuild, "range basis does not reproduce P,");
  }
  return ProjectionFamily(n, field, std::move(projections), std::move(subspaces));
}

ProjectionFamily ProjectionFamily::from_subspaces(std::vector<Subspace> subspaces, const Tolerances& tol) {
  if (subspaces.empty()) throw PreconditionError("projection family: no subspaces");
  const Index n = subspaces.front().dim_ambient();
  const Field field = subspaces.front().field();
  std::vector<Mat> projections;
  projections.reserve(subspaces.size());
  for (std::size_t i = 0; i < subspaces.size(); ++i) {
    if (subspaces[i].field() != field) throw FieldError("projection family: mixed fields at subspace " + std::to_string(i + 1));
    if (subspaces[i].dim_ambient() != n) throw PreconditionError("projection family: ambient dimensions differ");
    projections.push_back(projector_from_basis(subspaces[i].onb(), tol));
  }
  return ProjectionFamily(n, field, std::move(projections), std::move(subspaces));
}

ProjectionFamily ProjectionFamily::rank_one(const Frame& frame, const Tolerances& tol) {
  std::vector<Subspace> subspaces;
  subspaces.reserve(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const CVector v = frame.vectors().entries().col(static_cast<Index>(i));
    subspaces.emplace_back(Mat(frame.field(), v / v.norm()), tol);
  }
  return from_subspaces(std::move(subspaces), tol);
}

bool ProjectionFamily::all_rank_one() const {
  return std::all_of(subspaces_.begin(), subspaces_.end(), [](const Subspace& s) { return s.rank() == 1; });
}

Mat ProjectionFamily::images(const Mat& x) const {
  require_same_field(x, projections_.front(), "images");
  if (x.rows() != dim_ || x.cols() != 1) throw PreconditionError("images: x must be an n x 1 column");
  CMatrix a(dim_, static_cast<Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) a.col(static_cast<Index>(i)) = projections_[i].entries() * x.entries().col(0);
  return Mat(field_, std::move(a));
}

std::vector<std::size_t> PartitionWitness::side_Ic(std::size_t m) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::find(side_I.begin(), side_I.end(), i) == side_I.end()) out.push_back(i);
  }
  return out;
}

SpanReport spanning_at(const ProjectionFamily& p, const Mat& x, const Tolerances& tol) {
  if (x.norm() == 0.0) throw PreconditionError("spanning_at: x must be nonzero");
  const auto rank = numerical_rank(p.images(x), tol);
  return {rank == static_cast<std::size_t>(p.dim()), rank};
}

Frame onb_union(const ProjectionFamily& p, std::uint64_t seed) {
  CMatrix out(p.dim(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Subspace& s = p.subspace(i);
    auto rng = stream(seed, Stream::OnbRotation, i);
    const CMatrix rotated = s.onb().entries() * haar_unitary(p.field(), s.rank(), rng).entries();
    CMatrix next(p.dim(), out.cols() + rotated.cols());
    next << out, rotated;
    out = std::move(next);
  }
  if (p.field() == Field::Real) out = out.real().cast<Complex>();
  return Frame(Mat(p.field(), std::move(out)));
}

Frame rank1_reduction(const ProjectionFamily& p, const Tolerances& tol) {
  CMatrix out(p.dim(), static_cast<Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.subspace(i).rank() != 1)
      throw PreconditionError("rank1_reduction: projection " + std::to_string(i + 1) + " has rank " +
                              std::to_string(p.subspace(i).rank()));
    out.col(static_cast<Index>(i)) = p.subspace(i).onb().entries().col(0);
  }
  return Frame(Mat(p.field(), std::move(out)), tol);
}

Mat nonspanning_point_from_cp_failure(const ProjectionFamily& p, const Frame& f, const PartitionWitness& w,
                                      const Tolerances& tol, std::uint64_t seed) {
  if (f.field() != p.field()) throw FieldError("nonspanning_point_from_cp_failure: frame and family fields differ");
  if (f.dim() != p.dim()) throw PreconditionError("nonspanning_point_from_cp_failure: dimensions differ");

  // f must be an ONB union of p: consecutive blocks reproduce each P_i.
  Index offset = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Index k = p.subspace(i).rank();
    if (offset + k > static_cast<Index>(f.size()))
      throw PreconditionError("nonspanning_point_from_cp_failure: frame is not an ONB union of the family");
    const Mat block(f.field(), f.vectors().entries().middleCols(offset, k));
    const CMatrix gram = block.entries().adjoint() * block.entries();
    if (max_abs(gram - CMatrix::Identity(k, k)) >= tol.proj_tol ||
        max_abs(block.entries() * block.entries().adjoint() - p.projection(i).entries()) >= tol.proj_tol)
      throw PreconditionError("nonspanning_point_from_cp_failure: block " + std::to_string(i + 1) +
                              " is not an orthonormal basis of W_" + std::to_string(i + 1));
    offset += k;
  }
  if (offset != static_cast<Index>(f.size()))
    throw PreconditionError("nonspanning_point_from_cp_failure: frame is not an ONB union of the family");
  for (auto i : w.side_I) {
    if (i >= f.size()) throw InvalidWitnessError("nonspanning_point_from_cp_failure: witness index out of range");
  }

  const Mat side = f.select(w.side_I);
  const auto n = static_cast<std::size_t>(p.dim());
  if (side.cols() > 0 && numerical_rank(side, tol) >= n)
    throw InvalidWitnessError("nonspanning_point_from_cp_failure: side I spans the space");
  const Mat complement_side = f.select(w.side_Ic(f.size()));
  if (complement_side.cols() > 0 && numerical_rank(complement_side, tol) >= n)
    throw InvalidWitnessError("nonspanning_point_from_cp_failure: side I^c spans the space");

  Mat x = orthogonal_complement_point(side.cols() > 0 ? side : Mat::zeros(f.field(), p.dim(), 0), tol, seed);
  if (spanning_at(p, x, tol).spans)
    throw InvalidWitnessError("nonspanning_point_from_cp_failure: constructed point spans; witness inconsistent");
  return x;
}

std::uint64_t binomial(std::uint64_t m, std::uint64_t k) {
  if (k > m) return 0;
  k = std::min(k, m - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (m - k + i) / i;
    if (acc > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace phaseret
