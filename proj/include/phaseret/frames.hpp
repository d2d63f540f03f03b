#pragma once

// Frames, subspaces and projection families, plus the exact finite criteria
// on them: complement property, full spark, pointwise spanning.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "phaseret/numlin.hpp"

namespace phaseret {

/// Ordered family of m nonzero vectors in H^n, stored as the columns of an n x m Mat.
class Frame {
 public:
  explicit Frame(Mat vectors, const Tolerances& tol = {});

  Index dim() const { return vectors_.rows(); }
  std::size_t size() const { return static_cast<std::size_t>(vectors_.cols()); }
  Field field() const { return vectors_.field(); }
  const Mat& vectors() const { return vectors_; }
  Mat vector(std::size_t i) const { return vectors_.col(static_cast<Index>(i)); }
  Mat select(std::span<const std::size_t> idx) const { return vectors_.select_cols(idx); }

 private:
  Mat vectors_;
};

/// W subset of H^n held by an orthonormal basis of 1..n columns.
class Subspace {
 public:
  explicit Subspace(Mat onb, const Tolerances& tol = {});

  Index dim_ambient() const { return onb_.rows(); }
  Index rank() const { return onb_.cols(); }
  Field field() const { return onb_.field(); }
  const Mat& onb() const { return onb_; }

 private:
  Mat onb_;
};

/// Ordered family of orthogonal projections P_1..P_m on H^n with cached range bases.
class ProjectionFamily {
 public:
  /// Validates idempotence and self-adjointness of every matrix (ProjectorError
  /// names the first offender) and extracts each range basis from the left
  /// singular vectors with sigma > 1/2.
  static ProjectionFamily from_projections(std::vector<Mat> projections, const Tolerances& tol = {});
  static ProjectionFamily from_subspaces(std::vector<Subspace> subspaces, const Tolerances& tol = {});
  /// Rank-one projections onto the span of each frame vector.
  static ProjectionFamily rank_one(const Frame& frame, const Tolerances& tol = {});

  Index dim() const { return dim_; }
  std::size_t size() const { return projections_.size(); }
  Field field() const { return field_; }
  const std::vector<Mat>& projections() const { return projections_; }
  const std::vector<Subspace>& subspaces() const { return subspaces_; }
  const Mat& projection(std::size_t i) const { return projections_[i]; }
  const Subspace& subspace(std::size_t i) const { return subspaces_[i]; }
  bool all_rank_one() const;

  /// n x m matrix with columns P_i x.
  Mat images(const Mat& x) const;

 private:
  ProjectionFamily(Index dim, Field field, std::vector<Mat> projections, std::vector<Subspace> subspaces)
      : dim_(dim), field_(field), projections_(std::move(projections)), subspaces_(std::move(subspaces)) {}

  Index dim_ = 0;
  Field field_ = Field::Real;
  std::vector<Mat> projections_;
  std::vector<Subspace> subspaces_;
};

/// Bipartition (I, I^c) of frame indices with neither side spanning. Indices are 0-based.
struct PartitionWitness {
  std::vector<std::size_t> side_I;
  std::size_t rank_I = 0;
  std::size_t rank_Ic = 0;

  std::vector<std::size_t> side_Ic(std::size_t m) const;
};

struct CpResult {
  std::optional<PartitionWitness> witness;
  bool holds() const { return !witness.has_value(); }
};

struct SparkResult {
  /// Lexicographically first rank-deficient n-subset, 0-based.
  std::optional<std::vector<std::size_t>> failing_subset;
  bool holds() const { return !failing_subset.has_value(); }
};

/// Caps for the exponential enumerations. Exceeding one raises CapacityError.
struct EnumerationLimits {
  std::size_t cp_max_vectors = 24;
  double spark_max_subsets = 5e6;
};

/// Complement property by enumeration of the 2^(m-1) bipartitions with vector 1
/// pinned to I. Mask bit j set puts vector j+2 (1-based) in I^c; the witness is
/// the failing bipartition with the smallest mask. OpenMP-parallel over masks.
CpResult complement_property(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits = {});

/// Every n-subset spans. OpenMP-parallel over lexicographic ranks.
SparkResult full_spark(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits = {});

/// Single-threaded versions of the enumerations; same contract, same answers.
namespace reference {
CpResult complement_property(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits = {});
SparkResult full_spark(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits = {});
}  // namespace reference

struct SpanReport {
  bool spans = false;
  std::size_t rank = 0;
};

/// Rank of {P_i x}; spans iff it equals n.
SpanReport spanning_at(const ProjectionFamily& p, const Mat& x, const Tolerances& tol);

/// Concatenation of a seeded random rotation of each cached range basis.
Frame onb_union(const ProjectionFamily& p, std::uint64_t seed);

/// Unit spanning vectors of each range of an all-rank-one family.
Frame rank1_reduction(const ProjectionFamily& p, const Tolerances& tol);

/// Unit x orthogonal to the I side of a complement-property failure of an ONB
/// union of p. Every P_i x then lies in the span of the I^c side, so {P_i x}
/// does not span.
Mat nonspanning_point_from_cp_failure(const ProjectionFamily& p, const Frame& f, const PartitionWitness& w,
                                      const Tolerances& tol, std::uint64_t seed = 0);

/// C(m, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t m, std::uint64_t k);

}  // namespace phaseret
