#pragma once

// Certifiers, falsifiers and generators for phase retrieval by projections.
//
// A certifier runs an exact finite procedure and may answer CertifiedHolds or
// CertifiedFails. A falsifier searches for a witness pair and answers either
// Falsified (with a verified witness) or NoWitnessFound, which is inconclusive.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseret/frames.hpp"
#include "phaseret/numlin.hpp"

namespace phaseret {

/// u, v with equal measurements ||P_i u|| = ||P_i v|| that are not unimodular multiples.
struct PrWitness {
  Mat u;
  Mat v;
  double max_mismatch = 0.0;
  double phase_gap = 0.0;
};

struct WitnessCheck {
  bool valid = false;
  double max_mismatch = 0.0;
  double phase_gap = 0.0;
};

enum class Status { CertifiedHolds, CertifiedFails, Falsified, NoWitnessFound };

const char* to_string(Status s);

enum class StepPolicy {
  /// Exact eigenvector minimization in one factor of a bilinear objective, then the other.
  Alternating,
  /// Riemannian gradient descent with Armijo backtracking on h(u, v) over unit u, v.
  ProjectedGradient,
};

struct SearchConfig {
  std::size_t restarts = 64;
  std::size_t max_iters = 500;
  StepPolicy step = StepPolicy::Alternating;
  /// Weight of the phase-gap hinge in h(u, v); the hinge is active below 2 * phase_tol.
  double barrier_weight = 1.0;
  std::uint64_t seed = 0;
  Tolerances tol;
  /// Random points used by the spanning spot check of complex_counterexample.
  std::size_t spot_checks = 1000;
  /// Run restarts through OpenMP. Results do not depend on this flag.
  bool parallel = true;

  void validate() const;
};

struct Verdict {
  Status status = Status::NoWitnessFound;
  std::optional<PrWitness> pr_witness;
  std::optional<PartitionWitness> partition;
  /// Nonzero x at which {P_i x} fails to span.
  std::optional<Mat> point;
  std::string method;
  /// Index of the restart that produced the witness, when one did.
  std::optional<std::size_t> restart;
};

WitnessCheck verify_pr_witness(const ProjectionFamily& p, const Mat& u, const Mat& v, const Tolerances& tol);

/// phase_gap = 1 - |<u,v>| / (||u|| ||v||).
double phase_gap(const Mat& u, const Mat& v);

/// (x + y, x - y) with y a unit vector orthogonal to every P_i x. The cross
/// terms Re<P_i x, P_i y> vanish, so both vectors have the same measurements.
PrWitness pr_witness_from_nonspanning(const ProjectionFamily& p, const Mat& x, const Tolerances& tol,
                                      std::uint64_t seed = 0);

/// Exact decision for a real frame through the complement property.
Verdict decide_real_rank1(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits = {});

/// Searches for x with {P_i x} not spanning. Real all-rank-one families are
/// decided exactly instead.
Verdict spanning_falsifier(const ProjectionFamily& p, const SearchConfig& cfg);

/// Searches directly for a witness pair. Never uses the complement property.
Verdict pr_falsifier(const ProjectionFamily& p, const SearchConfig& cfg);

/// Witness for a complex frame with m < n^2 from a rank-two indefinite
/// Hermitian Q in the kernel of Q -> (x_i* Q x_i)_i. nullopt when the
/// rank-two search is inconclusive.
std::optional<PrWitness> hermitian_nullspace_witness(const Frame& f, const Tolerances& tol, std::uint64_t seed = 0,
                                                     std::size_t restarts = 16, std::size_t max_iters = 2000);

/// Coordinates of an n x n Hermitian matrix: n real diagonal entries, then
/// (Re Q_jk, Im Q_jk) for j < k in row-major order.
Eigen::VectorXd hermitian_to_coords(const CMatrix& q);
CMatrix hermitian_from_coords(const Eigen::VectorXd& c, Index n);

/// Real m x n^2 matrix of the linear map Q -> (x_i* Q x_i)_i in those coordinates.
Eigen::MatrixXd trace_constraint_matrix(const Frame& f);

/// Vandermonde frame with columns (1, t, ..., t^(n-1)); nodes t_k = k (Real)
/// or exp(2 pi i k / m) (Complex), k = 0..m-1.
Frame gen_full_spark(Index n, Index m, Field field, const EnumerationLimits& limits = {});

struct SpanningReport {
  bool full_spark = false;
  std::size_t spot_checks = 0;
  std::size_t spot_passes = 0;
  /// Smallest count of |<x, x_i>| above threshold seen over the spot checks.
  std::size_t min_nonzero_products = 0;
};

struct Counterexample {
  Frame frame;
  SpanningReport spanning;
  Status status = Status::NoWitnessFound;
  std::optional<PrWitness> witness;
  std::string method;
};

/// Full-spark 2n-1 vectors in C^n: spanning holds at every x, phase retrieval fails.
Counterexample complex_counterexample(Index n, const SearchConfig& cfg);

ProjectionFamily gen_random_projections(Index n, const std::vector<Index>& ranks, Field field, std::uint64_t seed,
                                        const Tolerances& tol = {});

/// Gaussian frame with m columns in H^n.
Frame gen_random_frame(Index n, Index m, Field field, std::uint64_t seed);

}  // namespace phaseret
