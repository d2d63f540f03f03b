#include <cmath>
#include <numbers>

#include "phaseret/certify.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"

namespace phaseret {

Frame gen_full_spark(Index n, Index m, Field field, const EnumerationLimits& limits) {
  if (n < 1) throw PreconditionError("gen_full_spark: n must be >= 1");
  if (m < n) throw PreconditionError("gen_full_spark: m must be >= n");
  CMatrix v(n, m);
  for (Index k = 0; k < m; ++k) {
    const Complex node = field == Field::Real
                             ? Complex(static_cast<double>(k), 0.0)
                             : std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    Complex power(1.0, 0.0);
    for (Index j = 0; j < n; ++j) {
      v(j, k) = power;
      power *= node;
    }
  }
  Frame f(Mat(field, std::move(v)));
  if (static_cast<double>(binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n))) <=
          limits.spark_max_subsets &&
      !full_spark(f, Tolerances{}, limits).holds())
    throw InputDomainError("gen_full_spark: Vandermonde frame is numerically rank deficient at n = " +
                           std::to_string(n) + ", m = " + std::to_string(m));
  return f;
}

ProjectionFamily gen_random_projections(Index n, const std::vector<Index>& ranks, Field field, std::uint64_t seed,
                                        const Tolerances& tol) {
  if (n < 1) throw PreconditionError("gen_random_projections: n must be >= 1");
  if (ranks.empty()) throw PreconditionError("gen_random_projections: no ranks given");
  std::vector<Subspace> subspaces;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1 || ranks[i] > n)
      throw PreconditionError("gen_random_projections: rank " + std::to_string(ranks[i]) + " outside [1, " +
                              std::to_string(n) + "]");
    auto rng = stream(seed, Stream::Projections, i);
    subspaces.emplace_back(orthonormalize(gaussian(field, n, ranks[i], rng), tol), tol);
  }
  return ProjectionFamily::from_subspaces(std::move(subspaces), tol);
}

Frame gen_random_frame(Index n, Index m, Field field, std::uint64_t seed) {
  auto rng = stream(seed, Stream::RandomFrame);
  return Frame(gaussian(field, n, m, rng));
}

}  // namespace phaseret
