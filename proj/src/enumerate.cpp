// Complement-property and full-spark enumerations. Each has an OpenMP kernel
// and a serial reference; both return the first failure in enumeration order.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <omp.h>

#include "phaseret/detail/rank_kernel.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/frames.hpp"

namespace phaseret {

namespace {

constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

template <typename MatrixT>
MatrixT frame_matrix(const Frame& f) {
  if constexpr (std::is_same_v<typename MatrixT::Scalar, double>) {
    return f.vectors().real_part();
  } else {
    return f.vectors().entries();
  }
}

/// Gathers the columns selected (or not selected) by a bipartition mask and tests spanning.
template <typename MatrixT>
class SideTester {
 public:
  SideTester(const MatrixT& all, double rtol) : all_(all), rtol_(rtol), buf_(all.rows(), all.cols()) {}

  /// Side I = vector 0 plus every j+1 whose bit j is clear; side I^c the rest.
  bool side_spans(std::uint64_t mask, bool complement) {
    const Index m = all_.cols();
    const Index n = all_.rows();
    Index k = 0;
    if (!complement) buf_.col(k++) = all_.col(0);
    for (Index j = 1; j < m; ++j) {
      const bool in_ic = (mask >> (j - 1)) & 1U;
      if (in_ic == complement) buf_.col(k++) = all_.col(j);
    }
    if (k < n) return false;
    return detail::rank_of<MatrixT>(buf_.leftCols(k), rtol_) == n;
  }

  bool fails(std::uint64_t mask) { return !side_spans(mask, false) && !side_spans(mask, true); }

 private:
  const MatrixT& all_;
  double rtol_;
  MatrixT buf_;
};

void check_cp_limits(const Frame& f, const EnumerationLimits& limits) {
  if (f.size() == 0) throw PreconditionError("complement_property: frame has no vectors");
  if (f.size() > limits.cp_max_vectors)
    throw CapacityError("complement_property: frame has more vectors than the enumeration cap",
                        static_cast<double>(f.size()), static_cast<double>(limits.cp_max_vectors));
  if (f.size() > 63)
    throw CapacityError("complement_property: mask width exceeded", static_cast<double>(f.size()), 63.0);
}

PartitionWitness make_witness(const Frame& f, std::uint64_t mask, const Tolerances& tol) {
  PartitionWitness w;
  std::vector<std::size_t> ic;
  w.side_I.push_back(0);
  for (std::size_t j = 1; j < f.size(); ++j) {
    if ((mask >> (j - 1)) & 1U) {
      ic.push_back(j);
    } else {
      w.side_I.push_back(j);
    }
  }
  w.rank_I = numerical_rank(f.select(w.side_I), tol);
  w.rank_Ic = ic.empty() ? 0 : numerical_rank(f.select(ic), tol);
  return w;
}

template <typename MatrixT>
std::uint64_t cp_first_failure_parallel(const Frame& f, const Tolerances& tol) {
  const MatrixT all = frame_matrix<MatrixT>(f);
  const std::uint64_t total = std::uint64_t{1} << (f.size() - 1);
  std::atomic<std::uint64_t> best{kNone};
#pragma omp parallel
  {
    SideTester<MatrixT> tester(all, tol.rank_rtol);
#pragma omp for schedule(dynamic, 1024)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(total); ++s) {
      const auto mask = static_cast<std::uint64_t>(s);
      if (mask >= best.load(std::memory_order_relaxed)) continue;
      if (tester.fails(mask)) {
        auto cur = best.load(std::memory_order_relaxed);
        while (mask < cur && !best.compare_exchange_weak(cur, mask, std::memory_order_relaxed)) {
        }
      }
    }
  }
  return best.load();
}

template <typename MatrixT>
std::uint64_t cp_first_failure_serial(const Frame& f, const Tolerances& tol) {
  const MatrixT all = frame_matrix<MatrixT>(f);
  const std::uint64_t total = std::uint64_t{1} << (f.size() - 1);
  SideTester<MatrixT> tester(all, tol.rank_rtol);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    if (tester.fails(mask)) return mask;
  }
  return kNone;
}

CpResult cp_result(const Frame& f, std::uint64_t mask, const Tolerances& tol) {
  if (mask == kNone) return {};
  return {make_witness(f, mask, tol)};
}

// Lexicographic n-subsets of [0, m).

std::uint64_t check_spark_limits(const Frame& f, const EnumerationLimits& limits) {
  const auto m = static_cast<std::uint64_t>(f.size());
  const auto n = static_cast<std::uint64_t>(f.dim());
  if (m < n) throw PreconditionError("full_spark: frame has fewer vectors than the dimension");
  const std::uint64_t total = binomial(m, n);
  if (static_cast<double>(total) > limits.spark_max_subsets)
    throw CapacityError("full_spark: subset count exceeds the enumeration cap", static_cast<double>(total),
                        limits.spark_max_subsets);
  return total;
}

/// Combination with lexicographic rank r.
std::vector<Index> unrank_combination(std::uint64_t r, Index m, Index n) {
  std::vector<Index> c(static_cast<std::size_t>(n));
  Index next = 0;
  for (Index pos = 0; pos < n; ++pos) {
    for (Index v = next;; ++v) {
      const auto block = binomial(static_cast<std::uint64_t>(m - 1 - v), static_cast<std::uint64_t>(n - 1 - pos));
      if (r < block) {
        c[static_cast<std::size_t>(pos)] = v;
        next = v + 1;
        break;
      }
      r -= block;
    }
  }
  return c;
}

bool next_combination(std::vector<Index>& c, Index m) {
  const auto n = static_cast<Index>(c.size());
  Index i = n - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == m - n + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < n; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

template <typename MatrixT>
bool subset_deficient(const MatrixT& all, const std::vector<Index>& c, MatrixT& buf, double rtol) {
  for (std::size_t k = 0; k < c.size(); ++k) buf.col(static_cast<Index>(k)) = all.col(c[k]);
  return detail::rank_of<MatrixT>(buf, rtol) < all.rows();
}

template <typename MatrixT>
std::uint64_t spark_first_failure_parallel(const Frame& f, std::uint64_t total, const Tolerances& tol) {
  const MatrixT all = frame_matrix<MatrixT>(f);
  const Index m = all.cols();
  const Index n = all.rows();
  constexpr std::uint64_t chunk = 2048;
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  std::atomic<std::uint64_t> best{kNone};
#pragma omp parallel
  {
    MatrixT buf(n, n);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(chunks); ++s) {
      const std::uint64_t begin = static_cast<std::uint64_t>(s) * chunk;
      if (begin >= best.load(std::memory_order_relaxed)) continue;
      const std::uint64_t end = std::min(total, begin + chunk);
      auto c = unrank_combination(begin, m, n);
      for (std::uint64_t r = begin; r < end; ++r) {
        if (r >= best.load(std::memory_order_relaxed)) break;
        if (subset_deficient(all, c, buf, tol.rank_rtol)) {
          auto cur = best.load(std::memory_order_relaxed);
          while (r < cur && !best.compare_exchange_weak(cur, r, std::memory_order_relaxed)) {
          }
          break;
        }
        next_combination(c, m);
      }
    }
  }
  return best.load();
}

template <typename MatrixT>
std::optional<std::vector<Index>> spark_first_failure_serial(const Frame& f, const Tolerances& tol) {
  const MatrixT all = frame_matrix<MatrixT>(f);
  const Index m = all.cols();
  const Index n = all.rows();
  MatrixT buf(n, n);
  std::vector<Index> c(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = k;
  do {
    if (subset_deficient(all, c, buf, tol.rank_rtol)) return c;
  } while (next_combination(c, m));
  return std::nullopt;
}

SparkResult spark_result(std::optional<std::vector<Index>> c) {
  if (!c) return {};
  return {std::vector<std::size_t>(c->begin(), c->end())};
}

}  // namespace

CpResult complement_property(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits) {
  check_cp_limits(f, limits);
  const auto mask = f.field() == Field::Real ? cp_first_failure_parallel<Eigen::MatrixXd>(f, tol)
                                             : cp_first_failure_parallel<CMatrix>(f, tol);
  return cp_result(f, mask, tol);
}

SparkResult full_spark(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits) {
  const std::uint64_t total = check_spark_limits(f, limits);
  const auto r = f.field() == Field::Real ? spark_first_failure_parallel<Eigen::MatrixXd>(f, total, tol)
                                          : spark_first_failure_parallel<CMatrix>(f, total, tol);
  if (r == kNone) return {};
  return spark_result(unrank_combination(r, static_cast<Index>(f.size()), f.dim()));
}

namespace reference {

CpResult complement_property(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits) {
  check_cp_limits(f, limits);
  const auto mask = f.field() == Field::Real ? cp_first_failure_serial<Eigen::MatrixXd>(f, tol)
                                             : cp_first_failure_serial<CMatrix>(f, tol);
  return cp_result(f, mask, tol);
}

SparkResult full_spark(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits) {
  check_spark_limits(f, limits);
  return spark_result(f.field() == Field::Real ? spark_first_failure_serial<Eigen::MatrixXd>(f, tol)
                                               : spark_first_failure_serial<CMatrix>(f, tol));
}

}  // namespace reference

}  // namespace phaseret
