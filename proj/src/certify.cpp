#include "phaseret/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>

#include <omp.h>

#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"
#include "phaseret/search.hpp"

namespace phaseret {

const char* to_string(Status s) {
  switch (s) {
    case Status::CertifiedHolds: return "CertifiedHolds";
    case Status::CertifiedFails: return "CertifiedFails";
    case Status::Falsified: return "Falsified";
    case Status::NoWitnessFound: return "NoWitnessFound";
  }
  return "?";
}

void SearchConfig::validate() const {
  tol.validate();
  if (restarts < 1) throw InputDomainError("search config: restarts must be >= 1");
  if (max_iters < 1) throw InputDomainError("search config: max_iters must be >= 1");
  if (!(barrier_weight > 0.0)) throw InputDomainError("search config: barrier_weight must be positive");
}

namespace {

template <typename R>
struct Found {
  std::size_t index;
  R value;
};

/// Runs fn(0..count) and returns the success with the smallest index. Indices
/// above a known success are skipped, so the answer matches a serial scan.
template <typename R, typename Fn>
std::optional<Found<R>> first_success(std::size_t count, bool parallel, Fn&& fn) {
  std::vector<std::optional<R>> results(count);
  std::atomic<std::size_t> best{count};
  std::exception_ptr error;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(count); ++s) {
    const auto r = static_cast<std::size_t>(s);
    if (r >= best.load(std::memory_order_relaxed)) continue;
    try {
      auto res = fn(r);
      if (res) {
        results[r] = std::move(res);
        auto cur = best.load(std::memory_order_relaxed);
        while (r < cur && !best.compare_exchange_weak(cur, r, std::memory_order_relaxed)) {
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  const auto b = best.load();
  if (b == count) return std::nullopt;
  return Found<R>{b, std::move(*results[b])};
}

void require_column(const ProjectionFamily& p, const Mat& z, const char* op) {
  if (z.field() != p.field()) throw FieldError(std::string(op) + ": vector field differs from family field");
  if (z.rows() != p.dim() || z.cols() != 1) throw PreconditionError(std::string(op) + ": expected an n x 1 column");
}

/// Unit y orthogonal to `cols`, and to x as well when that still leaves room.
Mat complement_avoiding(const Mat& cols, const Mat& x, const Tolerances& tol, std::uint64_t seed) {
  const Mat with_x = hstack(cols, x);
  if (numerical_rank(with_x, tol) < static_cast<std::size_t>(x.rows()))
    return orthogonal_complement_point(with_x, tol, seed);
  return orthogonal_complement_point(cols, tol, seed);
}

PrWitness make_pair(const ProjectionFamily& p, const Mat& x, const Mat& y, const Tolerances& tol) {
  PrWitness w{Mat(x.field(), x.entries() + y.entries()), Mat(x.field(), x.entries() - y.entries()), 0.0, 0.0};
  const auto check = verify_pr_witness(p, w.u, w.v, tol);
  w.max_mismatch = check.max_mismatch;
  w.phase_gap = check.phase_gap;
  return w;
}

std::optional<Found<std::pair<Mat, PrWitness>>> search_nonspanning(const ProjectionFamily& p, const SearchConfig& cfg,
                                                                   std::size_t restarts) {
  using Hit = std::pair<Mat, PrWitness>;
  return first_success<Hit>(restarts, cfg.parallel, [&](std::size_t r) -> std::optional<Hit> {
    auto rng = stream(cfg.seed, Stream::SpanningRestart, r);
    const auto cand = search::spanning_restart(p, rng, cfg.max_iters);
    if (cand.objective > 1e-4) return std::nullopt;
    const Mat x(p.field(), search::polish_nonspanning(p, cand.x));
    if (spanning_at(p, x, cfg.tol).spans) return std::nullopt;
    try {
      auto w = pr_witness_from_nonspanning(p, x, cfg.tol, derive_seed(cfg.seed, Stream::Complement, r));
      return Hit{x, std::move(w)};
    } catch (const InvalidWitnessError&) {
      return std::nullopt;
    }
  });
}

}  // namespace

double phase_gap(const Mat& u, const Mat& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw PreconditionError("phase_gap: zero vector");
  const double ratio = std::abs(inner(u, v)) / (nu * nv);
  return std::max(0.0, 1.0 - ratio);
}

WitnessCheck verify_pr_witness(const ProjectionFamily& p, const Mat& u, const Mat& v, const Tolerances& tol) {
  require_column(p, u, "verify_pr_witness");
  require_column(p, v, "verify_pr_witness");
  if (u.norm() == 0.0 || v.norm() == 0.0) throw PreconditionError("verify_pr_witness: u and v must be nonzero");
  WitnessCheck out;
  for (const auto& proj : p.projections()) {
    const double d = (proj.entries() * u.entries()).squaredNorm() - (proj.entries() * v.entries()).squaredNorm();
    out.max_mismatch = std::max(out.max_mismatch, std::abs(d));
  }
  out.phase_gap = phase_gap(u, v);
  out.valid = out.max_mismatch < tol.witness_tol && out.phase_gap > tol.phase_tol;
  return out;
}

PrWitness pr_witness_from_nonspanning(const ProjectionFamily& p, const Mat& x_in, const Tolerances& tol,
                                      std::uint64_t seed) {
  require_column(p, x_in, "pr_witness_from_nonspanning");
  if (x_in.norm() == 0.0) throw PreconditionError("pr_witness_from_nonspanning: x must be nonzero");
  if (spanning_at(p, x_in, tol).spans)
    throw PreconditionError("pr_witness_from_nonspanning: {P_i x} spans the space");
  const Mat x(x_in.field(), x_in.entries() / x_in.norm());
  const Mat y = complement_avoiding(p.images(x), x, tol, seed);
  PrWitness w = make_pair(p, x, y, tol);
  if (!(w.max_mismatch < tol.witness_tol && w.phase_gap > tol.phase_tol))
    throw InvalidWitnessError("pr_witness_from_nonspanning: constructed pair failed verification (mismatch " +
                              std::to_string(w.max_mismatch) + ", phase gap " + std::to_string(w.phase_gap) + ")");
  return w;
}

Verdict decide_real_rank1(const Frame& f, const Tolerances& tol, const EnumerationLimits& limits) {
  if (f.field() != Field::Real) throw FieldError("decide_real_rank1: the complement property certifies only real frames");
  Verdict out;
  out.method = "exact: complement property";
  auto cp = complement_property(f, tol, limits);
  if (cp.holds()) {
    out.status = Status::CertifiedHolds;
    return out;
  }
  const PartitionWitness& w = *cp.witness;
  const Mat side = f.select(w.side_I);
  const auto ic = w.side_Ic(f.size());
  const Mat side_c = ic.empty() ? Mat::zeros(Field::Real, f.dim(), 0) : f.select(ic);
  const Mat x = orthogonal_complement_point(side, tol, 0);
  const Mat y = complement_avoiding(side_c, x, tol, 1);
  const auto family = ProjectionFamily::rank_one(f, tol);
  out.status = Status::CertifiedFails;
  out.pr_witness = make_pair(family, x, y, tol);
  out.partition = w;
  out.point = x;
  return out;
}

Verdict spanning_falsifier(const ProjectionFamily& p, const SearchConfig& cfg) {
  cfg.validate();
  if (p.field() == Field::Real && p.all_rank_one()) {
    const Frame f = rank1_reduction(p, cfg.tol);
    Verdict v = decide_real_rank1(f, cfg.tol);
    v.method = "exact: rank-one reduction + complement property";
    if (v.status == Status::CertifiedFails) {
      v.point = nonspanning_point_from_cp_failure(p, f, *v.partition, cfg.tol, cfg.seed);
      const auto check = verify_pr_witness(p, v.pr_witness->u, v.pr_witness->v, cfg.tol);
      v.pr_witness->max_mismatch = check.max_mismatch;
      v.pr_witness->phase_gap = check.phase_gap;
    }
    return v;
  }
  Verdict out;
  if (auto hit = search_nonspanning(p, cfg, cfg.restarts)) {
    out.status = Status::Falsified;
    out.point = hit->value.first;
    out.pr_witness = std::move(hit->value.second);
    out.restart = hit->index;
    out.method = "search: alternating minimization of sigma_n(P_1 x, ..., P_m x)";
    return out;
  }
  out.status = Status::NoWitnessFound;
  out.method = "search: no non-spanning point after " + std::to_string(cfg.restarts) + " restarts";
  return out;
}

Verdict pr_falsifier(const ProjectionFamily& p, const SearchConfig& cfg) {
  cfg.validate();
  Verdict out;
  const std::size_t seed_restarts = std::max<std::size_t>(1, cfg.restarts / 4);
  if (auto hit = search_nonspanning(p, cfg, seed_restarts)) {
    out.status = Status::Falsified;
    out.point = hit->value.first;
    out.pr_witness = std::move(hit->value.second);
    out.restart = hit->index;
    out.method = "search: non-spanning point, pair (x + y, x - y)";
    return out;
  }

  auto hit = first_success<PrWitness>(cfg.restarts, cfg.parallel, [&](std::size_t r) -> std::optional<PrWitness> {
    auto rng = stream(cfg.seed, Stream::PrRestart, r);
    auto cand = cfg.step == StepPolicy::Alternating
                    ? search::pr_restart_alternating(p, rng, cfg.max_iters)
                    : search::pr_restart_gradient(p, rng, cfg.max_iters, cfg.tol.phase_tol, cfg.barrier_weight);
    if (cand.objective > 1e-4) return std::nullopt;
    cand = search::polish_pair(p, cand);
    const Mat u(p.field(), cand.u);
    const Mat v(p.field(), cand.v);
    if (u.norm() == 0.0 || v.norm() == 0.0) return std::nullopt;
    const auto check = verify_pr_witness(p, u, v, cfg.tol);
    if (!check.valid) return std::nullopt;
    return PrWitness{u, v, check.max_mismatch, check.phase_gap};
  });
  if (hit) {
    out.status = Status::Falsified;
    out.pr_witness = std::move(hit->value);
    out.restart = hit->index;
    out.method = cfg.step == StepPolicy::Alternating ? "search: alternating minimization of h(x + y, x - y)"
                                                     : "search: projected gradient on h(u, v)";
    return out;
  }
  out.status = Status::NoWitnessFound;
  out.method = "search: no witness pair after " + std::to_string(seed_restarts + cfg.restarts) + " restarts";
  return out;
}

Counterexample complex_counterexample(Index n, const SearchConfig& cfg) {
  cfg.validate();
  if (n < 2) throw PreconditionError("complex_counterexample: n must be >= 2");
  Counterexample out{gen_full_spark(n, 2 * n - 1, Field::Complex), {}, Status::NoWitnessFound, std::nullopt, {}};
  const Frame& f = out.frame;
  out.spanning.full_spark = full_spark(f, cfg.tol).holds();

  const auto family = ProjectionFamily::rank_one(f, cfg.tol);
  auto rng = stream(cfg.seed, Stream::SpotCheck);
  out.spanning.spot_checks = cfg.spot_checks;
  out.spanning.min_nonzero_products = f.size();
  for (std::size_t k = 0; k < cfg.spot_checks; ++k) {
    Mat x = gaussian(Field::Complex, n, 1, rng);
    x = Mat(Field::Complex, x.entries() / x.norm());
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Mat xi = f.vector(i);
      if (std::abs(inner(x, xi)) > 1e-8 * xi.norm()) ++nonzero;
    }
    out.spanning.min_nonzero_products = std::min(out.spanning.min_nonzero_products, nonzero);
    if (nonzero >= static_cast<std::size_t>(n) && spanning_at(family, x, cfg.tol).spans) ++out.spanning.spot_passes;
  }

  if (auto w = hermitian_nullspace_witness(f, cfg.tol, derive_seed(cfg.seed, Stream::HermitianRestart))) {
    out.status = Status::Falsified;
    out.witness = std::move(w);
    out.method = "hermitian nullspace: Q = uu* - vv*";
    return out;
  }
  Verdict v = pr_falsifier(family, cfg);
  out.status = v.status;
  out.witness = std::move(v.pr_witness);
  out.method = "pr falsifier fallback: " + v.method;
  return out;
}

}  // namespace phaseret
