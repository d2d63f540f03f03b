#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "phaseret/certify.hpp"
#include "phaseret/errors.hpp"
#include "phaseret/rng.hpp"

using namespace phaseret;
using th::basis_vector;
using th::complex_cols;
using th::family_of;
using th::real_cols;

namespace {

/// Independent measurement mismatch, computed from the projection matrices.
double mismatch_oracle(const ProjectionFamily& p, const CMatrix& u, const CMatrix& v) {
  double worst = 0.0;
  for (const auto& P : p.projections())
    worst = std::max(worst, std::abs((P.entries() * u).squaredNorm() - (P.entries() * v).squaredNorm()));
  return worst;
}

/// Random family whose ranges all lie in z-perp for a fixed unit z, so every
/// P_i x is orthogonal to z and {P_i x} cannot span. Returns a unit x.
ProjectionFamily nonspanning_family(Field field, Index n, std::size_t m, std::mt19937_64& rng, Mat& x_out) {
  const Tolerances tol;
  const Mat x = [&] {
    Mat g = gaussian(field, n, 1, rng);
    return Mat(field, g.entries() / g.norm());
  }();
  const Mat z = orthogonal_complement_point(x, tol, rng());
  std::vector<Mat> ps;
  std::uniform_int_distribution<Index> rank(1, n - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Index k = rank(rng);
    const Mat g = gaussian(field, n, k, rng);
    const CMatrix q = CMatrix::Identity(n, n) - z.entries() * z.entries().adjoint();
    ps.push_back(th::proj_onto(Mat(field, q * g.entries()), tol));
  }
  x_out = x;
  return ProjectionFamily::from_projections(ps, tol);
}

SearchConfig quick_config(std::uint64_t seed = 0) {
  SearchConfig cfg;
  cfg.restarts = 16;
  cfg.max_iters = 300;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("verify_pr_witness examples") {
    const Tolerances tol;
    const auto axes = family_of({real_cols({{1, 0}}), real_cols({{0, 1}})});
    const Mat u = real_cols({{1, 1}});
    const auto same = verify_pr_witness(axes, u, u, tol);
    CHECK_FALSE(same.valid);
    CHECK(same.phase_gap == doctest::Approx(0.0));

    const auto caxes = family_of({complex_cols({{1.0, 0.0}}), complex_cols({{0.0, 1.0}})});
    const Mat cu = complex_cols({{Complex(1, 2), Complex(-0.5, 1)}});
    const Mat iu(Field::Complex, cu.entries() * Complex(0, 1));
    const auto rot = verify_pr_witness(caxes, cu, iu, tol);
    CHECK_FALSE(rot.valid);
    CHECK(rot.phase_gap < 1e-15);
    CHECK(rot.max_mismatch < 1e-15);

    const auto pm = verify_pr_witness(axes, real_cols({{1, 1}}), real_cols({{1, -1}}), tol);
    CHECK(pm.valid);
    CHECK(pm.max_mismatch == 0.0);
    CHECK(pm.phase_gap == doctest::Approx(1.0));

    CHECK_THROWS_AS(verify_pr_witness(axes, Mat::zeros(Field::Real, 2, 1), u, tol), PreconditionError);
    CHECK_THROWS_AS(verify_pr_witness(axes, cu, cu, tol), FieldError);
  }

  TEST_CASE("property: unimodular multiples are never witnesses") {
    const Tolerances tol;
    auto rng = stream(1, Stream::TestData);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
    for (int t = 0; t < 100; ++t) {
      const Index n = 2 + t % 4;
      const auto p = gen_random_projections(n, {1, 2, n}, Field::Complex, static_cast<std::uint64_t>(t));
      const Mat u = gaussian(Field::Complex, n, 1, rng);
      const Mat cu(Field::Complex, u.entries() * std::polar(1.0, ang(rng)));
      const auto r = verify_pr_witness(p, u, cu, tol);
      CHECK_FALSE(r.valid);
      CHECK(r.phase_gap < tol.phase_tol);
      // Real case: c = -1.
      const Mat ru = gaussian(Field::Real, n, 1, rng);
      const auto pr = gen_random_projections(n, {1, n}, Field::Real, static_cast<std::uint64_t>(t));
      CHECK_FALSE(verify_pr_witness(pr, ru, Mat(Field::Real, -ru.entries()), tol).valid);
    }
  }

  TEST_CASE("phase_gap") {
    CHECK(phase_gap(real_cols({{1, 0}}), real_cols({{0, 1}})) == doctest::Approx(1.0));
    CHECK(phase_gap(real_cols({{1, 0}}), real_cols({{-3, 0}})) == doctest::Approx(0.0));
    CHECK(phase_gap(real_cols({{1, 0}}), real_cols({{1, 1}})) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
  }

  TEST_CASE("pr_witness_from_nonspanning examples") {
    const Tolerances tol;
    const auto axes = family_of({real_cols({{1, 0}}), real_cols({{0, 1}})});
    const Mat e1 = basis_vector(Field::Real, 2, 0);
    const auto w = pr_witness_from_nonspanning(axes, e1, tol);
    CHECK(std::abs(w.u(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(w.u(1, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(w.u(1, 0) + w.v(1, 0)) < 1e-15);
    for (const auto& P : axes.projections()) {
      CHECK((P.entries() * w.u.entries()).norm() == doctest::Approx(1.0));
      CHECK((P.entries() * w.v.entries()).norm() == doctest::Approx(1.0));
    }
    CHECK(verify_pr_witness(axes, w.u, w.v, tol).valid);

    const auto id = family_of({Mat::identity(Field::Real, 2)});
    const auto wi = pr_witness_from_nonspanning(id, e1, tol);
    CHECK(wi.max_mismatch < 1e-15);
    CHECK(wi.u.norm() == doctest::Approx(std::sqrt(2.0)));
    CHECK(wi.phase_gap > tol.phase_tol);

    const auto tri = ProjectionFamily::rank_one(Frame(real_cols({{1, 0}, {0, 1}, {1, 1}})));
    CHECK_THROWS_AS(pr_witness_from_nonspanning(tri, e1, tol), PreconditionError);
  }

  TEST_CASE("property: forward construction in both fields") {
    const Tolerances tol;
    auto rng = stream(2, Stream::TestData);
    for (int t = 0; t < 200; ++t) {
      const Field field = t % 2 ? Field::Complex : Field::Real;
      const Index n = 2 + t % 4;
      Mat x;
      const auto p = nonspanning_family(field, n, 2 + t % 7, rng, x);
      REQUIRE_FALSE(spanning_at(p, x, tol).spans);
      const auto w = pr_witness_from_nonspanning(p, x, tol, static_cast<std::uint64_t>(t));
      const double scale = std::max(w.u.norm(), w.v.norm());
      CHECK(mismatch_oracle(p, w.u.entries(), w.v.entries()) / (scale * scale) < 1e-12);
      CHECK(oracle::ge_rank(p.images(x).entries()) < n);
      CHECK(th::phase_distance(w.u.entries(), w.v.entries()) > 1e-3);
      CHECK(verify_pr_witness(p, w.u, w.v, tol).valid);
    }
  }

  TEST_CASE("decide_real_rank1 examples") {
    const Tolerances tol;
    CHECK(decide_real_rank1(Frame(real_cols({{1, 0}, {0, 1}, {1, 1}})), tol).status == Status::CertifiedHolds);

    const Frame two(real_cols({{1, 0}, {0, 1}}));
    const auto v = decide_real_rank1(two, tol);
    REQUIRE(v.status == Status::CertifiedFails);
    REQUIRE(v.pr_witness);
    REQUIRE(v.partition);
    for (Index i = 0; i < 2; ++i) {
      const Mat e = basis_vector(Field::Real, 2, i);
      CHECK(std::abs(inner(v.pr_witness->u, e)) == doctest::Approx(1.0));
      CHECK(std::abs(inner(v.pr_witness->v, e)) == doctest::Approx(1.0));
    }
    CHECK(th::phase_distance(v.pr_witness->u.entries(), v.pr_witness->v.entries()) > 1.0);

    auto rng = stream(3, Stream::TestData);
    for (int t = 0; t < 20; ++t) {
      const Frame f(gaussian(Field::Real, 3, 5, rng));
      CHECK(decide_real_rank1(f, tol).status == Status::CertifiedHolds);
      CHECK(oracle::brute_force_cp(f.vectors().entries()));
    }
    CHECK_THROWS_AS(decide_real_rank1(Frame(Mat::identity(Field::Complex, 2)), tol), FieldError);
  }

  TEST_CASE("spanning_falsifier examples") {
    const auto cfg = quick_config();
    const auto axes = family_of({real_cols({{1, 0}}), real_cols({{0, 1}})});
    const auto v = spanning_falsifier(axes, cfg);
    // Real rank-one families are decided exactly.
    CHECK(v.status == Status::CertifiedFails);
    REQUIRE(v.point);
    const Mat& x = *v.point;
    CHECK(std::min(std::abs(x(0, 0)), std::abs(x(1, 0))) < 1e-12);
    CHECK(verify_pr_witness(axes, v.pr_witness->u, v.pr_witness->v, cfg.tol).valid);

    const auto tri = ProjectionFamily::rank_one(Frame(real_cols({{1, 0}, {0, 1}, {1, 1}})));
    CHECK(spanning_falsifier(tri, cfg).status == Status::CertifiedHolds);

    // Complex axes: no exact path, so the search must find it.
    const auto caxes = family_of({complex_cols({{1.0, 0.0}}), complex_cols({{0.0, 1.0}})});
    const auto c = spanning_falsifier(caxes, cfg);
    CHECK(c.status == Status::Falsified);
    REQUIRE(c.pr_witness);
    CHECK(verify_pr_witness(caxes, c.pr_witness->u, c.pr_witness->v, cfg.tol).valid);
    CHECK_FALSE(spanning_at(caxes, *c.point, cfg.tol).spans);
  }

  TEST_CASE("coordinate planes in R^3: spanning and pr falsifiers agree") {
    const auto planes = family_of({real_cols({{1, 0, 0}, {0, 1, 0}}), real_cols({{0, 1, 0}, {0, 0, 1}}),
                                   real_cols({{0, 0, 1}, {1, 0, 0}})});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto cfg = quick_config(seed);
      const auto s = spanning_falsifier(planes, cfg);
      const auto p = pr_falsifier(planes, cfg);
      // x = e1 gives images {e1, 0, e1}: non-spanning.
      CHECK(s.status == Status::Falsified);
      CHECK(p.status == Status::Falsified);
      CHECK(verify_pr_witness(planes, s.pr_witness->u, s.pr_witness->v, cfg.tol).valid);
      CHECK(verify_pr_witness(planes, p.pr_witness->u, p.pr_witness->v, cfg.tol).valid);
    }
  }

  TEST_CASE("pr_falsifier examples") {
    auto cfg = quick_config();
    const auto axes = family_of({real_cols({{1, 0}}), real_cols({{0, 1}})});
    CHECK(pr_falsifier(axes, cfg).status == Status::Falsified);

    const auto tri_c = ProjectionFamily::rank_one(Frame(complex_cols({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})));
    const auto v = pr_falsifier(tri_c, cfg);
    REQUIRE(v.status == Status::Falsified);
    CHECK(verify_pr_witness(tri_c, v.pr_witness->u, v.pr_witness->v, cfg.tol).valid);
    CHECK(v.pr_witness->phase_gap > 1e-3);

    const auto tri = ProjectionFamily::rank_one(Frame(real_cols({{1, 0}, {0, 1}, {1, 1}})));
    CHECK(pr_falsifier(tri, cfg).status == Status::NoWitnessFound);
  }

  TEST_CASE("gradient step policy also finds the complex witness") {
    auto cfg = quick_config(4);
    cfg.step = StepPolicy::ProjectedGradient;
    cfg.restarts = 32;
    cfg.max_iters = 2000;
    const auto tri_c = ProjectionFamily::rank_one(Frame(complex_cols({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})));
    const auto v = pr_falsifier(tri_c, cfg);
    REQUIRE(v.status == Status::Falsified);
    CHECK(verify_pr_witness(tri_c, v.pr_witness->u, v.pr_witness->v, cfg.tol).valid);
  }

  TEST_CASE("serial and parallel restarts give the same verdict") {
    auto cfg = quick_config(9);
    const auto tri_c = ProjectionFamily::rank_one(Frame(complex_cols({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}})));
    const auto a = pr_falsifier(tri_c, cfg);
    cfg.parallel = false;
    const auto b = pr_falsifier(tri_c, cfg);
    REQUIRE(a.status == b.status);
    CHECK(a.restart == b.restart);
    CHECK(max_abs(a.pr_witness->u.entries() - b.pr_witness->u.entries()) == 0.0);
    CHECK(max_abs(a.pr_witness->v.entries() - b.pr_witness->v.entries()) == 0.0);
  }

  TEST_CASE("property: real rank-one equivalence on a small corpus") {
    auto rng = stream(5, Stream::TestData);
    SearchConfig cfg = quick_config(11);
    cfg.restarts = 50;
    int holds = 0, fails = 0;
    for (int t = 0; t < 30; ++t) {
      const Index n = 2 + t % 3;
      const Index m = n + t % (n + 2);
      const Frame f(gaussian(Field::Real, n, m, rng));
      const auto exact = decide_real_rank1(f, cfg.tol);
      const auto search = pr_falsifier(ProjectionFamily::rank_one(f), cfg);
      if (exact.status == Status::CertifiedHolds) {
        ++holds;
        CHECK(search.status == Status::NoWitnessFound);
      } else {
        ++fails;
        REQUIRE(exact.pr_witness);
        CHECK(exact.pr_witness->max_mismatch < 1e-9);
        CHECK(exact.pr_witness->phase_gap > 1e-6);
        CHECK(search.status == Status::Falsified);
      }
    }
    CHECK(holds > 0);
    CHECK(fails > 0);
  }

  TEST_CASE("property: ONB unions of spanning real rank-one families have the complement property") {
    const Tolerances tol;
    auto rng = stream(6, Stream::TestData);
    int checked = 0;
    for (int t = 0; t < 40; ++t) {
      const Index n = 2 + t % 3;
      const Frame f(gaussian(Field::Real, n, 2 * n - 1 + t % 2, rng));
      const auto p = ProjectionFamily::rank_one(f);
      if (decide_real_rank1(rank1_reduction(p, tol), tol).status != Status::CertifiedHolds) continue;
      ++checked;
      for (std::uint64_t k = 0; k < 10; ++k) CHECK(complement_property(onb_union(p, k), tol).holds());
    }
    CHECK(checked > 20);
  }

  TEST_CASE("property: mixed-rank ONB union failures yield verified witnesses") {
    const Tolerances tol;
    auto rng = stream(7, Stream::TestData);
    int failures = 0;
    for (int t = 0; t < 40; ++t) {
      const Index n = 2 + t % 3;
      std::vector<Index> ranks;
      std::uniform_int_distribution<Index> rk(1, n);
      for (int i = 0; i < 1 + t % 5; ++i) ranks.push_back(rk(rng));
      const auto p = gen_random_projections(n, ranks, Field::Real, rng());
      for (std::uint64_t k = 0; k < 10; ++k) {
        const Frame f = onb_union(p, k);
        const auto cp = complement_property(f, tol);
        if (cp.holds()) continue;
        ++failures;
        const Mat x = nonspanning_point_from_cp_failure(p, f, *cp.witness, tol);
        CHECK(spanning_at(p, x, tol).rank < static_cast<std::size_t>(n));
        const auto w = pr_witness_from_nonspanning(p, x, tol);
        CHECK(verify_pr_witness(p, w.u, w.v, tol).valid);
      }
    }
    CHECK(failures > 0);
  }

  TEST_CASE("search config validation") {
    SearchConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.validate(), InputDomainError);
    cfg = {};
    cfg.max_iters = 0;
    CHECK_THROWS_AS(cfg.validate(), InputDomainError);
  }
}

TEST_SUITE("generators") {
  TEST_CASE("gen_full_spark examples") {
    const Tolerances tol;
    const Frame r = gen_full_spark(2, 3, Field::Real);
    CHECK(max_abs(r.vectors().entries() - real_cols({{1, 0}, {1, 1}, {1, 2}}).entries()) == 0.0);
    CHECK(full_spark(r, tol).holds());
    CHECK(oracle::brute_force_spark(r.vectors().entries()));

    const Frame c = gen_full_spark(2, 3, Field::Complex);
    CHECK(c.field() == Field::Complex);
    CHECK(std::abs(c.vectors()(1, 1) - std::polar(1.0, 2 * M_PI / 3)) < 1e-15);
    CHECK(full_spark(c, tol).holds());

    const Frame sq = gen_full_spark(4, 4, Field::Real);
    CHECK(numerical_rank(sq.vectors(), tol) == 4);
    CHECK_THROWS_AS(gen_full_spark(3, 2, Field::Real), PreconditionError);
    for (Index n = 1; n <= 4; ++n)
      for (Index m = n; m <= 2 * n + 2; ++m)
        CHECK(oracle::brute_force_spark(gen_full_spark(n, m, Field::Complex).vectors().entries()));
  }

  TEST_CASE("gen_random_projections examples") {
    const Tolerances tol;
    const auto full = gen_random_projections(3, {3}, Field::Real, 1);
    CHECK(max_abs(full.projection(0).entries() - CMatrix::Identity(3, 3)) < 1e-12);

    const auto a = gen_random_projections(2, {1, 1, 1}, Field::Real, 7);
    const auto b = gen_random_projections(2, {1, 1, 1}, Field::Real, 7);
    const auto c = gen_random_projections(2, {1, 1, 1}, Field::Real, 8);
    double dab = 0, dac = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const CMatrix& P = a.projection(i).entries();
      CHECK(max_abs(P * P - P) < tol.proj_tol);
      CHECK(max_abs(P - P.adjoint()) < tol.proj_tol);
      dab += (P - b.projection(i).entries()).norm();
      dac += (P - c.projection(i).entries()).norm();
    }
    CHECK(dab == 0.0);
    CHECK(dac > 0.0);
    CHECK_THROWS_AS(gen_random_projections(2, {3}, Field::Real, 0), PreconditionError);
    CHECK_THROWS_AS(gen_random_projections(2, {0}, Field::Real, 0), PreconditionError);
  }
}
