#include <doctest.h>

#include "cartanflow/errors.hpp"
#include "cartanflow/reduction.hpp"
#include "cartanflow/slice.hpp"

using namespace cartanflow;

TEST_CASE("radial decomposition reconstructs X with k in K") {
  for (const auto& s : enumerate_spaces(3)) {
    CAPTURE(s.label());
    SplitMix64 rng(11);
    for (int draw = 0; draw < 10; ++draw) {
      const Cmat x = random_p(s, rng);
      const auto rd = radial_decompose(s, x);
      CHECK(in_closed_chamber(s, rd.q, 1e-12));
      CHECK_FALSE(s.group_k_violation(rd.k).has_value());
      const Cmat rebuilt = rd.k * s.radial_element(rd.q) * rd.k.adjoint();
      CHECK(frobenius_norm(rebuilt - x) < 1e-10 * frobenius_norm(x));
    }
  }
}

TEST_CASE("radial coordinates are K-invariant") {
  const auto s = make_space(SpaceKind::diii, 0, 4);
  SplitMix64 rng(12);
  const Cmat x = random_p(s, rng);
  const Cmat k = random_k(s, rng);
  const Rvec q1 = radial_decompose(s, x).q;
  const Rvec q2 = radial_decompose(s, k * x * k.adjoint()).q;
  CHECK((q1 - q2).norm() < 1e-10);
}

TEST_CASE("radial decomposition of a diagonal element returns its coordinates") {
  const auto s = make_space(SpaceKind::bdi, 3, 2);
  Rvec q(2);
  q << 3.0, 1.5;
  const auto rd = radial_decompose(s, s.radial_element(q));
  CHECK((rd.q - q).norm() < 1e-12);
}

TEST_CASE("radial_decompose rejects elements outside p") {
  const auto s = make_space(SpaceKind::aiii, 2, 1);
  const Cmat k = s.basis(Subspace::k).vectors.front();
  CHECK_THROWS_AS(radial_decompose(s, k), ValidationError);
  CHECK_THROWS_AS(embed_radial(s, Rvec::Zero(3)), ContractViolation);
}

TEST_CASE("chamber membership") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  Rvec q(2);
  q << 2.0, 1.0;
  CHECK(in_closed_chamber(s, q));
  CHECK(min_root_value(s, q) == doctest::Approx(1.0));
  q << 1.0, 2.0;
  CHECK_FALSE(in_closed_chamber(s, q));
  const auto t = make_space(SpaceKind::ai, 0, 3);
  Rvec u(2);
  u << 1.0, 0.0;  // spectrum (1, 0, -1)
  CHECK(in_closed_chamber(t, u));
  u << 1.0, -0.6;  // spectrum (1, -0.6, -0.4)
  CHECK_FALSE(in_closed_chamber(t, u));
}

TEST_CASE("quaternionic eigendecomposition pairs columns") {
  const auto s = make_space(SpaceKind::aii, 0, 3);
  SplitMix64 rng(13);
  const Cmat x = random_p(s, rng);
  const auto eig = quaternionic_eigen(x);
  REQUIRE(eig.values.size() == 3);
  CHECK(frobenius_norm(eig.vectors.adjoint() * eig.vectors - Cmat::Identity(6, 6)) < 1e-10);
  const Cmat j = symplectic_unit(3);
  for (int i = 0; i < 3; ++i) {
    const Cvec v = eig.vectors.col(i);
    CHECK(((x * v) - eig.values(i) * v).norm() < 1e-10);
    CHECK((eig.vectors.col(3 + i) - j * v.conjugate()).norm() < 1e-10);
  }
}

TEST_CASE("exact slice for aiii is idempotent and accepted") {
  for (auto [m, n] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 2}, {3, 3}}) {
    const auto s = make_space(SpaceKind::aiii, m, n);
    CAPTURE(s.label());
    SplitMix64 rng(14);
    for (int draw = 0; draw < 10; ++draw) {
      const Cmat x = random_p(s, rng);
      const Cmat y = random_p(s, rng);
      const auto raw = reduce_phase_point(s, x, y).slice;
      const auto once = exact_slice_reduce(s, raw);
      CHECK(once.generic);
      CHECK(slice_contains(s, once.canonical).ok);
      CHECK_FALSE(slice_contains(s, raw).ok);
      // m_elem carries the raw point to the canonical one.
      CHECK(frobenius_norm(once.m_elem * raw.r * once.m_elem.adjoint() - once.canonical.r) < 1e-10);
      CHECK_FALSE(s.group_k_violation(once.m_elem).has_value());
      const auto twice = exact_slice_reduce(s, once.canonical);
      CHECK(frobenius_norm(twice.canonical.r - once.canonical.r) < 1e-10);
      CHECK((once.canonical.q - raw.q).norm() == 0.0);
    }
  }
}

TEST_CASE("exact slice for bdi") {
  for (auto [m, n] : {std::pair{3, 2}, {4, 2}, {3, 3}}) {
    const auto s = make_space(SpaceKind::bdi, m, n);
    CAPTURE(s.label());
    SplitMix64 rng(15);
    for (int draw = 0; draw < 10; ++draw) {
      const auto raw = reduce_phase_point(s, random_p(s, rng), random_p(s, rng)).slice;
      const auto once = exact_slice_reduce(s, raw);
      CHECK(slice_contains(s, once.canonical).ok);
      const auto twice = exact_slice_reduce(s, once.canonical);
      CHECK(frobenius_norm(twice.canonical.r - once.canonical.r) < 1e-10);
    }
  }
}

TEST_CASE("exact slice errors") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  SplitMix64 rng(16);
  auto slice = reduce_phase_point(s, random_p(s, rng), random_p(s, rng)).slice;
  slice.q << 1.0, 1.0;
  CHECK_THROWS_AS(exact_slice_reduce(s, slice), DegenerateError);
  const auto t = make_space(SpaceKind::ai, 0, 3);
  const auto other = reduce_phase_point(t, random_p(t, rng), random_p(t, rng)).slice;
  CHECK_THROWS_AS(exact_slice_reduce(t, other), Unsupported);
  CHECK(slice_contains(t, other).ok);
}

TEST_CASE("constraint count equals the generic M-orbit dimension") {
  CHECK(exact_slice_constraint_count(make_space(SpaceKind::aiii, 2, 1)) == 1);
  CHECK(exact_slice_constraint_count(make_space(SpaceKind::aiii, 3, 1)) == 3);
  CHECK(exact_slice_constraint_count(make_space(SpaceKind::aiii, 3, 2)) == 2);
  for (auto [m, n] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 1}, {4, 2}, {4, 3}, {3, 3}}) {
    const auto s = make_space(SpaceKind::aiii, m, n);
    CAPTURE(s.label());
    CHECK(exact_slice_constraint_count(s) == generic_m_orbit_dimension(s, 3));
  }
  CHECK_THROWS_AS(exact_slice_constraint_count(make_space(SpaceKind::bdi, 3, 2)), Unsupported);
}

TEST_CASE("exp_k is unitary") {
  const auto s = make_space(SpaceKind::ci, 0, 3);
  SplitMix64 rng(17);
  const Cmat k = random_k(s, rng, 2.0);
  CHECK(frobenius_norm(k.adjoint() * k - Cmat::Identity(k.rows(), k.cols())) < 1e-12);
  CHECK_FALSE(s.group_k_violation(k).has_value());
}
