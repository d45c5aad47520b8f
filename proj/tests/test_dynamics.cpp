#include <doctest.h>

#include "cartanflow/dynamics.hpp"
#include "cartanflow/errors.hpp"

using namespace cartanflow;

namespace {

ReducedState random_state(const SymmetricSpace& s, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Cmat x = random_p(s, rng), y = random_p(s, rng);
  return reduced_state_from_slice(s, reduce_phase_point(s, x, y).slice);
}

}  // namespace

TEST_CASE("reduced flow tracks the direct flow") {
  for (const auto& s : {make_space(SpaceKind::aiii, 2, 1), make_space(SpaceKind::bdi, 3, 2),
                        make_space(SpaceKind::diii, 0, 5)}) {
    CAPTURE(s.label());
    SplitMix64 rng(31);
    const Cmat x = random_p(s, rng), y = random_p(s, rng);
    const auto rep = compare_with_oracle(s, {x, y}, 1.0, 1000);
    CHECK_FALSE(rep.truncated);
    CHECK(rep.max_deviation < 1e-8);
    CHECK(rep.energy_drift < 1e-9);
    CHECK(rep.spectrum_drift < 1e-9);
    CHECK(rep.deviation.size() == 1001);
  }
}

TEST_CASE("direct flow") {
  const Cmat x = Cmat::Identity(2, 2), y = 2.0 * Cmat::Identity(2, 2);
  const auto pt = direct_flow({x, y}, 0.5);
  CHECK(frobenius_norm(pt.x - 2.0 * Cmat::Identity(2, 2)) == 0.0);
}

TEST_CASE("zero l gives free motion") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  ReducedState st;
  st.q = Rvec(2);
  st.q << 3.0, 1.0;
  st.p = Rvec(2);
  st.p << 0.2, 0.1;
  st.l = Cmat::Zero(s.ambient_dim(), s.ambient_dim());
  const auto traj = integrate_reduced(s, st, 2.0, 100);
  REQUIRE_FALSE(traj.aborted);
  CHECK((traj.states.back().q - (st.q + 2.0 * st.p)).norm() < 1e-12);
}

TEST_CASE("time reversal retraces the trajectory") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  const auto start = random_state(s, 32);
  const auto forward = integrate_reduced(s, start, 0.5, 500);
  REQUIRE_FALSE(forward.aborted);
  ReducedState back = forward.states.back();
  back.p = -back.p;
  back.l = -back.l;
  const auto backward = integrate_reduced(s, back, 0.5, 500);
  REQUIRE_FALSE(backward.aborted);
  CHECK((backward.states.back().q - start.q).norm() < 1e-9);
  CHECK((backward.states.back().p + start.p).norm() < 1e-9);
}

TEST_CASE("spectrum of l and energy are conserved") {
  const auto s = make_space(SpaceKind::cii, 2, 2);
  const auto traj = integrate_reduced(s, random_state(s, 33), 0.5, 500);
  REQUIRE_FALSE(traj.aborted);
  CHECK((traj.spectrum.back() - traj.spectrum.front()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(traj.energy.back() - traj.energy.front()) < 1e-9 * std::max(1.0, traj.energy.front()));
}

TEST_CASE("vector field matches the gradient") {
  const auto s = make_space(SpaceKind::aiii, 2, 1);
  const auto st = random_state(s, 34);
  const auto v = reduced_vector_field(s, st);
  const auto g = hamiltonian_gradient(s, st);
  CHECK((v.dq - s.radial_gram().ldlt().solve(g.dp)).norm() < 1e-12);
  CHECK((s.radial_gram() * v.dp + g.dq).norm() < 1e-10);
  CHECK_FALSE(s.k_violation(v.dl).has_value());
}

TEST_CASE("integration aborts at a wall") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  auto st = random_state(s, 35);
  st.q << 1.0, 1.0;
  const auto traj = integrate_reduced(s, st, 1.0, 10);
  CHECK(traj.aborted);
  CHECK(traj.times.empty());
  CHECK_THROWS_AS(integrate_reduced(s, random_state(s, 35), 1.0, 0), ValidationError);
  CHECK_THROWS_AS(integrate_reduced(s, random_state(s, 35), -1.0, 10), ValidationError);
}
