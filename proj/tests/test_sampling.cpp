#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cartanflow/errors.hpp"
#include "cartanflow/sampling.hpp"
#include "cartanflow/slice.hpp"

using namespace cartanflow;

TEST_CASE("normalization constants against independent quadrature") {
  struct Case {
    SpaceKind kind;
    int m, n;
    double z;
  };
  // Reference values from scipy quad/dblquad over the chamber, or exact.
  const Case cases[] = {{SpaceKind::aiii, 2, 1, 1.0},
                        {SpaceKind::aiii, 3, 2, 2.0},
                        {SpaceKind::ai, 0, 3, 1.0233267079464885},
                        {SpaceKind::a2, 0, 3, 7.2551974569368705},
                        {SpaceKind::ci, 0, 2, 0.5},
                        {SpaceKind::bdi, 2, 2, 0.25},
                        {SpaceKind::cii, 2, 1, 1.5},
                        {SpaceKind::diii, 0, 3, 0.25},
                        {SpaceKind::aiii, 3, 3, 4.0},
                        {SpaceKind::aiii, 4, 4, 144.0},
                        {SpaceKind::bdi, 4, 4, 1.0 / 64.0},
                        {SpaceKind::ci, 0, 4, 0.1875}};
  for (const auto& c : cases) {
    const auto s = make_space(c.kind, c.m, c.n);
    CAPTURE(s.label());
    CHECK(theoretical_normalization(s) == doctest::Approx(c.z).epsilon(1e-8));
  }
}

TEST_CASE("rank above four is unsupported") {
  const auto s = make_space(SpaceKind::ai, 0, 6);
  CHECK_THROWS_AS(theoretical_normalization(s), Unsupported);
  CHECK_THROWS_AS(theoretical_cdf(make_space(SpaceKind::ai, 0, 3), 1.0), Unsupported);
}

TEST_CASE("rank-one density integrates to one") {
  const auto s = make_space(SpaceKind::aiii, 3, 1);
  CHECK(theoretical_cdf(s, 50.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(theoretical_cdf(s, 0.0) == 0.0);
  // q^5 exp(-q^2) for su(3,1): mode at sqrt(5/2).
  const double mode = std::sqrt(2.5);
  const double at_mode = theoretical_radial_density(s, Rvec::Constant(1, mode));
  CHECK(at_mode > theoretical_radial_density(s, Rvec::Constant(1, mode * 1.01)));
  CHECK(at_mode > theoretical_radial_density(s, Rvec::Constant(1, mode * 0.99)));
  CHECK(theoretical_radial_density(s, Rvec::Constant(1, -1.0)) == 0.0);
}

TEST_CASE("histogram is reproducible and shard independent") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  const auto a = radial_histogram(s, 2000, 16, 99, 1);
  const auto b = radial_histogram(s, 2000, 16, 99, 3);
  const auto c = radial_histogram(s, 2000, 16, 99, 1);
  CHECK(a.counts == b.counts);
  CHECK(a.counts == c.counts);
  CHECK(a.counts != radial_histogram(s, 2000, 16, 100, 1).counts);
  for (const auto& per : a.counts) {
    std::uint64_t total = 0;
    for (auto v : per) total += v;
    CHECK(total == 2000);
  }
}

TEST_CASE("su(2,1) radial law: mode sqrt(3/2), mean 3 sqrt(pi) / 4") {
  // Density 2 q^3 exp(-q^2) on q >= 0.
  const auto s = make_space(SpaceKind::aiii, 2, 1);
  const double mode = std::sqrt(1.5);
  const double at_mode = theoretical_radial_density(s, Rvec::Constant(1, mode));
  CHECK(at_mode == doctest::Approx(2.0 * std::pow(mode, 3) * std::exp(-1.5)));
  CHECK(at_mode > theoretical_radial_density(s, Rvec::Constant(1, mode + 1e-3)));
  CHECK(at_mode > theoretical_radial_density(s, Rvec::Constant(1, mode - 1e-3)));

  const auto h = radial_histogram(s, 100000, 64, 7, 2);
  CHECK(h.clamped == 0);
  double mean = 0.0;
  for (std::size_t b = 0; b < 64; ++b) {
    mean += 0.5 * (h.edges.front()[b] + h.edges.front()[b + 1]) * static_cast<double>(h.counts.front()[b]);
  }
  mean /= 100000.0;
  CHECK(mean == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(0.01));
  const auto ks = ks_test(s, h);
  CHECK(ks.pass);
  CHECK(ks.statistic < ks.threshold);
}

TEST_CASE("KS test detects the wrong space") {
  // Samples from su(3,1) against the su(2,1) law.
  const auto s = make_space(SpaceKind::aiii, 3, 1);
  const auto t = make_space(SpaceKind::aiii, 2, 1);
  RadialHistogram rebinned = radial_histogram(t, 1, 64, 5, 1);
  rebinned.sample_count = 20000;
  rebinned.counts.front().assign(64, 0);
  for (int i = 0; i < 20000; ++i) {
    const Rvec q = radial_decompose(s, sample_p_gaussian(s, stream_seed(5, static_cast<std::uint64_t>(i)))).q;
    const auto& e = rebinned.edges.front();
    const double w = e[1] - e[0];
    const auto b = static_cast<std::size_t>(std::clamp(std::floor((q(0) - e[0]) / w), 0.0, 63.0));
    ++rebinned.counts.front()[b];
  }
  CHECK_FALSE(ks_test(t, rebinned).pass);
}

TEST_CASE("histogram argument validation") {
  const auto s = make_space(SpaceKind::aiii, 2, 1);
  CHECK_THROWS_AS(radial_histogram(s, 0, 8, 1, 1), ValidationError);
  CHECK_THROWS_AS(radial_histogram(s, 10, 1, 1, 1), ValidationError);
  CHECK_THROWS_AS(radial_histogram(s, 10, 8, 1, 0), ValidationError);
  const auto t = make_space(SpaceKind::ai, 0, 3);
  const auto [lo, hi] = histogram_range(t);
  CHECK(lo == -hi);
  CHECK(histogram_range(s).first == 0.0);
}

TEST_CASE("sampled coordinates are K-invariant") {
  const auto s = make_space(SpaceKind::ci, 0, 2);
  SplitMix64 rng(41);
  const Cmat k = random_k(s, rng);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Cmat x = sample_p_gaussian(s, stream_seed(3, i));
    CHECK((radial_decompose(s, x).q - radial_decompose(s, k * x * k.adjoint()).q).norm() < 1e-10);
  }
}
