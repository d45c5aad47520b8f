#include <doctest.h>

#include <random>
#include <thread>

#include "cartanflow/errors.hpp"
#include "cartanflow/rng.hpp"
#include "cartanflow/spaces.hpp"

using namespace cartanflow;

namespace {

int expected_dim_p(const SymmetricSpace& s) {
  const int m = s.m(), n = s.n();
  switch (s.kind()) {
    case SpaceKind::aiii: return 2 * m * n;
    case SpaceKind::bdi: return m * n;
    case SpaceKind::cii: return 4 * m * n;
    case SpaceKind::ai: return n * (n + 1) / 2 - 1;
    case SpaceKind::a2: return n * n - 1;
    case SpaceKind::aii: return n * (2 * n - 1) - 1;
    case SpaceKind::diii: return n * (n - 1);
    case SpaceKind::ci: return n * (n + 1);
  }
  return -1;
}

int expected_rank(const SymmetricSpace& s) {
  switch (s.kind()) {
    case SpaceKind::aiii:
    case SpaceKind::bdi:
    case SpaceKind::cii: return s.n();
    case SpaceKind::ai:
    case SpaceKind::a2:
    case SpaceKind::aii: return s.n() - 1;
    case SpaceKind::diii: return s.n() / 2;
    case SpaceKind::ci: return s.n();
  }
  return -1;
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (SpaceKind k : kAllKinds) CHECK(parse_kind(kind_name(k)) == k);
  CHECK_THROWS_AS(parse_kind("e6"), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_space(SpaceKind::aiii, 1, 2), ValidationError);
  CHECK_THROWS_AS(make_space(SpaceKind::bdi, 2, 0), ValidationError);
  CHECK_THROWS_AS(make_space(SpaceKind::ai, 0, 1), ValidationError);
  CHECK_NOTHROW(make_space(SpaceKind::ci, 0, 1));
}

TEST_CASE("basis dimensions match the classical formulas") {
  for (const auto& s : enumerate_spaces(4)) {
    CAPTURE(s.label());
    CHECK(s.dim_p() == expected_dim_p(s));
    CHECK(s.real_rank() == expected_rank(s));
    CHECK(static_cast<int>(s.basis(Subspace::p).size()) == s.dim_p());
    CHECK(static_cast<int>(s.basis(Subspace::k).size()) == s.dim_k());
    CHECK(static_cast<int>(s.basis(Subspace::a).size()) == s.real_rank());
    CHECK(static_cast<int>(s.basis(Subspace::a_perp).size()) == s.dim_p() - s.real_rank());
    CHECK(s.basis(Subspace::zk_perp).size() == s.basis(Subspace::a_perp).size());
    CHECK(s.basis(Subspace::zk_perp).size() + s.basis(Subspace::m_centralizer).size() ==
          s.basis(Subspace::k).size());
  }
}

TEST_CASE("bases are orthonormal and lie in their subspaces") {
  for (const auto& s : enumerate_spaces(3)) {
    CAPTURE(s.label());
    for (Subspace which : {Subspace::k, Subspace::p, Subspace::a, Subspace::a_perp}) {
      const auto& b = s.basis(which);
      for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          CHECK(frobenius_inner(b.vectors[i], b.vectors[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
        if (which == Subspace::k) {
          CHECK_FALSE(s.k_violation(b.vectors[i]).has_value());
        } else {
          CHECK_FALSE(s.p_violation(b.vectors[i]).has_value());
        }
      }
    }
  }
}

TEST_CASE("centralizer dimensions") {
  // dim M for aiii(m, n) is (m-n)^2 + n - 1 and for bdi(m, n) it is (m-n)(m-n-1)/2.
  CHECK(make_space(SpaceKind::aiii, 2, 1).basis(Subspace::m_centralizer).size() == 1);
  CHECK(make_space(SpaceKind::aiii, 3, 1).basis(Subspace::m_centralizer).size() == 4);
  CHECK(make_space(SpaceKind::aiii, 3, 2).basis(Subspace::m_centralizer).size() == 2);
  CHECK(make_space(SpaceKind::bdi, 4, 2).basis(Subspace::m_centralizer).size() == 1);
  CHECK(make_space(SpaceKind::bdi, 3, 3).basis(Subspace::m_centralizer).size() == 0);
  CHECK(make_space(SpaceKind::ai, 0, 4).basis(Subspace::m_centralizer).size() == 0);
  CHECK(make_space(SpaceKind::a2, 0, 3).basis(Subspace::m_centralizer).size() == 2);
  CHECK(make_space(SpaceKind::aii, 0, 3).basis(Subspace::m_centralizer).size() == 9);
}

TEST_CASE("restricted roots of su(3,2)") {
  const auto roots = sorted_roots(restricted_roots(make_space(SpaceKind::aiii, 3, 2)));
  const std::vector<RestrictedRoot> want = sorted_roots({{{1, 0}, 2},
                                                         {{2, 0}, 1},
                                                         {{0, 1}, 2},
                                                         {{0, 2}, 1},
                                                         {{1, -1}, 2},
                                                         {{1, 1}, 2}});
  CHECK(roots == want);
}

TEST_CASE("restricted roots of sl(3,R) in traceless coordinates") {
  const auto roots = sorted_roots(restricted_roots(make_space(SpaceKind::ai, 0, 3)));
  const std::vector<RestrictedRoot> want = sorted_roots({{{1, -1}, 1}, {{2, 1}, 1}, {{1, 2}, 1}});
  CHECK(roots == want);
  CHECK(format_root({{1, -1}, 1}) == "f1 - f2");
}

TEST_CASE("projections split g0") {
  const auto s = make_space(SpaceKind::cii, 2, 1);
  SplitMix64 rng(3);
  std::normal_distribution<double> normal;
  Cmat z(s.ambient_dim(), s.ambient_dim());
  for (int i = 0; i < z.rows(); ++i) {
    for (int j = 0; j < z.cols(); ++j) z(i, j) = Complex(normal(rng), normal(rng));
  }
  CHECK(s.g0_violation(z).has_value());
  CHECK_THROWS_AS(project_k(s, z), ValidationError);
  const Cmat x = s.project_to_g0(z);
  CHECK_FALSE(s.g0_violation(x).has_value());
  const Cmat k = project_k(s, x).value;
  const Cmat p = project_p(s, x).value;
  CHECK(frobenius_norm(k + p - x) < 1e-12 * frobenius_norm(x));
  CHECK_FALSE(s.k_violation(k).has_value());
  CHECK_FALSE(s.p_violation(p).has_value());
}

TEST_CASE("radial element and Gram matrix") {
  const auto s = make_space(SpaceKind::aiii, 3, 2);
  Rvec q(2);
  q << 2.0, 0.5;
  const Cmat h = s.radial_element(q);
  CHECK_FALSE(s.p_violation(h).has_value());
  CHECK(trace_form(h, h) == doctest::Approx(q.dot(s.radial_gram() * q)));
  CHECK(s.basis(Subspace::a).coordinates(h).norm() == doctest::Approx(std::sqrt(trace_form(h, h))));
}

TEST_CASE("shared bases are built once under concurrent access") {
  const auto s = make_space(SpaceKind::aii, 0, 3);
  std::vector<std::size_t> sizes(4);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] { sizes[static_cast<std::size_t>(t)] = s.basis(Subspace::zk_perp).size(); });
  }
  for (auto& t : pool) t.join();
  for (auto n : sizes) CHECK(n == sizes.front());
  CHECK(&s.basis(Subspace::p) == &basis_of(s, Subspace::p));
}
