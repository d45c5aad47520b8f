#include "cartanflow/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "cartanflow/errors.hpp"

namespace cartanflow {

AlgebraElement moment_map(const SymmetricSpace& space, const Cmat& x1, const Cmat& x2) {
  if (auto v = space.p_violation(x1)) throw ValidationError("moment_map: X1 not in p (" + *v + ")");
  if (auto v = space.p_violation(x2)) throw ValidationError("moment_map: X2 not in p (" + *v + ")");
  return {commutator(x2, x1), Subspace::k};
}

AlgebraElement l_from_slice(const SymmetricSpace& space, const SliceCoordinates& s) {
  return {commutator(s.r, space.radial_element(s.q)), Subspace::zk_perp};
}

Rmat ad_radial_matrix(const SymmetricSpace& space, const Rvec& q) {
  if (q.size() != space.real_rank()) throw ContractViolation("ad_radial_matrix: q length");
  const auto& tables = space.ad_radial_tables();
  const Eigen::Index d = static_cast<Eigen::Index>(space.basis(Subspace::zk_perp).size());
  Rmat t = Rmat::Zero(d, d);
  for (int i = 0; i < space.real_rank(); ++i) t += q(i) * tables[static_cast<std::size_t>(i)];
  return t;
}

AlgebraElement r_from_l(const SymmetricSpace& space, const Rvec& q, const Cmat& l) {
  if (min_root_value(space, q) <= kWallTolerance) {
    throw DegenerateError("r_from_l: q lies on a chamber wall, ad(H(q)) is singular");
  }
  const auto& zk_perp = space.basis(Subspace::zk_perp);
  const auto& a_perp = space.basis(Subspace::a_perp);
  const int dim = space.ambient_dim();
  if (zk_perp.size() == 0) return {Cmat::Zero(dim, dim), Subspace::a_perp};
  const Rvec lc = zk_perp.coordinates(l);
  if ((l - zk_perp.combine(lc)).norm() > scaled_tolerance(1e-9, l.norm())) {
    throw ValidationError("r_from_l: l has a component outside zk_perp");
  }
  const Rmat t = ad_radial_matrix(space, q);
  const Rvec rc = t.transpose().partialPivLu().solve(lc);
  return {a_perp.combine(rc), Subspace::a_perp};
}

AqOperator a_q_matrix(const SymmetricSpace& space, const Rvec& q) {
  const Rvec e = generic_direction(space);
  return {ad_radial_matrix(space, e).transpose() * ad_radial_matrix(space, q), q, e};
}

double jacobian_density(const SymmetricSpace& space, const Rvec& q) {
  return abs_determinant(ad_radial_matrix(space, q));
}

double root_product_density(const std::vector<RestrictedRoot>& roots, const Rvec& q) {
  double out = 1.0;
  for (const auto& root : roots) out *= std::pow(std::abs(root.evaluate(q)), root.multiplicity);
  return out;
}

double closed_form_density(const SymmetricSpace& space, const Rvec& q) {
  if (q.size() != space.real_rank()) throw ContractViolation("closed_form_density: q length");
  const int n = space.n();
  const int d = space.m() - space.n();
  switch (space.kind()) {
    case SpaceKind::aiii: {
      double out = 1.0;
      for (int i = 0; i < n; ++i) out *= std::pow(std::abs(q(i)), 2 * d + 1);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double v = q(i) * q(i) - q(j) * q(j);
          out *= v * v;
        }
      }
      return out;
    }
    case SpaceKind::bdi: {
      double out = 1.0;
      for (int i = 0; i < n; ++i) out *= std::pow(std::abs(q(i)), d);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) out *= std::abs(q(i) * q(i) - q(j) * q(j));
      }
      return out;
    }
    default:
      return root_product_density(restricted_roots(space), q);
  }
}

RatioSpread density_ratio_spread(const SymmetricSpace& space,
                                 const std::function<double(const Rvec&)>& closed, int samples,
                                 std::uint64_t seed) {
  const Rvec e = generic_direction(space);
  RatioSpread out;
  out.reference = jacobian_density(space, e) / closed(e);
  SplitMix64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Rvec q = random_chamber_point(space, rng);
    const double ratio = jacobian_density(space, q) / closed(q);
    const double dev = std::abs(ratio / out.reference - 1.0);
    out.max_relative_deviation = std::max(out.max_relative_deviation, std::isfinite(dev) ? dev : 1.0);
  }
  return out;
}

double density_constant(const SymmetricSpace& space) {
  static std::mutex guard;
  static std::map<std::tuple<int, int, int>, double> memo;
  const auto key = std::make_tuple(static_cast<int>(space.kind()), space.m(), space.n());
  {
    std::lock_guard lock(guard);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const auto spread = density_ratio_spread(
      space, [&](const Rvec& q) { return closed_form_density(space, q); }, 100, 0x5eed0fc0ffeeULL);
  if (!(spread.max_relative_deviation <= 1e-8) || !(spread.reference > 0)) {
    throw ConsistencyError(space.label() + ": jacobian/closed density ratio is not constant (max " +
                           "relative deviation " + std::to_string(spread.max_relative_deviation) +
                           ")");
  }
  std::lock_guard lock(guard);
  memo.emplace(key, spread.reference);
  return spread.reference;
}

PhaseReduction reduce_phase_point(const SymmetricSpace& space, const Cmat& x, const Cmat& y) {
  if (auto v = space.p_violation(y)) throw ValidationError("momentum is not in p (" + *v + ")");
  const auto rd = radial_decompose(space, x);
  const Cmat yk = rd.k.adjoint() * y * rd.k;
  const auto& a_perp = space.basis(Subspace::a_perp);
  const int dim = space.ambient_dim();
  const Cmat r = a_perp.size() == 0 ? Cmat::Zero(dim, dim) : a_perp.project(yk);
  return {{rd.q, radial_coordinates(space, yk), r}, rd.k};
}

ReducedState reduced_state_from_slice(const SymmetricSpace& space, const SliceCoordinates& s) {
  return {s.q, s.p, l_from_slice(space, s).value};
}

std::vector<RestrictedRoot> numeric_roots(const SymmetricSpace& space) {
  static constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int r = space.real_rank();
  if (r > static_cast<int>(std::size(kPrimes))) throw Unsupported("numeric_roots: rank too large");
  Rvec probe(r);
  for (int i = 0; i < r; ++i) probe(i) = std::sqrt(kPrimes[i]);
  const Rvec e = generic_direction(space);
  const Rmat te = ad_radial_matrix(space, e);
  const Rmat a = te.transpose() * ad_radial_matrix(space, probe);
  const Rmat sym = 0.5 * (a + a.transpose());
  std::vector<RestrictedRoot> out;
  if (sym.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Rmat> solver(sym);
  const Rvec& vals = solver.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  const auto& tables = space.ad_radial_tables();

  Eigen::Index start = 0;
  while (start < vals.size()) {
    Eigen::Index stop = start + 1;
    while (stop < vals.size() && vals(stop) - vals(stop - 1) <= 1e-7 * scale) ++stop;
    const Rmat vc = solver.eigenvectors().middleCols(start, stop - start);
    const double size = static_cast<double>(stop - start);
    Rvec val(r);
    for (int i = 0; i < r; ++i) {
      val(i) = (vc.transpose() * te.transpose() * tables[static_cast<std::size_t>(i)] * vc).trace() /
               size;
    }
    const double alpha_e_sq = e.dot(val);
    if (!(alpha_e_sq > 1e-12)) {
      throw ConsistencyError(space.label() + ": eigenvalue branch with alpha(E) = 0");
    }
    const double alpha_e = std::sqrt(alpha_e_sq);
    RestrictedRoot root;
    root.multiplicity = static_cast<int>(stop - start);
    for (int i = 0; i < r; ++i) {
      const double c = val(i) / alpha_e;
      const double rounded = std::round(c);
      if (std::abs(c - rounded) > 1e-6) {
        throw ConsistencyError(space.label() + ": eigenvalue branch is not an integer functional "
                               "(coefficient " + std::to_string(c) + ")");
      }
      root.coeffs.push_back(static_cast<int>(rounded));
    }
    out.push_back(std::move(root));
    start = stop;
  }
  return sorted_roots(std::move(out));
}

}  // namespace cartanflow
