#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cartanflow/linalg.hpp"
#include "cartanflow/slice.hpp"
#include "cartanflow/spaces.hpp"

namespace cartanflow {

/// (q, p, l) with l = [r, H(q)] in zk_perp.
struct ReducedState {
  Rvec q;
  Rvec p;
  Cmat l;
};

/// ad(E) o ad(H(q)) on zk_perp in its orthonormal basis.
struct AqOperator {
  Rmat matrix;
  Rvec q;
  Rvec e;
};

/// [X2, X1]; both arguments must lie in p.
AlgebraElement moment_map(const SymmetricSpace& space, const Cmat& x1, const Cmat& x2);

/// l = [r, H(q)].
AlgebraElement l_from_slice(const SymmetricSpace& space, const SliceCoordinates& s);

/// Matrix T(q) of xi -> [xi, H(q)] from zk_perp to a_perp (orthonormal bases).
Rmat ad_radial_matrix(const SymmetricSpace& space, const Rvec& q);

/// Inverse of r -> [r, H(q)] on a_perp. Throws DegenerateError when some
/// |alpha(q)| <= kWallTolerance and ValidationError when l has a component
/// outside zk_perp.
AlgebraElement r_from_l(const SymmetricSpace& space, const Rvec& q, const Cmat& l);

AqOperator a_q_matrix(const SymmetricSpace& space, const Rvec& q);

/// |det T(q)|.
double jacobian_density(const SymmetricSpace& space, const Rvec& q);

/// prod over positive roots of |alpha(q)|^mult for the given table.
double root_product_density(const std::vector<RestrictedRoot>& roots, const Rvec& q);

/// Closed radial density: the classical formulas for aiii and bdi, the root
/// product for the remaining classes.
double closed_form_density(const SymmetricSpace& space, const Rvec& q);

struct RatioSpread {
  double reference = 0.0;
  double max_relative_deviation = 0.0;
};

/// jacobian_density / closed over `samples` random chamber points, against
/// the value at the generic direction.
RatioSpread density_ratio_spread(const SymmetricSpace& space,
                                 const std::function<double(const Rvec&)>& closed, int samples,
                                 std::uint64_t seed);

/// The q-independent constant jacobian_density / closed_form_density,
/// verified over 100 random chamber points (relative 1e-8). Throws
/// ConsistencyError when the ratio is not constant. Memoized per space.
double density_constant(const SymmetricSpace& space);

/// Slice coordinates and K-element of a phase point (X, Y) in p x p:
/// X = k H(q) k^dagger, k^dagger Y k = H(p) + r.
struct PhaseReduction {
  SliceCoordinates slice;
  Cmat k;
};
PhaseReduction reduce_phase_point(const SymmetricSpace& space, const Cmat& x, const Cmat& y);

ReducedState reduced_state_from_slice(const SymmetricSpace& space, const SliceCoordinates& s);

}  // namespace cartanflow
