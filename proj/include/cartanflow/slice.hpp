#pragma once

#include <optional>
#include <string>

#include "cartanflow/linalg.hpp"
#include "cartanflow/rng.hpp"
#include "cartanflow/spaces.hpp"

namespace cartanflow {

/// Chamber walls closer than this are treated as degenerate.
inline constexpr double kWallTolerance = 1e-8;

/// Linear coordinates (q, p, r) on a x a x a_perp.
struct SliceCoordinates {
  Rvec q;
  Rvec p;
  Cmat r;
};

/// X = k H(q) k^dagger.
struct RadialDecomposition {
  Rvec q;
  Cmat k;
};

struct ExactSliceResult {
  SliceCoordinates canonical;
  Cmat m_elem;
  /// False when a designated entry vanished and could not be normalized.
  bool generic = true;
  std::string note;
};

struct SliceCheck {
  bool ok = true;
  std::string diagnostic;
};

/// H(q); throws ContractViolation on a length mismatch.
AlgebraElement embed_radial(const SymmetricSpace& space, const Rvec& q);

/// min over positive roots of |alpha(q)|.
double min_root_value(const SymmetricSpace& space, const Rvec& q);

/// Whether q satisfies the chamber inequalities up to tol.
bool in_closed_chamber(const SymmetricSpace& space, const Rvec& q, double tol = 1e-12);

/// Radial coordinates and a K-element with X = k H(q) k^dagger. Throws
/// ValidationError when X is not in p.
RadialDecomposition radial_decompose(const SymmetricSpace& space, const Cmat& x);

/// a-coordinates of an element of p (inverse of embed_radial on a).
Rvec radial_coordinates(const SymmetricSpace& space, const Cmat& x);

/// Quaternionic eigendecomposition of a Hermitian 2n x 2n matrix with
/// A J = J conj(A). Columns i and n+i are (v_i, J conj(v_i)); values holds
/// the n pair eigenvalues in descending order.
HermitianEigen quaternionic_eigen(const Cmat& a);

/// Canonical form of s under M for aiii and bdi. Throws DegenerateError on a
/// chamber wall and Unsupported for other classes.
ExactSliceResult exact_slice_reduce(const SymmetricSpace& space, const SliceCoordinates& s);

SliceCheck slice_contains(const SymmetricSpace& space, const SliceCoordinates& s);

/// Number of real conditions the canonical pattern imposes (aiii only).
int exact_slice_constraint_count(const SymmetricSpace& space);

/// Dimension of the M-orbit through a random element of a_perp, from the
/// rank of zeta -> [zeta, r] on the centralizer basis.
int generic_m_orbit_dimension(const SymmetricSpace& space, std::uint64_t seed);

/// exp(xi) for xi in k (or any anti-Hermitian matrix).
Cmat exp_k(const Cmat& xi);

/// Random element of the identity component of K.
Cmat random_k(const SymmetricSpace& space, SplitMix64& rng, double scale = 1.0);

/// Standard Gaussian element of p (coefficients over the orthonormal basis).
Cmat random_p(const SymmetricSpace& space, SplitMix64& rng);

/// Random element of a_perp.
Cmat random_a_perp(const SymmetricSpace& space, SplitMix64& rng);

/// Random point of the open chamber, distributed like the sorted spectrum of
/// a Gaussian vector.
Rvec random_chamber_point(const SymmetricSpace& space, SplitMix64& rng);

}  // namespace cartanflow
