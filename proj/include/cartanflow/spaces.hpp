#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartanflow/linalg.hpp"

namespace cartanflow {

/// The eight classical noncompact families handled by the library.
enum class SpaceKind {
  aiii,  // SU(m,n)/S(U(m)xU(n))
  bdi,   // SO(m,n)/S(O(m)xO(n))
  cii,   // Sp(m,n)/Sp(m)xSp(n), quaternionic m x n blocks
  ai,    // SL(n,R)/SO(n)
  aii,   // SL(n,H)/Sp(n)
  diii,  // SO*(2n)/U(n)
  ci,    // Sp(n,R)/U(n)
  a2,    // SL(n,C)/SU(n)
};

inline constexpr SpaceKind kAllKinds[] = {SpaceKind::aiii, SpaceKind::bdi, SpaceKind::cii,
                                          SpaceKind::ai,   SpaceKind::aii, SpaceKind::diii,
                                          SpaceKind::ci,   SpaceKind::a2};

std::string_view kind_name(SpaceKind kind);
/// Inverse of kind_name; throws ValidationError for unknown names.
SpaceKind parse_kind(std::string_view name);
bool is_two_parameter(SpaceKind kind);

/// Subspaces of g0 a matrix can be tagged with.
enum class Subspace { g, k, p, a, a_perp, m_centralizer, zk_perp };

std::string_view subspace_name(Subspace which);
Subspace parse_subspace(std::string_view name);

/// Dense matrix together with the subspace it claims to live in.
struct AlgebraElement {
  Cmat value;
  Subspace tag = Subspace::g;
};

/// Orthonormal basis under the Frobenius form, which is +trace_form on the
/// p side and -trace_form on the k side.
struct SubspaceBasis {
  Subspace which = Subspace::g;
  std::vector<Cmat> vectors;

  [[nodiscard]] std::size_t size() const { return vectors.size(); }
  [[nodiscard]] Rvec coordinates(const Cmat& x) const;
  [[nodiscard]] Cmat combine(const Rvec& coeffs) const;
  /// Orthogonal projection of x onto the span.
  [[nodiscard]] Cmat project(const Cmat& x) const;
};

/// Positive restricted root alpha(q) = sum_i coeffs[i] q_i, with the real
/// dimension it contributes to a_perp.
struct RestrictedRoot {
  std::vector<int> coeffs;
  int multiplicity = 0;

  [[nodiscard]] double evaluate(const Rvec& q) const;
  friend bool operator==(const RestrictedRoot&, const RestrictedRoot&) = default;
  friend auto operator<=>(const RestrictedRoot&, const RestrictedRoot&) = default;
};

std::string format_root(const RestrictedRoot& root);

namespace detail {
struct SpaceCache;
}

/// One symmetric space with its Cartan data. Cheap to copy; bases are built
/// once on first use and shared between copies.
class SymmetricSpace {
 public:
  SymmetricSpace(SpaceKind kind, int m, int n);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] int ambient_dim() const { return ambient_; }
  [[nodiscard]] int real_rank() const { return rank_; }
  [[nodiscard]] std::string label() const;

  /// Theoretical dimensions (checked against the constructed bases in tests).
  [[nodiscard]] int dim_p() const;
  [[nodiscard]] int dim_k() const;

  /// True when the Weyl group contains sign changes, so the chamber is
  /// q_1 >= ... >= q_r >= 0. Otherwise q holds the leading r entries of a
  /// traceless spectrum and the chamber orders the full spectrum.
  [[nodiscard]] bool sign_flip_weyl() const;

  /// Full spectrum-like vector whose descending order defines the chamber:
  /// q itself for sign-flip classes, (q, -sum q) for the traceless ones.
  [[nodiscard]] Rvec chamber_vector(const Rvec& q) const;

  /// H(q), the element of a with radial coordinates q (no validation beyond
  /// the length check).
  [[nodiscard]] Cmat radial_element(const Rvec& q) const;

  /// Gram matrix G_ij = trace_form(H(e_i), H(e_j)) of the radial coordinates.
  [[nodiscard]] const Rmat& radial_gram() const;

  /// Orthogonal projection of an arbitrary N x N complex matrix onto g0.
  [[nodiscard]] Cmat project_to_g0(const Cmat& x) const;
  [[nodiscard]] Cmat project_to_k(const Cmat& x) const;
  [[nodiscard]] Cmat project_to_p(const Cmat& x) const;

  /// Name of the first defining relation of g0 violated by x beyond
  /// tol * ||x||, or nullopt when x is in g0.
  [[nodiscard]] std::optional<std::string> g0_violation(const Cmat& x, double tol = 1e-10) const;
  /// Same for membership in p (g0 relations plus Hermiticity).
  [[nodiscard]] std::optional<std::string> p_violation(const Cmat& x, double tol = 1e-10) const;
  /// Same for membership in k (g0 relations plus anti-Hermiticity).
  [[nodiscard]] std::optional<std::string> k_violation(const Cmat& x, double tol = 1e-10) const;
  /// Group-level relations for an element of K (unitary, block structure,
  /// reality, J-relation, determinant).
  [[nodiscard]] std::optional<std::string> group_k_violation(const Cmat& k, double tol = 1e-9) const;

  [[nodiscard]] const SubspaceBasis& basis(Subspace which) const;

  /// Matrices of ad(H(e_i)) : zk_perp -> a_perp in the orthonormal bases,
  /// entry (a, b) = <a_perp_a, [zk_perp_b, H(e_i)]>.
  [[nodiscard]] const std::vector<Rmat>& ad_radial_tables() const;

 private:
  SpaceKind kind_;
  int m_;
  int n_;
  int ambient_;
  int rank_;
  std::shared_ptr<detail::SpaceCache> cache_;
};

/// Validated constructor; throws ValidationError on bad parameters.
SymmetricSpace make_space(SpaceKind kind, int m, int n);

/// Every (kind, m, n) with m, n <= limit that make_space accepts.
std::vector<SymmetricSpace> enumerate_spaces(int limit);

/// k-component of the Cartan splitting. Throws ValidationError when x is not
/// in g0, naming the violated relation.
AlgebraElement project_k(const SymmetricSpace& space, const Cmat& x);
/// p-component, computed as x - project_k(x).
AlgebraElement project_p(const SymmetricSpace& space, const Cmat& x);

const SubspaceBasis& basis_of(const SymmetricSpace& space, Subspace which);

/// Tabulated positive restricted roots with real multiplicities.
std::vector<RestrictedRoot> restricted_roots(const SymmetricSpace& space);

/// Roots recovered from the spectrum of A_q = ad(E) ad(q) on zk_perp. Throws
/// ConsistencyError when an eigenvalue branch is not an integer functional.
std::vector<RestrictedRoot> numeric_roots(const SymmetricSpace& space);

/// Sorted copy, for multiset comparisons.
std::vector<RestrictedRoot> sorted_roots(std::vector<RestrictedRoot> roots);

/// [[0, -I], [I, 0]] of size 2k.
Cmat symplectic_unit(int k);
/// [[0, I], [I, 0]] of size 2k.
Cmat swap_unit(int k);

/// The fixed generic direction e = (r, r-1, ..., 1) used for E = H(e).
Rvec generic_direction(const SymmetricSpace& space);

}  // namespace cartanflow
