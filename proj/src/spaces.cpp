#include "cartanflow/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <utility>

#include "cartanflow/errors.hpp"

namespace cartanflow {

namespace detail {

struct SpaceCache {
  Rmat gram;

  std::once_flag bases_once;
  SubspaceBasis k, p, a, a_perp, zk, zk_perp;

  std::once_flag tables_once;
  std::vector<Rmat> ad_tables;
};

}  // namespace detail

namespace {

using RelationList = std::vector<std::pair<std::string, double>>;

// diag(I_a, -I_b).
Cmat indefinite_unit(int a, int b) {
  Cmat d = Cmat::Identity(a + b, a + b);
  for (int i = a; i < a + b; ++i) d(i, i) = -1.0;
  return d;
}

// J acting blockwise on C^{2m} + C^{2n}, as used for the quaternionic
// unitary groups.
Cmat split_symplectic_unit(int m, int n) {
  Cmat j = Cmat::Zero(2 * m + 2 * n, 2 * m + 2 * n);
  j.topLeftCorner(2 * m, 2 * m) = symplectic_unit(m);
  j.bottomRightCorner(2 * n, 2 * n) = symplectic_unit(n);
  return j;
}

// Modified Gram-Schmidt with one reorthogonalization pass. Candidates whose
// residual norm drops below `drop` are discarded.
std::vector<Cmat> orthonormalize(const std::vector<Cmat>& candidates, double drop = 1e-7,
                                 std::vector<Cmat> seed = {}) {
  std::vector<Cmat> out = std::move(seed);
  const std::size_t seeded = out.size();
  for (const Cmat& c : candidates) {
    const double scale = c.norm();
    if (scale <= kToleranceFloor) continue;
    Cmat v = c;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Cmat& b : out) v -= frobenius_inner(b, v) * b;
    }
    const double nv = v.norm();
    if (nv > drop * std::max(1.0, scale)) out.push_back(v / nv);
  }
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(seeded));
  return out;
}

std::vector<Cmat> elementary_spanning_set(int n) {
  std::vector<Cmat> out;
  out.reserve(static_cast<std::size_t>(2 * n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Cmat e = Cmat::Zero(n, n);
      e(i, j) = 1.0;
      out.push_back(e);
      e(i, j) = Complex(0.0, 1.0);
      out.push_back(e);
    }
  }
  return out;
}

Cmat remove_trace(const Cmat& x) {
  const Complex t = x.trace() / static_cast<double>(x.rows());
  Cmat y = x;
  y.diagonal().array() -= t;
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names

std::string_view kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::aiii: return "aiii";
    case SpaceKind::bdi: return "bdi";
    case SpaceKind::cii: return "cii";
    case SpaceKind::ai: return "ai";
    case SpaceKind::aii: return "aii";
    case SpaceKind::diii: return "diii";
    case SpaceKind::ci: return "ci";
    case SpaceKind::a2: return "a2";
  }
  return "?";
}

SpaceKind parse_kind(std::string_view name) {
  for (SpaceKind k : kAllKinds) {
    if (kind_name(k) == name) return k;
  }
  throw ValidationError("unknown symmetric space class '" + std::string(name) + "'");
}

bool is_two_parameter(SpaceKind kind) {
  return kind == SpaceKind::aiii || kind == SpaceKind::bdi || kind == SpaceKind::cii;
}

std::string_view subspace_name(Subspace which) {
  switch (which) {
    case Subspace::g: return "g";
    case Subspace::k: return "k";
    case Subspace::p: return "p";
    case Subspace::a: return "a";
    case Subspace::a_perp: return "a_perp";
    case Subspace::m_centralizer: return "m_centralizer";
    case Subspace::zk_perp: return "zk_perp";
  }
  return "?";
}

Subspace parse_subspace(std::string_view name) {
  for (Subspace s : {Subspace::g, Subspace::k, Subspace::p, Subspace::a, Subspace::a_perp,
                     Subspace::m_centralizer, Subspace::zk_perp}) {
    if (subspace_name(s) == name) return s;
  }
  throw ValidationError("unknown subspace selector '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// SubspaceBasis / RestrictedRoot

Rvec SubspaceBasis::coordinates(const Cmat& x) const {
  Rvec c(static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    c(static_cast<Eigen::Index>(i)) = frobenius_inner(vectors[i], x);
  }
  return c;
}

Cmat SubspaceBasis::combine(const Rvec& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != vectors.size()) {
    throw ContractViolation("SubspaceBasis::combine: coefficient count mismatch");
  }
  if (vectors.empty()) throw ContractViolation("SubspaceBasis::combine: empty basis");
  Cmat out = Cmat::Zero(vectors.front().rows(), vectors.front().cols());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    out += coeffs(static_cast<Eigen::Index>(i)) * vectors[i];
  }
  return out;
}

Cmat SubspaceBasis::project(const Cmat& x) const {
  Cmat out = Cmat::Zero(x.rows(), x.cols());
  for (const Cmat& b : vectors) out += frobenius_inner(b, x) * b;
  return out;
}

double RestrictedRoot::evaluate(const Rvec& q) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    acc += coeffs[i] * q(static_cast<Eigen::Index>(i));
  }
  return acc;
}

std::string format_root(const RestrictedRoot& root) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < root.coeffs.size(); ++i) {
    const int c = root.coeffs[i];
    if (c == 0) continue;
    if (c < 0) {
      os << (first ? "-" : " - ");
    } else if (!first) {
      os << " + ";
    }
    if (std::abs(c) != 1) os << std::abs(c);
    os << "f" << (i + 1);
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::vector<RestrictedRoot> sorted_roots(std::vector<RestrictedRoot> roots) {
  std::sort(roots.begin(), roots.end());
  return roots;
}

// ---------------------------------------------------------------------------
// SymmetricSpace

SymmetricSpace::SymmetricSpace(SpaceKind kind, int m, int n)
    : kind_(kind), m_(is_two_parameter(kind) ? m : 0), n_(n),
      cache_(std::make_shared<detail::SpaceCache>()) {
  switch (kind) {
    case SpaceKind::aiii:
    case SpaceKind::bdi:
      ambient_ = m_ + n_;
      rank_ = n_;
      break;
    case SpaceKind::cii:
      ambient_ = 2 * m_ + 2 * n_;
      rank_ = n_;
      break;
    case SpaceKind::ai:
    case SpaceKind::a2:
      ambient_ = n_;
      rank_ = n_ - 1;
      break;
    case SpaceKind::aii:
      ambient_ = 2 * n_;
      rank_ = n_ - 1;
      break;
    case SpaceKind::diii:
      ambient_ = 2 * n_;
      rank_ = n_ / 2;
      break;
    case SpaceKind::ci:
      ambient_ = 2 * n_;
      rank_ = n_;
      break;
  }
  cache_->gram.resize(rank_, rank_);
  std::vector<Cmat> units;
  for (int i = 0; i < rank_; ++i) units.push_back(radial_element(Rvec::Unit(rank_, i)));
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < rank_; ++j) cache_->gram(i, j) = trace_form(units[i], units[j]);
  }
}

std::string SymmetricSpace::label() const {
  std::ostringstream os;
  os << kind_name(kind_) << "(";
  if (is_two_parameter(kind_)) os << m_ << ",";
  os << n_ << ")";
  return os.str();
}

int SymmetricSpace::dim_p() const {
  const int m = m_, n = n_;
  switch (kind_) {
    case SpaceKind::aiii: return 2 * m * n;
    case SpaceKind::bdi: return m * n;
    case SpaceKind::cii: return 4 * m * n;
    case SpaceKind::ai: return n * (n + 1) / 2 - 1;
    case SpaceKind::aii: return 2 * n * n - n - 1;
    case SpaceKind::diii: return n * (n - 1);
    case SpaceKind::ci: return n * (n + 1);
    case SpaceKind::a2: return n * n - 1;
  }
  return 0;
}

int SymmetricSpace::dim_k() const {
  const int m = m_, n = n_;
  switch (kind_) {
    case SpaceKind::aiii: return m * m + n * n - 1;
    case SpaceKind::bdi: return m * (m - 1) / 2 + n * (n - 1) / 2;
    case SpaceKind::cii: return m * (2 * m + 1) + n * (2 * n + 1);
    case SpaceKind::ai: return n * (n - 1) / 2;
    case SpaceKind::aii: return n * (2 * n + 1);
    case SpaceKind::diii: return n * n;
    case SpaceKind::ci: return n * n;
    case SpaceKind::a2: return n * n - 1;
  }
  return 0;
}

bool SymmetricSpace::sign_flip_weyl() const {
  return !(kind_ == SpaceKind::ai || kind_ == SpaceKind::aii || kind_ == SpaceKind::a2);
}

Rvec SymmetricSpace::chamber_vector(const Rvec& q) const {
  if (q.size() != rank_) throw ContractViolation("chamber_vector: q has wrong length");
  if (sign_flip_weyl()) return q;
  Rvec full(rank_ + 1);
  full.head(rank_) = q;
  full(rank_) = -q.sum();
  return full;
}

Cmat SymmetricSpace::radial_element(const Rvec& q) const {
  if (q.size() != rank_) {
    throw ContractViolation("radial element: q has length " + std::to_string(q.size()) +
                            ", real rank is " + std::to_string(rank_));
  }
  const int nn = ambient_;
  Cmat h = Cmat::Zero(nn, nn);
  switch (kind_) {
    case SpaceKind::aiii:
    case SpaceKind::bdi:
      // B block: a_i sits in row m-1-i, column i (a_1 in the lower-left corner).
      for (int i = 0; i < rank_; ++i) {
        h(m_ - 1 - i, m_ + i) = q(i);
        h(m_ + i, m_ - 1 - i) = q(i);
      }
      break;
    case SpaceKind::cii: {
      // Quaternionic B = [[P, 0], [0, P]] with P the su(m,n) pattern; each
      // radial coordinate therefore appears twice (a_i = a_{i+n}).
      const int rows = 2 * m_;
      for (int i = 0; i < rank_; ++i) {
        const int r1 = m_ - 1 - i, c1 = i;
        const int r2 = 2 * m_ - 1 - i, c2 = n_ + i;
        h(r1, rows + c1) = q(i);
        h(rows + c1, r1) = q(i);
        h(r2, rows + c2) = q(i);
        h(rows + c2, r2) = q(i);
      }
      break;
    }
    case SpaceKind::ai:
    case SpaceKind::a2: {
      const Rvec d = chamber_vector(q);
      for (int i = 0; i < n_; ++i) h(i, i) = d(i);
      break;
    }
    case SpaceKind::aii: {
      const Rvec d = chamber_vector(q);
      for (int i = 0; i < n_; ++i) {
        h(i, i) = d(i);
        h(n_ + i, n_ + i) = d(i);
      }
      break;
    }
    case SpaceKind::diii:
      // Z = blockdiag([[0, q_i], [-q_i, 0]]) skew-symmetric, X = [[0, Z], [Z^dagger, 0]].
      for (int i = 0; i < rank_; ++i) {
        h(2 * i, n_ + 2 * i + 1) = q(i);
        h(2 * i + 1, n_ + 2 * i) = -q(i);
        h(n_ + 2 * i + 1, 2 * i) = q(i);
        h(n_ + 2 * i, 2 * i + 1) = -q(i);
      }
      break;
    case SpaceKind::ci:
      for (int i = 0; i < rank_; ++i) {
        h(i, n_ + i) = q(i);
        h(n_ + i, i) = q(i);
      }
      break;
  }
  return h;
}

const Rmat& SymmetricSpace::radial_gram() const { return cache_->gram; }

Cmat SymmetricSpace::project_to_g0(const Cmat& x) const {
  return project_to_k(x) + project_to_p(x);
}

namespace {

// Orthogonal projection onto the fixed points of the class's structural
// involutions (everything except the Cartan involution). The involutions
// commute pairwise, so applying their averages once is exact.
Cmat structural_average(SpaceKind kind, int m, int n, const Cmat& x) {
  Cmat y = x;
  switch (kind) {
    case SpaceKind::aiii: {
      const Cmat i_mn = indefinite_unit(m, n);
      y = 0.5 * (y - i_mn * y.adjoint() * i_mn);
      y = remove_trace(y);
      break;
    }
    case SpaceKind::bdi: {
      const Cmat i_mn = indefinite_unit(m, n);
      y = 0.5 * (y - i_mn * y.adjoint() * i_mn);
      y = y.real().cast<Complex>();
      y = remove_trace(y);
      break;
    }
    case SpaceKind::cii: {
      const Cmat i_mn = indefinite_unit(2 * m, 2 * n);
      const Cmat j = split_symplectic_unit(m, n);
      y = 0.5 * (y - i_mn * y.adjoint() * i_mn);
      y = 0.5 * (y + j * y.conjugate() * j.transpose());
      y = remove_trace(y);
      break;
    }
    case SpaceKind::ai:
      y = y.real().cast<Complex>();
      y = remove_trace(y);
      break;
    case SpaceKind::aii: {
      const Cmat j = symplectic_unit(n);
      y = 0.5 * (y + j * y.conjugate() * j.transpose());
      y = remove_trace(y);
      break;
    }
    case SpaceKind::diii: {
      const Cmat j = symplectic_unit(n);
      const Cmat s = swap_unit(n);
      y = 0.5 * (y + j * y.conjugate() * j.transpose());
      y = 0.5 * (y - s * y.transpose() * s);
      break;
    }
    case SpaceKind::ci: {
      const Cmat j = symplectic_unit(n);
      const Cmat s = swap_unit(n);
      y = 0.5 * (y + s * y.conjugate() * s);
      y = 0.5 * (y + j * y.transpose() * j);
      break;
    }
    case SpaceKind::a2:
      y = remove_trace(y);
      break;
  }
  return y;
}

}  // namespace

Cmat SymmetricSpace::project_to_k(const Cmat& x) const {
  if (x.rows() != ambient_ || x.cols() != ambient_) {
    throw ContractViolation("project_to_k: expected " + std::to_string(ambient_) + "x" +
                            std::to_string(ambient_) + " matrix");
  }
  return structural_average(kind_, m_, n_, 0.5 * (x - x.adjoint()));
}

Cmat SymmetricSpace::project_to_p(const Cmat& x) const {
  if (x.rows() != ambient_ || x.cols() != ambient_) {
    throw ContractViolation("project_to_p: expected " + std::to_string(ambient_) + "x" +
                            std::to_string(ambient_) + " matrix");
  }
  return structural_average(kind_, m_, n_, 0.5 * (x + x.adjoint()));
}

std::optional<std::string> SymmetricSpace::g0_violation(const Cmat& x, double tol) const {
  if (x.rows() != ambient_ || x.cols() != ambient_) {
    return "shape: expected " + std::to_string(ambient_) + "x" + std::to_string(ambient_);
  }
  RelationList rel;
  switch (kind_) {
    case SpaceKind::aiii: {
      const Cmat i_mn = indefinite_unit(m_, n_);
      rel.emplace_back("X^dagger I_mn + I_mn X = 0", (x.adjoint() * i_mn + i_mn * x).norm());
      rel.emplace_back("tr X = 0", std::abs(x.trace()));
      break;
    }
    case SpaceKind::bdi: {
      const Cmat i_mn = indefinite_unit(m_, n_);
      rel.emplace_back("X real", x.imag().norm());
      rel.emplace_back("X^T I_mn + I_mn X = 0", (x.adjoint() * i_mn + i_mn * x).norm());
      break;
    }
    case SpaceKind::cii: {
      const Cmat i_mn = indefinite_unit(2 * m_, 2 * n_);
      const Cmat j = split_symplectic_unit(m_, n_);
      rel.emplace_back("X^dagger I_mn + I_mn X = 0", (x.adjoint() * i_mn + i_mn * x).norm());
      rel.emplace_back("X J = J conj(X)", (x * j - j * x.conjugate()).norm());
      rel.emplace_back("tr X = 0", std::abs(x.trace()));
      break;
    }
    case SpaceKind::ai:
      rel.emplace_back("X real", x.imag().norm());
      rel.emplace_back("tr X = 0", std::abs(x.trace()));
      break;
    case SpaceKind::aii: {
      const Cmat j = symplectic_unit(n_);
      rel.emplace_back("X J = J conj(X)", (x * j - j * x.conjugate()).norm());
      rel.emplace_back("tr X = 0", std::abs(x.trace()));
      break;
    }
    case SpaceKind::diii: {
      const Cmat j = symplectic_unit(n_);
      const Cmat s = swap_unit(n_);
      rel.emplace_back("X J = J conj(X)", (x * j - j * x.conjugate()).norm());
      rel.emplace_back("X^T S + S X = 0", (x.transpose() * s + s * x).norm());
      break;
    }
    case SpaceKind::ci: {
      const Cmat j = symplectic_unit(n_);
      const Cmat s = swap_unit(n_);
      rel.emplace_back("X = S conj(X) S", (x - s * x.conjugate() * s).norm());
      rel.emplace_back("X^T J + J X = 0", (x.transpose() * j + j * x).norm());
      break;
    }
    case SpaceKind::a2:
      rel.emplace_back("tr X = 0", std::abs(x.trace()));
      break;
  }
  const double bound = scaled_tolerance(tol, x.norm());
  for (const auto& [name, residual] : rel) {
    if (!(residual <= bound)) return name;
  }
  return std::nullopt;
}

std::optional<std::string> SymmetricSpace::p_violation(const Cmat& x, double tol) const {
  if (auto v = g0_violation(x, tol)) return v;
  if ((x - x.adjoint()).norm() > scaled_tolerance(tol, x.norm())) return std::string("X Hermitian");
  return std::nullopt;
}

std::optional<std::string> SymmetricSpace::k_violation(const Cmat& x, double tol) const {
  if (auto v = g0_violation(x, tol)) return v;
  if ((x + x.adjoint()).norm() > scaled_tolerance(tol, x.norm())) {
    return std::string("X anti-Hermitian");
  }
  return std::nullopt;
}

std::optional<std::string> SymmetricSpace::group_k_violation(const Cmat& k, double tol) const {
  if (k.rows() != ambient_ || k.cols() != ambient_) return std::string("shape");
  const Cmat id = Cmat::Identity(ambient_, ambient_);
  if ((k.adjoint() * k - id).norm() > tol * ambient_) return std::string("k unitary");
  auto off_blocks = [&](int a) {
    return k.topRightCorner(a, ambient_ - a).norm() + k.bottomLeftCorner(ambient_ - a, a).norm();
  };
  auto det_defect = [&]() { return std::abs(k.determinant() - 1.0); };
  switch (kind_) {
    case SpaceKind::aiii:
      if (off_blocks(m_) > tol) return std::string("k block diagonal");
      if (det_defect() > tol) return std::string("det k = 1");
      break;
    case SpaceKind::bdi:
      if (off_blocks(m_) > tol) return std::string("k block diagonal");
      if (k.imag().norm() > tol) return std::string("k real");
      // S(O(m) x O(n)); for m == n the sign cannot always be absorbed into M.
      if (m_ > n_ && det_defect() > tol) return std::string("det k = 1");
      break;
    case SpaceKind::cii: {
      const Cmat j = split_symplectic_unit(m_, n_);
      if (off_blocks(2 * m_) > tol) return std::string("k block diagonal");
      if ((k * j - j * k.conjugate()).norm() > tol) return std::string("k J = J conj(k)");
      break;
    }
    case SpaceKind::ai:
      if (k.imag().norm() > tol) return std::string("k real");
      if (det_defect() > tol) return std::string("det k = 1");
      break;
    case SpaceKind::aii: {
      const Cmat j = symplectic_unit(n_);
      if ((k * j - j * k.conjugate()).norm() > tol) return std::string("k J = J conj(k)");
      break;
    }
    case SpaceKind::diii: {
      const Cmat j = symplectic_unit(n_);
      const Cmat s = swap_unit(n_);
      if ((k * j - j * k.conjugate()).norm() > tol) return std::string("k J = J conj(k)");
      if ((k.transpose() * s * k - s).norm() > tol) return std::string("k^T S k = S");
      break;
    }
    case SpaceKind::ci: {
      const Cmat j = symplectic_unit(n_);
      const Cmat s = swap_unit(n_);
      if ((k - s * k.conjugate() * s).norm() > tol) return std::string("k = S conj(k) S");
      if ((k.transpose() * j * k - j).norm() > tol) return std::string("k^T J k = J");
      break;
    }
    case SpaceKind::a2:
      if (det_defect() > tol) return std::string("det k = 1");
      break;
  }
  return std::nullopt;
}

const SubspaceBasis& SymmetricSpace::basis(Subspace which) const {
  std::call_once(cache_->bases_once, [this] {
    auto& c = *cache_;
    const auto units = elementary_spanning_set(ambient_);
    std::vector<Cmat> k_span, p_span;
    k_span.reserve(units.size());
    p_span.reserve(units.size());
    for (const Cmat& e : units) {
      k_span.push_back(project_to_k(e));
      p_span.push_back(project_to_p(e));
    }
    c.k = {Subspace::k, orthonormalize(k_span)};
    c.p = {Subspace::p, orthonormalize(p_span)};

    std::vector<Cmat> a_span;
    for (int i = 0; i < rank_; ++i) a_span.push_back(radial_element(Rvec::Unit(rank_, i)));
    c.a = {Subspace::a, orthonormalize(a_span)};

    std::vector<Cmat> perp_span;
    for (const Cmat& b : c.p.vectors) perp_span.push_back(b - c.a.project(b));
    c.a_perp = {Subspace::a_perp, orthonormalize(perp_span)};

    // z_k(a) = kernel of xi -> ([xi, a_1], ..., [xi, a_r]) on k, in k-coordinates.
    const auto dk = static_cast<Eigen::Index>(c.k.size());
    const auto dp = static_cast<Eigen::Index>(c.p.size());
    Rmat ad(static_cast<Eigen::Index>(rank_) * dp, dk);
    for (Eigen::Index j = 0; j < dk; ++j) {
      for (int i = 0; i < rank_; ++i) {
        ad.block(i * dp, j, dp, 1) =
            c.p.coordinates(commutator(c.k.vectors[static_cast<std::size_t>(j)], c.a.vectors[i]));
      }
    }
    Rmat kernel_projector = Rmat::Identity(dk, dk);
    if (dk > 0 && ad.rows() > 0) {
      Eigen::JacobiSVD<Rmat> solver(ad, Eigen::ComputeFullV);
      const Rvec& sv = solver.singularValues();
      const double top = sv.size() > 0 ? sv(0) : 0.0;
      Eigen::Index rank_ad = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-9 * std::max(1.0, top)) ++rank_ad;
      }
      const Rmat row_space = solver.matrixV().leftCols(rank_ad);
      kernel_projector -= row_space * row_space.transpose();
    }
    std::vector<Cmat> zk_span, zk_perp_span;
    for (Eigen::Index j = 0; j < dk; ++j) {
      const Rvec e = Rvec::Unit(dk, j);
      zk_span.push_back(c.k.combine(kernel_projector * e));
      zk_perp_span.push_back(c.k.combine(e - kernel_projector * e));
    }
    c.zk = {Subspace::m_centralizer, orthonormalize(zk_span)};
    c.zk_perp = {Subspace::zk_perp, orthonormalize(zk_perp_span)};

    const auto expect = [&](const SubspaceBasis& b, int dim, const char* what) {
      if (static_cast<int>(b.size()) != dim) {
        throw ConsistencyError(label() + ": basis of " + what + " has dimension " +
                               std::to_string(b.size()) + ", expected " + std::to_string(dim));
      }
    };
    expect(c.k, dim_k(), "k");
    expect(c.p, dim_p(), "p");
    expect(c.a, rank_, "a");
    expect(c.a_perp, dim_p() - rank_, "a_perp");
    expect(c.zk_perp, dim_p() - rank_, "zk_perp");
    expect(c.zk, dim_k() - dim_p() + rank_, "m_centralizer");
  });
  switch (which) {
    case Subspace::k: return cache_->k;
    case Subspace::p: return cache_->p;
    case Subspace::a: return cache_->a;
    case Subspace::a_perp: return cache_->a_perp;
    case Subspace::m_centralizer: return cache_->zk;
    case Subspace::zk_perp: return cache_->zk_perp;
    case Subspace::g: break;
  }
  throw ContractViolation("basis: selector 'g' has no stored basis; use k and p");
}

const std::vector<Rmat>& SymmetricSpace::ad_radial_tables() const {
  std::call_once(cache_->tables_once, [this] {
    const auto& zk_perp = basis(Subspace::zk_perp);
    const auto& a_perp = basis(Subspace::a_perp);
    const auto d = static_cast<Eigen::Index>(zk_perp.size());
    std::vector<Rmat> tables;
    for (int i = 0; i < rank_; ++i) {
      const Cmat h = radial_element(Rvec::Unit(rank_, i));
      Rmat t(d, d);
      for (Eigen::Index b = 0; b < d; ++b) {
        t.col(b) = a_perp.coordinates(commutator(zk_perp.vectors[static_cast<std::size_t>(b)], h));
      }
      tables.push_back(std::move(t));
    }
    cache_->ad_tables = std::move(tables);
  });
  return cache_->ad_tables;
}

// ---------------------------------------------------------------------------
// Free functions

SymmetricSpace make_space(SpaceKind kind, int m, int n) {
  if (n < 1) throw ValidationError("n must be >= 1, got " + std::to_string(n));
  switch (kind) {
    case SpaceKind::aiii:
    case SpaceKind::bdi:
    case SpaceKind::cii:
      if (m < n) {
        throw ValidationError(std::string(kind_name(kind)) + " requires m >= n >= 1, got m=" +
                              std::to_string(m) + ", n=" + std::to_string(n));
      }
      break;
    case SpaceKind::ai:
    case SpaceKind::aii:
    case SpaceKind::a2:
    case SpaceKind::diii:
      if (n < 2) {
        throw ValidationError(std::string(kind_name(kind)) + " requires n >= 2 (positive real rank)");
      }
      break;
    case SpaceKind::ci:
      break;
  }
  return SymmetricSpace(kind, m, n);
}

std::vector<SymmetricSpace> enumerate_spaces(int limit) {
  std::vector<SymmetricSpace> out;
  for (SpaceKind kind : kAllKinds) {
    if (is_two_parameter(kind)) {
      for (int m = 1; m <= limit; ++m) {
        for (int n = 1; n <= m; ++n) out.push_back(make_space(kind, m, n));
      }
    } else {
      const int lo = kind == SpaceKind::ci ? 1 : 2;
      for (int n = lo; n <= limit; ++n) out.push_back(make_space(kind, 0, n));
    }
  }
  return out;
}

AlgebraElement project_k(const SymmetricSpace& space, const Cmat& x) {
  if (auto v = space.g0_violation(x)) {
    throw ValidationError(space.label() + ": matrix is not in g0, violated relation: " + *v);
  }
  return {space.project_to_k(x), Subspace::k};
}

AlgebraElement project_p(const SymmetricSpace& space, const Cmat& x) {
  const AlgebraElement k = project_k(space, x);
  return {x - k.value, Subspace::p};
}

const SubspaceBasis& basis_of(const SymmetricSpace& space, Subspace which) {
  return space.basis(which);
}

std::vector<RestrictedRoot> restricted_roots(const SymmetricSpace& space) {
  const int r = space.real_rank();
  const int m = space.m(), n = space.n();
  std::vector<RestrictedRoot> out;
  auto add = [&](std::vector<int> coeffs, int mult) {
    if (mult > 0) out.push_back({std::move(coeffs), mult});
  };
  auto unit = [&](int i, int scale) {
    std::vector<int> c(static_cast<std::size_t>(r), 0);
    c[static_cast<std::size_t>(i)] = scale;
    return c;
  };
  auto pair = [&](int i, int j, int sign) {
    std::vector<int> c(static_cast<std::size_t>(r), 0);
    c[static_cast<std::size_t>(i)] = 1;
    c[static_cast<std::size_t>(j)] = sign;
    return c;
  };
  // BC/C/B-type families: f_i, 2 f_i and f_i +- f_j with given multiplicities.
  auto signed_family = [&](int mult_short, int mult_long, int mult_pair) {
    for (int i = 0; i < r; ++i) {
      add(unit(i, 1), mult_short);
      add(unit(i, 2), mult_long);
    }
    for (int i = 0; i < r; ++i) {
      for (int j = i + 1; j < r; ++j) {
        add(pair(i, j, -1), mult_pair);
        add(pair(i, j, +1), mult_pair);
      }
    }
  };
  // A-type: lambda_i - lambda_j on the traceless spectrum (q, -sum q).
  auto traceless_family = [&](int mult) {
    for (int i = 0; i <= r; ++i) {
      for (int j = i + 1; j <= r; ++j) {
        std::vector<int> c(static_cast<std::size_t>(r), 0);
        c[static_cast<std::size_t>(i)] += 1;
        if (j < r) {
          c[static_cast<std::size_t>(j)] -= 1;
        } else {
          for (auto& x : c) x += 1;
        }
        add(std::move(c), mult);
      }
    }
  };
  switch (space.kind()) {
    case SpaceKind::aiii: signed_family(2 * (m - n), 1, 2); break;
    case SpaceKind::bdi: signed_family(m - n, 0, 1); break;
    case SpaceKind::cii: signed_family(4 * (m - n), 3, 4); break;
    case SpaceKind::diii: signed_family(n % 2 == 1 ? 4 : 0, 1, 4); break;
    case SpaceKind::ci: signed_family(0, 1, 1); break;
    case SpaceKind::ai: traceless_family(1); break;
    case SpaceKind::a2: traceless_family(2); break;
    case SpaceKind::aii: traceless_family(4); break;
  }
  return out;
}

Cmat symplectic_unit(int k) {
  Cmat j = Cmat::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    j(i, k + i) = -1.0;
    j(k + i, i) = 1.0;
  }
  return j;
}

Cmat swap_unit(int k) {
  Cmat s = Cmat::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    s(i, k + i) = 1.0;
    s(k + i, i) = 1.0;
  }
  return s;
}

Rvec generic_direction(const SymmetricSpace& space) {
  const int r = space.real_rank();
  Rvec e(r);
  for (int i = 0; i < r; ++i) e(i) = static_cast<double>(r - i);
  return e;
}

}  // namespace cartanflow
