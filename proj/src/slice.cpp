#include "cartanflow/slice.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "cartanflow/errors.hpp"

namespace cartanflow {

namespace {

constexpr double kAcceptResidual = 0.5;

void orthogonalize_against(Cvec& v, const std::vector<Cvec>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const Cvec& b : basis) v -= b.dot(v) * b;
  }
}

// Standard basis vector with the largest component orthogonal to `taken`,
// normalized. The complement is nonempty whenever this is called.
Cvec best_complement_vector(Eigen::Index dim, const std::vector<Cvec>& taken) {
  Cvec best;
  double best_norm = -1.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    Cvec v = Cvec::Unit(dim, j);
    orthogonalize_against(v, taken);
    const double nv = v.norm();
    if (nv > best_norm) {
      best_norm = nv;
      best = v;
    }
  }
  if (best_norm < 1e-3) throw ConsistencyError("unitary completion failed");
  Cvec out = best / best_norm;
  orthogonalize_against(out, taken);
  return out.normalized();
}

// Fills the columns listed in `missing` with orthonormal vectors orthogonal to
// `taken`.
void complete_unitary(Cmat& w, std::vector<Cvec>& taken, const std::vector<int>& missing) {
  for (int c : missing) {
    const Cvec v = best_complement_vector(w.rows(), taken);
    w.col(c) = v;
    taken.push_back(v);
  }
}

// Same, but each filled column c also fills column c + pair_offset with J conj(v).
void complete_symplectic(Cmat& w, std::vector<Cvec>& taken, const std::vector<int>& missing,
                         int pair_offset, const Cmat& j_unit) {
  for (int c : missing) {
    const Cvec v = best_complement_vector(w.rows(), taken);
    const Cvec jv = j_unit * v.conjugate();
    w.col(c) = v;
    w.col(c + pair_offset) = jv;
    taken.push_back(v);
    taken.push_back(jv);
  }
}

Cmat block_diag(const Cmat& a, const Cmat& b) {
  Cmat out = Cmat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

// Column c of K1 holds the left singular vector paired with row c of the
// radial B block: singular vector i < n goes to column m-1-i, the kernel
// directions fill columns 0..m-n-1.
Cmat arrange_left(const Cmat& u, int m, int n) {
  Cmat k1(m, m);
  for (int i = 0; i < n; ++i) k1.col(m - 1 - i) = u.col(i);
  for (int j = n; j < m; ++j) k1.col(j - n) = u.col(j);
  return k1;
}

Cmat decompose_indefinite(const SymmetricSpace& space, const Cmat& x) {
  const int m = space.m(), n = space.n();
  const Cmat b = x.topRightCorner(m, n);
  Cmat k1, k2;
  if (space.kind() == SpaceKind::bdi) {
    Eigen::JacobiSVD<Rmat> solver(b.real(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    k1 = arrange_left(solver.matrixU().cast<Complex>(), m, n);
    k2 = solver.matrixV().cast<Complex>();
    const double sign = (k1.determinant() * k2.determinant()).real();
    if (sign < 0 && m > n) k1.col(0) *= -1.0;
  } else {
    const auto dec = svd(b);
    k1 = arrange_left(dec.u, m, n);
    k2 = dec.v;
    const Complex delta = k1.determinant() * k2.determinant();
    const Complex phase = delta / std::abs(delta);
    if (m > n) {
      k1.col(0) *= std::conj(phase);
    } else {
      const Complex half = std::polar(1.0, -0.5 * std::arg(phase));
      k1.col(m - 1) *= half;
      k2.col(0) *= half;
    }
  }
  return block_diag(k1, k2);
}

Cmat decompose_quaternionic_indefinite(const SymmetricSpace& space, const Cmat& x) {
  const int m = space.m(), n = space.n();
  const Cmat b = x.topRightCorner(2 * m, 2 * n);
  const Cmat jm = symplectic_unit(m);
  const auto qe = quaternionic_eigen(b.adjoint() * b);
  const Cmat& k2 = qe.vectors;
  Cmat k1 = Cmat::Zero(2 * m, 2 * m);
  std::vector<Cvec> taken;
  std::vector<int> missing;
  const double tiny = scaled_tolerance(1e-10, b.norm());
  for (int i = 0; i < n; ++i) {
    const double sigma = std::sqrt(std::max(qe.values(i), 0.0));
    if (sigma <= tiny) {
      missing.push_back(m - 1 - i);
      continue;
    }
    Cvec u = b * k2.col(i) / sigma;
    orthogonalize_against(u, taken);
    u.normalize();
    const Cvec ju = jm * u.conjugate();
    k1.col(m - 1 - i) = u;
    k1.col(2 * m - 1 - i) = ju;
    taken.push_back(u);
    taken.push_back(ju);
  }
  for (int c = 0; c < m - n; ++c) missing.push_back(c);
  std::sort(missing.begin(), missing.end());
  complete_symplectic(k1, taken, missing, m, jm);
  return block_diag(k1, k2);
}

Cmat decompose_real_symmetric(const Cmat& x) {
  const Rmat sym = 0.5 * (x.real() + x.real().transpose());
  Eigen::SelfAdjointEigenSolver<Rmat> solver(sym);
  if (solver.info() != Eigen::Success) throw ConsistencyError("symmetric eigensolver failed");
  const Eigen::Index n = sym.rows();
  Rmat v(n, n);
  for (Eigen::Index i = 0; i < n; ++i) v.col(i) = solver.eigenvectors().col(n - 1 - i);
  if (v.determinant() < 0) v.col(0) *= -1.0;
  return v.cast<Complex>();
}

Cmat decompose_hermitian(const Cmat& x) {
  Cmat v = hermitian_eigen(x).vectors;
  const Complex delta = v.determinant();
  v.col(0) *= std::conj(delta / std::abs(delta));
  return v;
}

// Youla form of a complex skew-symmetric Z: Z = W Z_H W^T with 2x2 blocks
// [[0, s], [-s, 0]] on the diagonal of Z_H.
Cmat decompose_skew(const SymmetricSpace& space, const Cmat& x) {
  const int n = space.n();
  const int r = space.real_rank();
  const Cmat z = x.topRightCorner(n, n);
  const auto he = hermitian_eigen(z * z.adjoint());
  const double tiny = scaled_tolerance(1e-10, z.norm());
  Cmat w = Cmat::Zero(n, n);
  std::vector<Cvec> taken;
  int pairs = 0;
  for (int j = 0; j < n && pairs < r; ++j) {
    const double sigma = std::sqrt(std::max(he.values(j), 0.0));
    if (sigma <= tiny) break;
    Cvec u = he.vectors.col(j);
    orthogonalize_against(u, taken);
    const double nu = u.norm();
    if (nu < kAcceptResidual) continue;
    u /= nu;
    Cvec v = z * u.conjugate() / sigma;
    taken.push_back(u);
    orthogonalize_against(v, taken);
    v.normalize();
    taken.push_back(v);
    w.col(2 * pairs) = u;
    w.col(2 * pairs + 1) = -v;
    ++pairs;
  }
  std::vector<int> missing;
  for (int c = 2 * pairs; c < n; ++c) missing.push_back(c);
  complete_unitary(w, taken, missing);
  return block_diag(w, w.conjugate());
}

// Takagi form of a complex symmetric Z: Z = W diag(s) W^T.
Cmat decompose_symmetric(const SymmetricSpace& space, const Cmat& x) {
  const int n = space.n();
  const Cmat z = x.topRightCorner(n, n);
  const auto he = hermitian_eigen(z * z.adjoint());
  const double tiny = scaled_tolerance(1e-10, z.norm());
  Cmat w = Cmat::Zero(n, n);
  std::vector<Cvec> taken;
  int count = 0;
  for (int j = 0; j < n && count < n; ++j) {
    Cvec u = he.vectors.col(j);
    orthogonalize_against(u, taken);
    const double nu = u.norm();
    if (nu < kAcceptResidual) continue;
    u /= nu;
    const double sigma = std::sqrt(std::max(he.values(j), 0.0));
    Cvec a = u;
    if (sigma > tiny) {
      const Cvec zu = z * u.conjugate() / sigma;
      a = u + zu;
      if (a.norm() < 1.0) a = Complex(0.0, 1.0) * (u - zu);
    }
    orthogonalize_against(a, taken);
    a.normalize();
    w.col(count++) = a;
    taken.push_back(a);
  }
  std::vector<int> missing;
  for (int c = count; c < n; ++c) missing.push_back(c);
  complete_unitary(w, taken, missing);
  return block_diag(w, w.conjugate());
}

double wall_scale_tolerance(const Cmat& r) { return 1e-10 * std::max(1.0, r.norm()); }

void require_slice_input(const SymmetricSpace& space, const SliceCoordinates& s) {
  if (s.q.size() != space.real_rank() || s.p.size() != space.real_rank()) {
    throw ContractViolation("slice coordinates: q and p must have length real_rank");
  }
  if (auto v = space.p_violation(s.r)) {
    throw ValidationError("slice coordinates: r is not in p (" + *v + ")");
  }
  const Rvec along_a = space.basis(Subspace::a).coordinates(s.r);
  if (along_a.norm() > scaled_tolerance(1e-10, s.r.norm())) {
    throw ValidationError("slice coordinates: r has a component along a");
  }
}

Complex unit_phase(Complex z) { return z / std::abs(z); }

// Components of the f_a - f_b and f_a + f_b root spaces inside the lower
// n x n block S of R (rows indexed from the bottom).
std::pair<Complex, Complex> pair_components(const Cmat& s, int a, int b) {
  const int n = static_cast<int>(s.cols());
  const Complex x = s(n - 1 - a, b);
  const Complex y = s(n - 1 - b, a);
  const double h = 1.0 / std::sqrt(2.0);
  return {h * (x - std::conj(y)), h * (x + std::conj(y))};
}

}  // namespace

AlgebraElement embed_radial(const SymmetricSpace& space, const Rvec& q) {
  return {space.radial_element(q), Subspace::a};
}

double min_root_value(const SymmetricSpace& space, const Rvec& q) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& root : restricted_roots(space)) out = std::min(out, std::abs(root.evaluate(q)));
  return out;
}

bool in_closed_chamber(const SymmetricSpace& space, const Rvec& q, double tol) {
  const Rvec v = space.chamber_vector(q);
  for (Eigen::Index i = 0; i + 1 < v.size(); ++i) {
    if (v(i) < v(i + 1) - tol) return false;
  }
  if (space.sign_flip_weyl() && v.size() > 0 && v(v.size() - 1) < -tol) return false;
  return true;
}

Rvec radial_coordinates(const SymmetricSpace& space, const Cmat& x) {
  const int r = space.real_rank();
  Rvec rhs(r);
  for (int i = 0; i < r; ++i) rhs(i) = trace_form(space.radial_element(Rvec::Unit(r, i)), x);
  return space.radial_gram().ldlt().solve(rhs);
}

HermitianEigen quaternionic_eigen(const Cmat& a) {
  if (a.rows() % 2 != 0) throw ContractViolation("quaternionic_eigen: odd dimension");
  const int n = static_cast<int>(a.rows() / 2);
  const Cmat j = symplectic_unit(n);
  if ((a * j - j * a.conjugate()).norm() > scaled_tolerance(1e-9, a.norm())) {
    throw ValidationError("quaternionic_eigen: A J != J conj(A)");
  }
  const auto he = hermitian_eigen(a);
  HermitianEigen out{Rvec(n), Cmat(2 * n, 2 * n)};
  std::vector<Cvec> taken;
  int count = 0;
  for (int c = 0; c < 2 * n && count < n; ++c) {
    Cvec v = he.vectors.col(c);
    orthogonalize_against(v, taken);
    const double nv = v.norm();
    if (nv < kAcceptResidual) continue;
    v /= nv;
    const Cvec jv = j * v.conjugate();
    out.vectors.col(count) = v;
    out.vectors.col(n + count) = jv;
    out.values(count) = v.dot(a * v).real();
    taken.push_back(v);
    taken.push_back(jv);
    ++count;
  }
  if (count != n) throw ConsistencyError("quaternionic_eigen: could not pair eigenvectors");
  return out;
}

RadialDecomposition radial_decompose(const SymmetricSpace& space, const Cmat& x) {
  if (auto v = space.p_violation(x)) {
    throw ValidationError(space.label() + ": matrix is not in p, violated relation: " + *v);
  }
  Cmat k;
  switch (space.kind()) {
    case SpaceKind::aiii:
    case SpaceKind::bdi: k = decompose_indefinite(space, x); break;
    case SpaceKind::cii: k = decompose_quaternionic_indefinite(space, x); break;
    case SpaceKind::ai: k = decompose_real_symmetric(x); break;
    case SpaceKind::a2: k = decompose_hermitian(x); break;
    case SpaceKind::aii: k = quaternionic_eigen(x).vectors; break;
    case SpaceKind::diii: k = decompose_skew(space, x); break;
    case SpaceKind::ci: k = decompose_symmetric(space, x); break;
  }
  return {radial_coordinates(space, k.adjoint() * x * k), k};
}

ExactSliceResult exact_slice_reduce(const SymmetricSpace& space, const SliceCoordinates& s) {
  if (space.kind() != SpaceKind::aiii && space.kind() != SpaceKind::bdi) {
    throw Unsupported("exact slice reduction is implemented for aiii and bdi only, not " +
                      space.label());
  }
  require_slice_input(space, s);
  if (!in_closed_chamber(space, s.q, 0.0) || min_root_value(space, s.q) <= kWallTolerance) {
    throw DegenerateError("exact_slice_reduce: q lies on a chamber wall");
  }
  const int m = space.m(), n = space.n(), d = m - n;
  const Cmat big_r = s.r.topRightCorner(m, n);
  const Cmat v = big_r.topRows(d);
  const Cmat lower = big_r.bottomRows(n);
  const double tiny = wall_scale_tolerance(s.r);
  const int flagged = std::min(d, n);

  ExactSliceResult out;
  std::ostringstream note;
  Cmat ud = Cmat::Identity(d, d);
  Rvec tau = Rvec::Zero(n);

  if (space.kind() == SpaceKind::bdi) {
    if (d > 0) {
      Eigen::HouseholderQR<Rmat> qr(v.real());
      Rmat o = Rmat(qr.householderQ()).transpose();
      const Rmat rv = o * v.real();
      // SO(d) can fix every sign except the last one when n >= d.
      const int signed_rows = n >= d ? d - 1 : flagged;
      for (int a = 0; a < signed_rows; ++a) {
        if (std::abs(rv(a, a)) <= tiny) {
          out.generic = false;
          note << "c_" << a + 1 << " = 0; ";
        } else if (rv(a, a) < 0) {
          o.row(a) *= -1.0;
        }
      }
      if (o.determinant() < 0) o.row(d - 1) *= -1.0;
      ud = o.cast<Complex>();
    }
  } else {
    if (d > 0) {
      Eigen::HouseholderQR<Cmat> qr(v);
      ud = Cmat(qr.householderQ()).adjoint();
      const Cmat rv = ud * v;
      for (int a = 0; a < flagged; ++a) {
        if (std::abs(rv(a, a)) <= tiny) {
          out.generic = false;
          note << "c_" << a + 1 << " = 0; ";
        } else {
          ud.row(a) *= std::conj(unit_phase(rv(a, a)));
        }
      }
    }
    for (int a = 0; a + 1 < n; ++a) {
      const auto [minus, plus] = pair_components(lower, a, a + 1);
      double step = 0.0;
      if (std::abs(minus) > tiny) {
        step = std::arg(minus);
      } else if (std::abs(plus) > tiny) {
        step = std::arg(plus);
        note << "f" << a + 1 << "-f" << a + 2 << " component vanished, used f" << a + 1 << "+f"
             << a + 2 << "; ";
      } else {
        out.generic = false;
        note << "f" << a + 1 << "+-f" << a + 2 << " components vanished; ";
      }
      tau(a + 1) = tau(a) + step;
    }
    // The torus rescales column a of V by exp(-i tau_a); undo it on the flag.
    for (int a = 0; a < flagged; ++a) ud.row(a) *= std::polar(1.0, tau(a));
  }

  Cmat k1 = Cmat::Identity(m, m);
  k1.topLeftCorner(d, d) = ud;
  Cmat k2 = Cmat::Identity(n, n);
  for (int a = 0; a < n; ++a) {
    const Complex t = std::polar(1.0, tau(a));
    k1(m - 1 - a, m - 1 - a) = t;
    k2(a, a) = t;
  }
  Cmat mk = block_diag(k1, k2);
  if (space.kind() == SpaceKind::aiii) {
    // A central phase acts trivially under Ad and restores det = 1.
    const Complex delta = mk.determinant();
    mk *= std::polar(1.0, -std::arg(delta) / static_cast<double>(m + n));
  }
  out.m_elem = mk;
  out.canonical = {s.q, s.p, mk * s.r * mk.adjoint()};
  out.note = note.str();
  return out;
}

SliceCheck slice_contains(const SymmetricSpace& space, const SliceCoordinates& s) {
  auto fail = [](std::string why) { return SliceCheck{false, std::move(why)}; };
  if (s.q.size() != space.real_rank() || s.p.size() != space.real_rank()) {
    return fail("q/p length differs from real rank");
  }
  if (s.r.rows() != space.ambient_dim() || s.r.cols() != space.ambient_dim()) {
    return fail("r has wrong shape");
  }
  if (auto v = space.p_violation(s.r)) return fail("r not in p: " + *v);
  const double tol = wall_scale_tolerance(s.r);
  const Rvec along_a = space.basis(Subspace::a).coordinates(s.r);
  if (along_a.norm() > tol) return fail("r not orthogonal to a");
  if (space.kind() != SpaceKind::aiii && space.kind() != SpaceKind::bdi) return {};

  const int m = space.m(), n = space.n(), d = m - n;
  const Cmat big_r = s.r.topRightCorner(m, n);
  const Cmat v = big_r.topRows(d);
  const Cmat lower = big_r.bottomRows(n);
  const int flagged = std::min(d, n);
  const bool real = space.kind() == SpaceKind::bdi;
  const int signed_rows = real && n >= d ? d - 1 : flagged;

  for (int a = 0; a < flagged; ++a) {
    for (int i = a + 1; i < d; ++i) {
      if (std::abs(v(i, a)) > tol) {
        std::ostringstream os;
        os << "flag entry V[" << i + 1 << "][" << a + 1 << "] is nonzero";
        return fail(os.str());
      }
    }
    if (a < signed_rows) {
      const Complex c = v(a, a);
      if (std::abs(c.imag()) > tol || c.real() < -tol) {
        std::ostringstream os;
        os << "diagonal entry c_" << a + 1 << " is not real nonnegative";
        return fail(os.str());
      }
    }
  }
  if (!real) {
    for (int a = 0; a + 1 < n; ++a) {
      const auto [minus, plus] = pair_components(lower, a, a + 1);
      const Complex c = std::abs(minus) > tol ? minus : plus;
      if (std::abs(c.imag()) > tol || c.real() < -tol) {
        std::ostringstream os;
        os << "simple root component f" << a + 1 << "-f" << a + 2 << " is not real nonnegative";
        return fail(os.str());
      }
    }
  }
  return {};
}

int exact_slice_constraint_count(const SymmetricSpace& space) {
  if (space.kind() != SpaceKind::aiii) {
    throw Unsupported("constraint count is defined for aiii only");
  }
  const int n = space.n(), d = space.m() - space.n();
  const int flag = n >= d ? d * d : 2 * d * n - n * n;
  return flag + (n - 1);
}

int generic_m_orbit_dimension(const SymmetricSpace& space, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Cmat r = random_a_perp(space, rng);
  const auto& centralizer = space.basis(Subspace::m_centralizer);
  const auto& p = space.basis(Subspace::p);
  if (centralizer.size() == 0) return 0;
  Rmat tangent(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(centralizer.size()));
  for (std::size_t j = 0; j < centralizer.size(); ++j) {
    tangent.col(static_cast<Eigen::Index>(j)) = p.coordinates(commutator(centralizer.vectors[j], r));
  }
  Eigen::JacobiSVD<Rmat> solver(tangent);
  const Rvec& sv = solver.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-9 * std::max(1.0, sv(0))) ++rank;
  }
  return rank;
}

Cmat exp_k(const Cmat& xi) {
  const Cmat h = Complex(0.0, 1.0) * xi;
  const auto he = hermitian_eigen(0.5 * (h + h.adjoint()));
  Cvec phases(he.values.size());
  for (Eigen::Index i = 0; i < he.values.size(); ++i) phases(i) = std::polar(1.0, -he.values(i));
  return he.vectors * phases.asDiagonal() * he.vectors.adjoint();
}

Cmat random_k(const SymmetricSpace& space, SplitMix64& rng, double scale) {
  const auto& basis = space.basis(Subspace::k);
  if (basis.size() == 0) return Cmat::Identity(space.ambient_dim(), space.ambient_dim());
  std::normal_distribution<double> normal;
  Rvec c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = scale * normal(rng);
  return exp_k(basis.combine(c));
}

Cmat random_p(const SymmetricSpace& space, SplitMix64& rng) {
  const auto& basis = space.basis(Subspace::p);
  std::normal_distribution<double> normal;
  Rvec c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return basis.combine(c);
}

Cmat random_a_perp(const SymmetricSpace& space, SplitMix64& rng) {
  const auto& basis = space.basis(Subspace::a_perp);
  std::normal_distribution<double> normal;
  Rvec c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return basis.combine(c);
}

Rvec random_chamber_point(const SymmetricSpace& space, SplitMix64& rng) {
  const int r = space.real_rank();
  std::normal_distribution<double> normal;
  std::vector<double> v;
  if (space.sign_flip_weyl()) {
    for (int i = 0; i < r; ++i) v.push_back(std::abs(normal(rng)));
  } else {
    double mean = 0.0;
    for (int i = 0; i <= r; ++i) {
      v.push_back(normal(rng));
      mean += v.back();
    }
    mean /= static_cast<double>(r + 1);
    for (double& x : v) x -= mean;
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  Rvec q(r);
  for (int i = 0; i < r; ++i) q(i) = v[static_cast<std::size_t>(i)];
  return q;
}

}  // namespace cartanflow
