#include "cartanflow/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "cartanflow/errors.hpp"

namespace cartanflow {

namespace {

void require_same_square(const Cmat& x, const Cmat& y, const char* op) {
  if (x.rows() != x.cols() || y.rows() != y.cols() || x.rows() != y.rows()) {
    throw ContractViolation(std::string(op) + ": operands must be square of equal size, got " +
                            std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " and " +
                            std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
}

}  // namespace

Cmat commutator(const Cmat& x, const Cmat& y) {
  require_same_square(x, y, "commutator");
  return x * y - y * x;
}

double trace_form(const Cmat& x, const Cmat& y) {
  require_same_square(x, y, "trace_form");
  // Re tr(XY) = sum_ij Re(X_ij Y_ji), without forming the product.
  double acc = 0.0;
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex a = x(i, j);
      const Complex b = y(j, i);
      acc += a.real() * b.real() - a.imag() * b.imag();
    }
  }
  return acc;
}

Cmat dagger(const Cmat& x) { return x.adjoint(); }

double frobenius_inner(const Cmat& x, const Cmat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ContractViolation("frobenius_inner: shape mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Complex a = x.data()[k];
    const Complex b = y.data()[k];
    acc += a.real() * b.real() + a.imag() * b.imag();
  }
  return acc;
}

double frobenius_norm(const Cmat& x) { return x.norm(); }

double hermiticity_defect(const Cmat& x) {
  if (x.rows() != x.cols()) return 1.0;
  const double scale = x.norm();
  return (x - x.adjoint()).norm() / (scale > kToleranceFloor ? scale : kToleranceFloor);
}

HermitianEigen hermitian_eigen(const Cmat& x) {
  if (x.rows() != x.cols()) {
    throw ContractViolation("hermitian_eigen: matrix is not square");
  }
  const double defect = (x - x.adjoint()).norm();
  if (defect > scaled_tolerance(1e-10, x.norm())) {
    throw ValidationError("hermitian_eigen: input is not Hermitian (||X - X^dagger|| = " +
                          std::to_string(defect) + ")");
  }
  const Cmat sym = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<Cmat> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConsistencyError("hermitian_eigen: eigensolver did not converge");
  }
  const Eigen::Index n = x.rows();
  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order; reverse it.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SingularValueDecomposition svd(const Cmat& x) {
  Eigen::JacobiSVD<Cmat> solver(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // JacobiSVD already sorts singular values in decreasing order.
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double abs_determinant(const Rmat& a) {
  if (a.rows() != a.cols()) {
    throw ContractViolation("abs_determinant: matrix is not square");
  }
  if (a.rows() == 0) return 1.0;
  return std::abs(Eigen::PartialPivLU<Rmat>(a).determinant());
}

}  // namespace cartanflow
