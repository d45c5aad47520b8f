#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cartanflow {

using Complex = std::complex<double>;
using Cmat = Eigen::MatrixXcd;
using Cvec = Eigen::VectorXcd;
using Rmat = Eigen::MatrixXd;
using Rvec = Eigen::VectorXd;

/// Absolute floor used by every relative tolerance so that the zero matrix
/// compares sensibly.
inline constexpr double kToleranceFloor = 1e-14;

/// tol * max(scale, floor)
inline double scaled_tolerance(double tol, double scale) {
  return tol * (scale > kToleranceFloor ? scale : kToleranceFloor);
}

/// XY - YX. Both arguments must be square of the same size.
Cmat commutator(const Cmat& x, const Cmat& y);

/// Re tr(XY); the invariant form on g0 used throughout.
double trace_form(const Cmat& x, const Cmat& y);

/// Conjugate transpose.
Cmat dagger(const Cmat& x);

/// Real Frobenius inner product Re tr(X^dagger Y). On Hermitian matrices it
/// agrees with trace_form, on anti-Hermitian matrices with -trace_form.
double frobenius_inner(const Cmat& x, const Cmat& y);

double frobenius_norm(const Cmat& x);

/// ||X - X^dagger||_F relative to ||X||_F.
double hermiticity_defect(const Cmat& x);

struct HermitianEigen {
  Rvec values;   // descending
  Cmat vectors;  // unitary, columns aligned with values
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Throws ValidationError when ||X - X^dagger|| > 1e-10 ||X||.
HermitianEigen hermitian_eigen(const Cmat& x);

struct SingularValueDecomposition {
  Cmat u;       // unitary rows x rows
  Rvec sigma;   // min(rows, cols), descending, nonnegative
  Cmat v;       // unitary cols x cols
};

/// Full SVD, X = U Sigma V^dagger.
SingularValueDecomposition svd(const Cmat& x);

/// |det| of a real square matrix through partially pivoted LU.
double abs_determinant(const Rmat& a);

}  // namespace cartanflow
