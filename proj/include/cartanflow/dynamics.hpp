#pragma once

#include <string>
#include <vector>

#include "cartanflow/linalg.hpp"
#include "cartanflow/reduction.hpp"
#include "cartanflow/spaces.hpp"

namespace cartanflow {

/// Integration stops once some |alpha(q)| drops below this.
inline constexpr double kFlowWallTolerance = 10.0 * kWallTolerance;

/// Point of the cotangent bundle p x p.
struct PhasePoint {
  Cmat x;
  Cmat y;
};

/// (X + tY, Y).
PhasePoint direct_flow(const PhasePoint& start, double t);

/// H(q, p, l) = 1/2 p^T G p + 1/2 |r_from_l(q, l)|^2.
double reduced_hamiltonian(const SymmetricSpace& space, const ReducedState& state);

/// Analytic partial derivatives of the reduced Hamiltonian. dl holds the
/// gradient with respect to the zk_perp coordinates of l.
struct HamiltonianGradient {
  Rvec dq;
  Rvec dp;
  Rvec dl;
};
HamiltonianGradient hamiltonian_gradient(const SymmetricSpace& space, const ReducedState& state);

/// Time derivative of (q, p, l):
///   dq = p,  G dp = -dH/dq,  dl = [l, Omega]
/// where Omega in zk_perp is the gradient of H in l.
struct ReducedTangent {
  Rvec dq;
  Rvec dp;
  Cmat dl;
};
ReducedTangent reduced_vector_field(const SymmetricSpace& space, const ReducedState& state);

/// Eigenvalues of i l, descending. Conserved along the reduced flow.
Rvec l_spectrum(const Cmat& l);

struct Trajectory {
  std::vector<double> times;
  std::vector<ReducedState> states;
  std::vector<double> energy;
  std::vector<Rvec> spectrum;
  bool aborted = false;
  std::string abort_reason;
};

/// Fixed-step classical RK4 over [0, t_max]. Stops early (aborted = true)
/// when the trajectory approaches a chamber wall.
Trajectory integrate_reduced(const SymmetricSpace& space, const ReducedState& initial, double t_max,
                             int steps);

struct OracleReport {
  Trajectory reduced;
  std::vector<Rvec> q_direct;
  std::vector<double> deviation;
  double max_deviation = 0.0;
  /// max |H(t) - H(0)| / max(1, |H(0)|)
  double energy_drift = 0.0;
  /// max over t of |spectrum of l(t) - spectrum of l(0)|_inf
  double spectrum_drift = 0.0;
  bool truncated = false;
  std::string reason;
};

/// Runs the reduced flow from the reduction of `start` and compares q(t) with
/// the radial coordinates of X + tY on the integration grid.
OracleReport compare_with_oracle(const SymmetricSpace& space, const PhasePoint& start, double t_max,
                                 int steps);

}  // namespace cartanflow
