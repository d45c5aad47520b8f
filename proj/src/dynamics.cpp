#include "cartanflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cartanflow/errors.hpp"

namespace cartanflow {

namespace {

// Flat coordinates (q, p, l_c) with l_c the zk_perp coordinates of l.
struct FlatState {
  Rvec q;
  Rvec p;
  Rvec l;
};

struct Kinematics {
  Rvec r;      // a_perp coordinates of r_from_l(q, l)
  Rvec omega;  // zk_perp coordinates of dH/dl
};

Kinematics solve_kinematics(const SymmetricSpace& space, const Rvec& q, const Rvec& lc) {
  if (min_root_value(space, q) <= kWallTolerance) {
    throw DegenerateError("reduced dynamics: q lies on a chamber wall");
  }
  const Rmat t = ad_radial_matrix(space, q);
  Kinematics out;
  if (t.rows() == 0) {
    out.r = Rvec::Zero(0);
    out.omega = Rvec::Zero(0);
    return out;
  }
  const Eigen::PartialPivLU<Rmat> lu(t);
  out.r = lu.transpose().solve(lc);
  out.omega = lu.solve(out.r);
  return out;
}

Rvec l_coordinates(const SymmetricSpace& space, const Cmat& l) {
  return space.basis(Subspace::zk_perp).coordinates(l);
}

Cmat l_matrix(const SymmetricSpace& space, const Rvec& lc) {
  const auto& basis = space.basis(Subspace::zk_perp);
  if (basis.size() == 0) return Cmat::Zero(space.ambient_dim(), space.ambient_dim());
  return basis.combine(lc);
}

double flat_energy(const SymmetricSpace& space, const FlatState& s, const Kinematics& kin) {
  return 0.5 * s.p.dot(space.radial_gram() * s.p) + 0.5 * kin.r.squaredNorm();
}

FlatState flat_field(const SymmetricSpace& space, const FlatState& s) {
  const Kinematics kin = solve_kinematics(space, s.q, s.l);
  const auto& tables = space.ad_radial_tables();
  const int rank = space.real_rank();
  Rvec dh_dq(rank);
  for (int k = 0; k < rank; ++k) {
    dh_dq(k) = -kin.r.dot(tables[static_cast<std::size_t>(k)] * kin.omega);
  }
  FlatState out;
  out.q = s.p;
  out.p = -space.radial_gram().ldlt().solve(dh_dq);
  if (s.l.size() == 0) {
    out.l = Rvec::Zero(0);
  } else {
    const Cmat l = l_matrix(space, s.l);
    const Cmat omega = l_matrix(space, kin.omega);
    out.l = l_coordinates(space, commutator(l, omega));
  }
  return out;
}

FlatState axpy(const FlatState& s, double h, const FlatState& d) {
  return {s.q + h * d.q, s.p + h * d.p, s.l + h * d.l};
}

}  // namespace

PhasePoint direct_flow(const PhasePoint& start, double t) { return {start.x + t * start.y, start.y}; }

double reduced_hamiltonian(const SymmetricSpace& space, const ReducedState& state) {
  const FlatState s{state.q, state.p, l_coordinates(space, state.l)};
  return flat_energy(space, s, solve_kinematics(space, s.q, s.l));
}

HamiltonianGradient hamiltonian_gradient(const SymmetricSpace& space, const ReducedState& state) {
  const Rvec lc = l_coordinates(space, state.l);
  const Kinematics kin = solve_kinematics(space, state.q, lc);
  const auto& tables = space.ad_radial_tables();
  HamiltonianGradient out;
  out.dq.resize(space.real_rank());
  for (int k = 0; k < space.real_rank(); ++k) {
    out.dq(k) = -kin.r.dot(tables[static_cast<std::size_t>(k)] * kin.omega);
  }
  out.dp = space.radial_gram() * state.p;
  out.dl = kin.omega;
  return out;
}

ReducedTangent reduced_vector_field(const SymmetricSpace& space, const ReducedState& state) {
  const FlatState d = flat_field(space, {state.q, state.p, l_coordinates(space, state.l)});
  return {d.q, d.p, l_matrix(space, d.l)};
}

Rvec l_spectrum(const Cmat& l) { return hermitian_eigen(Complex(0.0, 1.0) * l).values; }

Trajectory integrate_reduced(const SymmetricSpace& space, const ReducedState& initial, double t_max,
                             int steps) {
  if (steps < 1) throw ValidationError("integrate_reduced: steps must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ValidationError("integrate_reduced: t_max must be positive and finite");
  }
  if (initial.q.size() != space.real_rank() || initial.p.size() != space.real_rank()) {
    throw ContractViolation("integrate_reduced: q/p length differs from real rank");
  }
  Trajectory out;
  const double h = t_max / steps;
  FlatState s{initial.q, initial.p, l_coordinates(space, initial.l)};

  auto record = [&](double t) {
    const Kinematics kin = solve_kinematics(space, s.q, s.l);
    ReducedState st{s.q, s.p, l_matrix(space, s.l)};
    out.times.push_back(t);
    out.energy.push_back(flat_energy(space, s, kin));
    out.spectrum.push_back(l_spectrum(st.l));
    out.states.push_back(std::move(st));
  };

  if (min_root_value(space, s.q) < kFlowWallTolerance) {
    out.aborted = true;
    out.abort_reason = "initial point is within the wall tolerance of a chamber wall";
    return out;
  }
  record(0.0);
  for (int i = 1; i <= steps; ++i) {
    try {
      const FlatState k1 = flat_field(space, s);
      const FlatState k2 = flat_field(space, axpy(s, 0.5 * h, k1));
      const FlatState k3 = flat_field(space, axpy(s, 0.5 * h, k2));
      const FlatState k4 = flat_field(space, axpy(s, h, k3));
      s.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
      s.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
      s.l += h / 6.0 * (k1.l + 2.0 * k2.l + 2.0 * k3.l + k4.l);
    } catch (const DegenerateError&) {
      out.aborted = true;
    }
    if (out.aborted || min_root_value(space, s.q) < kFlowWallTolerance) {
      out.aborted = true;
      std::ostringstream os;
      os << "approached a chamber wall at t = " << i * h;
      out.abort_reason = os.str();
      return out;
    }
    record(i * h);
  }
  return out;
}

OracleReport compare_with_oracle(const SymmetricSpace& space, const PhasePoint& start, double t_max,
                                 int steps) {
  const auto reduction = reduce_phase_point(space, start.x, start.y);
  OracleReport report;
  report.reduced =
      integrate_reduced(space, reduced_state_from_slice(space, reduction.slice), t_max, steps);
  const auto& traj = report.reduced;
  if (traj.aborted) {
    report.truncated = true;
    report.reason = traj.abort_reason;
  }
  if (traj.times.empty()) return report;
  const double h0 = traj.energy.front();
  const Rvec& spec0 = traj.spectrum.front();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Cmat x = direct_flow(start, traj.times[i]).x;
    const Rvec qd = radial_decompose(space, x).q;
    const double dev = (qd - traj.states[i].q).cwiseAbs().maxCoeff();
    report.q_direct.push_back(qd);
    report.deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
    report.energy_drift =
        std::max(report.energy_drift, std::abs(traj.energy[i] - h0) / std::max(1.0, std::abs(h0)));
    if (spec0.size() > 0) {
      report.spectrum_drift =
          std::max(report.spectrum_drift, (traj.spectrum[i] - spec0).cwiseAbs().maxCoeff());
    }
  }
  return report;
}

}  // namespace cartanflow
