#include "rbfv/hf.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace rbfv {

Vector hydrostatic_init(const Mesh& mesh, const FluidRockProps& props) {
  const int n = mesh.cell_count() + mesh.neumann_count();
  Vector p0(n);
  const double rho_g = props.rho * props.gravity;
  for (int c = 0; c < mesh.cell_count(); ++c)
    p0[c] = props.p_D - rho_g * (mesh.cells[c].center[2] - props.z_D);
  for (int f : mesh.neumann_faces())
    p0[mesh.neumann_index(f)] = p0[mesh.faces[f].owner];
  return p0;
}

namespace {

void check_step_residual(const SparseMatrix& lhs, const Vector& x, const Vector& rhs,
                         double dt_b_norm, double tol, int step) {
  const double res = (lhs * x - rhs).norm();
  const double scale = std::max(dt_b_norm, rhs.norm());
  if (scale > 0.0 && res > tol * scale)
    throw SolverError("time step " + std::to_string(step) +
                      ": linear residual exceeds the solver tolerance");
  if (!x.allFinite())
    throw SolverError("time step " + std::to_string(step) + ": non-finite solution");
}

}  // namespace

Trajectory solve_primal(const HFOperator& op, double dt, int n_steps, const Vector& p0,
                        double solver_tol) {
  if (p0.size() != op.size())
    throw SolverError("initial state dimension mismatch");
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(n_steps + 1);
  traj.states.push_back(p0);
  if (n_steps == 0) return traj;

  SparseMatrix lhs = op.M + dt * op.A;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success)
    throw SolverError("primal system factorization failed (singular M + dt A)");

  const double dt_b_norm = dt * op.b.norm();
  for (int n = 0; n < n_steps; ++n) {
    Vector rhs = op.M * traj.states.back() + dt * op.b;
    Vector next = lu.solve(rhs);
    // One refinement step keeps the residual at the direct-solve floor.
    next += lu.solve(rhs - lhs * next);
    check_step_residual(lhs, next, rhs, dt_b_norm, solver_tol, n + 1);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

Vector dual_terminal_state(const SparseMatrix& M, const Vector& l, int n_cells) {
  Vector psi = Vector::Zero(l.size());
  for (int c = 0; c < n_cells; ++c) {
    const double m = M.coeff(c, c);
    if (m <= 0.0) throw ModelError("mass matrix has a non-positive cell entry");
    psi[c] = -l[c] / m;
  }
  return psi;
}

DualTrajectory solve_dual(const HFOperator& op, double dt, int n_steps,
                          double solver_tol) {
  DualTrajectory dual;
  dual.dt = dt;
  dual.states.assign(n_steps + 1, Vector());
  dual.states[n_steps] = dual_terminal_state(op.M, op.l, op.n_cells);
  if (n_steps == 0) return dual;

  SparseMatrix lhs = SparseMatrix(op.A.transpose()) * dt + op.M;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success)
    throw SolverError("dual system factorization failed (singular M + dt A^T)");

  for (int n = n_steps - 1; n >= 0; --n) {
    Vector rhs = op.M * dual.states[n + 1];
    Vector psi = lu.solve(rhs);
    psi += lu.solve(rhs - lhs * psi);
    check_step_residual(lhs, psi, rhs, rhs.norm(), solver_tol, n);
    dual.states[n] = std::move(psi);
  }
  return dual;
}

std::vector<double> qoi_series(const HFOperator& op, const Trajectory& traj) {
  std::vector<double> s;
  s.reserve(traj.steps());
  for (int n = 1; n <= traj.steps(); ++n)
    s.push_back(op.l.dot(traj.states[n]) + op.c);
  return s;
}

std::vector<Vector> shift_dual(const DualTrajectory& dual, int n) {
  const int N = dual.steps();
  if (n < 0 || n > N)
    throw ModelError("shift_dual horizon out of range");
  std::vector<Vector> shifted;
  shifted.reserve(n + 1);
  for (int m = 0; m <= n; ++m) shifted.push_back(dual.states[N - n + m]);
  return shifted;
}

}  // namespace rbfv
