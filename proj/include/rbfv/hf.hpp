#pragma once

#include "rbfv/mpfa.hpp"

namespace rbfv {

/// Implicit-Euler pressure trajectory p^0..p^N.
struct Trajectory {
  double dt = 0.0;
  std::vector<Vector> states;

  int steps() const { return static_cast<int>(states.size()) - 1; }
};

/// Backward dual trajectory stored as Psi^0..Psi^N (terminal state last).
struct DualTrajectory {
  double dt = 0.0;
  std::vector<Vector> states;

  int steps() const { return static_cast<int>(states.size()) - 1; }
  const Vector& psi(int n) const { return states[n]; }
};

/// p0_K = p_D - rho g (z_K - z_D); Neumann face unknowns copy the adjacent
/// cell value.
Vector hydrostatic_init(const Mesh& mesh, const FluidRockProps& props);

/// Solves (M + dt A) p^{n+1} = M p^n + dt b for N steps with one sparse
/// factorization; each step satisfies the 1e-12 relative-residual contract.
Trajectory solve_primal(const HFOperator& op, double dt, int n_steps, const Vector& p0,
                        double solver_tol = 1e-12);

/// Backward sweep (M + dt A^T) Psi^n = M Psi^{n+1} from the terminal condition
/// M Psi^N = -l (cell block; face components of Psi^N are set to zero).
DualTrajectory solve_dual(const HFOperator& op, double dt, int n_steps,
                          double solver_tol = 1e-12);

/// Terminal dual state used by solve_dual, exposed for projection tables.
Vector dual_terminal_state(const SparseMatrix& M, const Vector& l, int n_cells);

/// s^n = l^T p^n + c for n = 1..N.
std::vector<double> qoi_series(const HFOperator& op, const Trajectory& traj);

/// View of the per-horizon dual psi_{.,n}^m = Psi^{N-n+m}, m = 0..n.
std::vector<Vector> shift_dual(const DualTrajectory& dual, int n);

}  // namespace rbfv
