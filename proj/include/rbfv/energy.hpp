#pragma once

#include "rbfv/types.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace rbfv {

/// Fixed SPD energy matrix G and its Cholesky factorization. The default
/// choice is G* = M + dt * A_sym(xi*); the comparison estimators reuse this
/// class with G = A_sym(xi*).
class EnergyMatrix {
 public:
  EnergyMatrix() = default;
  EnergyMatrix(SparseMatrix g, double dt);

  const SparseMatrix& matrix() const { return g_; }
  double dt() const { return dt_; }
  int size() const { return static_cast<int>(g_.rows()); }

  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& v) const;

  /// x = G^{-1} rhs via the cached factorization.
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

 private:
  SparseMatrix g_;
  double dt_ = 0.0;
  std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>> llt_;
};

/// G* = M + dt (A + A^T)/2; throws ModelError if the SPD factorization fails.
EnergyMatrix build_gstar(const SparseMatrix& M, const SparseMatrix& A_star, double dt);

/// Symmetric part (A + A^T)/2.
SparseMatrix symmetric_part(const SparseMatrix& A);

/// Smallest generalized eigenvalue of (B_sym, G): brute-force oracle via a
/// dense eigensolve; instances must be small enough (guarded).
double exact_alpha(const SparseMatrix& B_sym, const EnergyMatrix& gstar,
                   int max_size = 5000);

/// Smallest eigenvalue and a minimizing eigenvector.
std::pair<double, Vector> exact_alpha_with_vector(const SparseMatrix& B_sym,
                                                  const EnergyMatrix& gstar,
                                                  int max_size = 5000);

/// Smallest and largest generalized eigenvalues of (B_sym, G).
std::pair<double, double> eigenvalue_range(const SparseMatrix& B_sym,
                                           const EnergyMatrix& gstar,
                                           int max_size = 5000);

/// alpha_M = inf v^T M v / |v|_G^2; exactly zero whenever Neumann face
/// unknowns are present (M has zero rows).
double alpha_m(const SparseMatrix& M, const EnergyMatrix& gstar, int n_face_unknowns,
               int max_size = 5000);

/// alpha_G lower bound: dt * alpha_{A_sym,LB} + alpha_M.
double alpha_g_lb(double alpha_asym_lb, double alpha_m_value, double dt);

}  // namespace rbfv
