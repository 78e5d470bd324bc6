#include "rbfv/energy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace rbfv {

EnergyMatrix::EnergyMatrix(SparseMatrix g, double dt)
    : g_(std::move(g)), dt_(dt), llt_(std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>()) {
  llt_->compute(g_);
  if (llt_->info() != Eigen::Success)
    throw ModelError("energy matrix is not SPD (is a Dirichlet face present?)");
}

double EnergyMatrix::inner(const Vector& u, const Vector& v) const {
  if (u.size() != size() || v.size() != size())
    throw ModelError("energy inner product: dimension mismatch");
  return u.dot(g_ * v);
}

double EnergyMatrix::norm(const Vector& v) const {
  const double q = inner(v, v);
  return std::sqrt(std::max(q, 0.0));
}

Vector EnergyMatrix::solve(const Vector& rhs) const { return llt_->solve(rhs); }

Matrix EnergyMatrix::solve(const Matrix& rhs) const { return llt_->solve(rhs); }

SparseMatrix symmetric_part(const SparseMatrix& A) {
  SparseMatrix At = A.transpose();
  return ((A + At) * 0.5).pruned();
}

EnergyMatrix build_gstar(const SparseMatrix& M, const SparseMatrix& A_star, double dt) {
  SparseMatrix g = M + dt * symmetric_part(A_star);
  return EnergyMatrix(std::move(g), dt);
}

namespace {

Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> dense_solver(
    const SparseMatrix& B_sym, const EnergyMatrix& gstar, int max_size) {
  if (gstar.size() > max_size)
    throw SolverError("generalized eigensolve requested beyond the dense-oracle size guard");
  Matrix B = Matrix(B_sym);
  Matrix G = Matrix(gstar.matrix());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(B, G,
                                                      Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("generalized eigensolver did not converge");
  return es;
}

}  // namespace

double exact_alpha(const SparseMatrix& B_sym, const EnergyMatrix& gstar, int max_size) {
  return dense_solver(B_sym, gstar, max_size).eigenvalues().minCoeff();
}

std::pair<double, Vector> exact_alpha_with_vector(const SparseMatrix& B_sym,
                                                  const EnergyMatrix& gstar,
                                                  int max_size) {
  auto es = dense_solver(B_sym, gstar, max_size);
  Eigen::Index idx = 0;
  es.eigenvalues().minCoeff(&idx);
  return {es.eigenvalues()[idx], es.eigenvectors().col(idx)};
}

std::pair<double, double> eigenvalue_range(const SparseMatrix& B_sym,
                                           const EnergyMatrix& gstar, int max_size) {
  auto es = dense_solver(B_sym, gstar, max_size);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

double alpha_m(const SparseMatrix& M, const EnergyMatrix& gstar, int n_face_unknowns,
               int max_size) {
  if (n_face_unknowns > 0) return 0.0;  // zero block short-circuits the eigensolve
  return exact_alpha(M, gstar, max_size);
}

double alpha_g_lb(double alpha_asym_lb, double alpha_m_value, double dt) {
  if (alpha_asym_lb < 0.0 || alpha_m_value < 0.0)
    throw ModelError("coercivity lower bounds must be nonnegative");
  return dt * alpha_asym_lb + alpha_m_value;
}

}  // namespace rbfv
