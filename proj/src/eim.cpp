#include "rbfv/eim.hpp"

#include <cmath>

namespace rbfv {

namespace {

int argmax_abs(const Vector& v) {
  int best = 0;
  double best_val = std::abs(v[0]);
  for (int i = 1; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_val) {
      best_val = a;
      best = i;
    }
  }
  return best;
}

}  // namespace

Vector EimModel::theta_from_values(const Vector& values_at_indices) const {
  const int m = terms();
  Vector theta(m);
  for (int row = 0; row < m; ++row) {
    double s = values_at_indices[row];
    for (int i = 0; i < row; ++i) s -= B(row, i) * theta[i];
    theta[row] = s;  // unit diagonal
  }
  return theta;
}

Vector EimModel::interpolate(const Vector& vhat) const {
  Vector values(terms());
  for (int m = 0; m < terms(); ++m) values[m] = vhat[indices[m]];
  return basis * theta_from_values(values);
}

EimModel eim_train(const Matrix& snapshots, double tolerance, int m_max) {
  const int F = static_cast<int>(snapshots.rows());
  const int L = static_cast<int>(snapshots.cols());
  if (L < 1 || F < 1) throw ModelError("EIM requires at least one snapshot");

  Vector inf_norms(L);
  for (int j = 0; j < L; ++j) inf_norms[j] = snapshots.col(j).cwiseAbs().maxCoeff();
  if (inf_norms[0] == 0.0)
    throw ModelError("EIM first snapshot is identically zero");

  EimModel model;
  model.tolerance = tolerance;

  // First snapshot and index.
  {
    const Vector v1 = snapshots.col(0);
    const int j1 = argmax_abs(v1);
    model.basis = v1 / v1[j1];
    model.indices = {j1};
    model.selected = {0};
    model.B = Matrix::Ones(1, 1);
  }

  while (true) {
    // Per-snapshot relative interpolation errors with the current basis.
    const int m = model.terms();
    Matrix values(m, L);
    for (int row = 0; row < m; ++row) values.row(row) = snapshots.row(model.indices[row]);
    double max_err = 0.0;
    int worst = 0;
    Vector worst_residual;
    for (int j = 0; j < L; ++j) {
      Vector theta = model.theta_from_values(values.col(j));
      Vector residual = snapshots.col(j) - model.basis * theta;
      const double err =
          inf_norms[j] > 0.0 ? residual.cwiseAbs().maxCoeff() / inf_norms[j] : 0.0;
      if (err > max_err) {
        max_err = err;
        worst = j;
        worst_residual = std::move(residual);
      }
    }
    model.error_curve.push_back(max_err);
    model.achieved_error = max_err;
    if (max_err < tolerance) break;
    if (m >= m_max) break;

    const int j_new = argmax_abs(worst_residual);
    const double pivot = worst_residual[j_new];
    if (std::abs(pivot) <= 1e-14 * inf_norms[worst]) {
      model.stagnated = true;  // nothing left above round-off; stop, not an error
      break;
    }

    model.basis.conservativeResize(F, m + 1);
    model.basis.col(m) = worst_residual / pivot;
    model.indices.push_back(j_new);
    model.selected.push_back(worst);
    Matrix B = Matrix::Zero(m + 1, m + 1);
    for (int row = 0; row <= m; ++row)
      for (int col = 0; col <= m; ++col) B(row, col) = model.basis(model.indices[row], col);
    model.B = std::move(B);
  }
  return model;
}

Vector AffineModel::theta(const ParameterPoint& xi) const {
  const int m = eim.terms();
  Vector values(m);
  for (int i = 0; i < m; ++i)
    values[i] = MpfaStructure::entry_value(magic_descriptors[i], props, xi);
  Vector theta_eim = eim.theta_from_values(values);
  Vector out(term_count());
  out.head(m) = theta_eim;
  for (int d = m; d < term_count(); ++d) out[d] = xi.kappa(term_zone[d]);
  return out;
}

SparseMatrix AffineModel::assemble_A(const Vector& theta) const {
  SparseMatrix A = A_d[0] * theta[0];
  for (int d = 1; d < term_count(); ++d) A += theta[d] * A_d[d];
  return A;
}

Vector AffineModel::assemble_b(const Vector& theta) const {
  Vector b = Vector::Zero(b_d[0].size());
  for (int d = 0; d < term_count(); ++d) b += theta[d] * b_d[d];
  return b;
}

Vector AffineModel::assemble_l(const Vector& theta) const {
  Vector l = Vector::Zero(l_d[0].size());
  for (int d = 0; d < term_count(); ++d) l += theta[d] * l_d[d];
  return l;
}

double AffineModel::assemble_c(const Vector& theta) const {
  double c = 0.0;
  for (int d = 0; d < term_count(); ++d) c += theta[d] * c_d[d];
  return c;
}

AffineModel build_affine_operators(const Mesh& mesh, const MpfaStructure& structure,
                                   const EimModel& eim, const FluidRockProps& props) {
  AffineModel model;
  model.eim = eim;
  model.props = props;
  for (int idx : eim.indices) model.magic_descriptors.push_back(structure.descriptors[idx]);

  const int n = mesh.cell_count() + mesh.neumann_count();
  for (int d = 0; d < eim.terms(); ++d) {
    FluxParts parts = assemble_flux_parts(mesh, structure, eim.basis.col(d), props);
    model.A_d.push_back(std::move(parts.A));
    model.b_d.push_back(std::move(parts.b));
    model.l_d.push_back(std::move(parts.l));
    model.c_d.push_back(parts.c);
    model.term_zone.push_back(-1);
  }
  for (const auto& term : well_terms(mesh, props)) {
    std::vector<Triplet> triplets;
    Vector b = Vector::Zero(n);
    for (const auto& [cell, w] : term.a_diag) triplets.emplace_back(cell, cell, w);
    for (const auto& [cell, v] : term.b_entries) b[cell] += v;
    SparseMatrix A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end());
    model.A_d.push_back(std::move(A));
    model.b_d.push_back(std::move(b));
    model.l_d.push_back(Vector::Zero(n));
    model.c_d.push_back(0.0);
    model.term_zone.push_back(term.zone);
  }
  return model;
}

}  // namespace rbfv
