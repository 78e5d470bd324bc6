#pragma once

#include "rbfv/mpfa.hpp"

namespace rbfv {

/// Empirical interpolation of the coefficient-vector family v(xi).
struct EimModel {
  Matrix basis;                     // F x M, columns are the interpolation basis
  std::vector<int> indices;         // interpolation (magic) indices into the layout
  Matrix B;                         // M x M unit lower triangular, B(m,i) = basis(indices[m], i)
  double tolerance = 0.0;           // requested relative L-inf tolerance
  double achieved_error = 0.0;      // max relative training error at termination
  std::vector<double> error_curve;  // max relative training error after M = 1, 2, ... terms
  std::vector<int> selected;        // training-set indices of the selected snapshots
  bool stagnated = false;

  int terms() const { return static_cast<int>(indices.size()); }

  /// Interpolation coefficients from the values of v(xi) at the magic indices
  /// (forward substitution on B; cost O(M^2)).
  Vector theta_from_values(const Vector& values_at_indices) const;

  /// I_M[vhat] for a full coefficient vector (training/testing only).
  Vector interpolate(const Vector& vhat) const;
};

/// Greedy EIM over snapshot columns. Selection and stopping use the per-column
/// relative L-inf interpolation error; ties break to the smallest index.
EimModel eim_train(const Matrix& snapshots, double tolerance, int m_max);

/// Parameter-affine surrogate of the HF operator family:
///   A(xi) ~ sum_d theta_d(xi) A_d   (same theta drive b, l and c),
/// with the EIM terms first and one exact well term per perforated zone
/// (coefficient kappa_zone).
struct AffineModel {
  std::vector<SparseMatrix> A_d;
  std::vector<Vector> b_d;
  std::vector<Vector> l_d;
  std::vector<double> c_d;
  EimModel eim;
  std::vector<MpfaStructure::CoeffDescriptor> magic_descriptors;
  std::vector<int> term_zone;  // -1 for EIM terms, zone id for well terms
  FluidRockProps props;

  int term_count() const { return static_cast<int>(A_d.size()); }
  int eim_terms() const { return eim.terms(); }

  /// theta(xi): EIM coefficients from the magic-index coefficient entries,
  /// then kappa_zone for each well term. O(M^2), independent of the mesh size.
  Vector theta(const ParameterPoint& xi) const;

  SparseMatrix assemble_A(const Vector& theta) const;
  Vector assemble_b(const Vector& theta) const;
  Vector assemble_l(const Vector& theta) const;
  double assemble_c(const Vector& theta) const;
};

AffineModel build_affine_operators(const Mesh& mesh, const MpfaStructure& structure,
                                   const EimModel& eim, const FluidRockProps& props);

}  // namespace rbfv
