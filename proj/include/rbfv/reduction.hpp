#pragma once

#include "rbfv/energy.hpp"

namespace rbfv {

/// POD modes of the snapshot matrix in the G inner product: eigendecomposition
/// of C = S^T G S, keeping the smallest mode count whose captured-energy ratio
/// reaches `ric`. Returns a G-orthonormal matrix (possibly with zero columns
/// for an all-zero S).
Matrix pod(const Matrix& S, double ric, const EnergyMatrix& gstar);

/// Modified Gram-Schmidt with re-iteration (two full passes) in the G inner
/// product. Vectors whose post-projection norm falls below
/// drop_tol * original norm are dropped; `dropped` reports how many.
Matrix gram_schmidt(const Matrix& vectors, const EnergyMatrix& gstar,
                    double drop_tol = 1e-12, int* dropped = nullptr);

/// Extends a G-orthonormal basis with new modes; existing columns are kept
/// bitwise unchanged (nested spans), new columns are orthonormalized against
/// them and each other with the same two-pass scheme.
Matrix extend_basis(const Matrix& Z, const Matrix& new_modes, const EnergyMatrix& gstar,
                    double drop_tol = 1e-12, int* added = nullptr);

/// G-orthogonal projection coefficients Z^T G v.
Vector project_coefficients(const Matrix& Z, const EnergyMatrix& gstar, const Vector& v);

}  // namespace rbfv
