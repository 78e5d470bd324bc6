#include "rbfv/lp.hpp"

#include <cmath>
#include <limits>

namespace rbfv {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-8;

/// Tableau simplex on min c^T x, T x = rhs, x >= 0 with a given starting
/// basis. `allowed` masks columns that may enter (artificials in phase 2).
/// Returns false when unbounded.
bool run_simplex(Matrix& T, Vector& rhs, const Vector& c, std::vector<int>& basis,
                 const std::vector<bool>& allowed) {
  const int m = static_cast<int>(T.rows());
  const int n = static_cast<int>(T.cols());
  while (true) {
    // Reduced costs r_j = c_j - c_B^T T_j; Bland: smallest improving index.
    Vector cb(m);
    for (int i = 0; i < m; ++i) cb[i] = c[basis[i]];
    int entering = -1;
    for (int j = 0; j < n; ++j) {
      if (!allowed[j]) continue;
      const double r = c[j] - cb.dot(T.col(j));
      if (r < -kCostTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return true;  // optimal

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, entering) <= kPivotTol) continue;
      const double ratio = rhs[i] / T(i, entering);
      if (ratio < best_ratio - 1e-15 ||
          (std::abs(ratio - best_ratio) <= 1e-15 &&
           (leaving < 0 || basis[i] < basis[leaving]))) {
        best_ratio = ratio;
        leaving = i;
      }
    }
    if (leaving < 0) return false;  // unbounded direction

    const double pivot = T(leaving, entering);
    T.row(leaving) /= pivot;
    rhs[leaving] /= pivot;
    for (int i = 0; i < m; ++i) {
      if (i == leaving) continue;
      const double factor = T(i, entering);
      if (factor == 0.0) continue;
      T.row(i) -= factor * T.row(leaving);
      rhs[i] -= factor * rhs[leaving];
    }
    basis[leaving] = entering;
  }
}

}  // namespace

LpResult lp_box_min(const Vector& c, const Vector& lo, const Vector& hi,
                    const Matrix& G, const Vector& h) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(G.rows());
  if (lo.size() != n || hi.size() != n || (m > 0 && G.cols() != n) || h.size() != m)
    throw ModelError("LP dimensions are inconsistent");
  for (int d = 0; d < n; ++d)
    if (hi[d] < lo[d]) return LpResult{LpResult::Status::Infeasible, 0.0, Vector()};

  // Shift to y = x - lo >= 0 and scale variables to O(1) boxes.
  Vector ub = hi - lo;
  Vector scale(n);
  for (int d = 0; d < n; ++d) scale[d] = std::max({std::abs(ub[d]), 1e-300});
  Vector hs = h - G * lo;

  // Standard form: [I S 0; Gs 0 -I] [y; s; t] = [ub/scale; hs_scaled].
  const int cols = 2 * n + m;
  const int rows = n + m;
  Matrix T = Matrix::Zero(rows, cols);
  Vector rhs(rows);
  for (int d = 0; d < n; ++d) {
    T(d, d) = 1.0;
    T(d, n + d) = 1.0;
    rhs[d] = ub[d] / scale[d];
  }
  for (int i = 0; i < m; ++i) {
    double row_scale = 1e-300;
    for (int d = 0; d < n; ++d) row_scale = std::max(row_scale, std::abs(G(i, d) * scale[d]));
    row_scale = std::max(row_scale, std::abs(hs[i]));
    for (int d = 0; d < n; ++d) T(n + i, d) = G(i, d) * scale[d] / row_scale;
    T(n + i, 2 * n + i) = -1.0;
    rhs[n + i] = hs[i] / row_scale;
  }
  for (int i = 0; i < rows; ++i) {
    if (rhs[i] < 0.0) {
      T.row(i) = -T.row(i);
      rhs[i] = -rhs[i];
    }
  }

  // Phase 1 with one artificial per row.
  const int total = cols + rows;
  Matrix T1 = Matrix::Zero(rows, total);
  T1.leftCols(cols) = T;
  for (int i = 0; i < rows; ++i) T1(i, cols + i) = 1.0;
  Vector c1 = Vector::Zero(total);
  c1.tail(rows).setOnes();
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) basis[i] = cols + i;
  std::vector<bool> allowed(total, true);
  if (!run_simplex(T1, rhs, c1, basis, allowed))
    throw SolverError("phase-1 simplex reported an unbounded auxiliary problem");

  double phase1 = 0.0;
  for (int i = 0; i < rows; ++i)
    if (basis[i] >= cols) phase1 += rhs[i];
  if (phase1 > kFeasTol) return LpResult{LpResult::Status::Infeasible, 0.0, Vector()};

  // Drive remaining zero-valued artificials out of the basis where possible.
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < cols) continue;
    int pivot_col = -1;
    for (int j = 0; j < cols; ++j) {
      if (std::abs(T1(i, j)) > kPivotTol) {
        pivot_col = j;
        break;
      }
    }
    if (pivot_col < 0) continue;  // redundant row; artificial stays basic at zero
    const double pivot = T1(i, pivot_col);
    T1.row(i) /= pivot;
    rhs[i] /= pivot;
    for (int r = 0; r < rows; ++r) {
      if (r == i) continue;
      const double factor = T1(r, pivot_col);
      if (factor == 0.0) continue;
      T1.row(r) -= factor * T1.row(i);
      rhs[r] -= factor * rhs[i];
    }
    basis[i] = pivot_col;
  }

  // Phase 2: original objective on the scaled y variables; artificials frozen.
  Vector c2 = Vector::Zero(total);
  double obj_scale = 1e-300;
  for (int d = 0; d < n; ++d) obj_scale = std::max(obj_scale, std::abs(c[d] * scale[d]));
  for (int d = 0; d < n; ++d) c2[d] = c[d] * scale[d] / obj_scale;
  std::vector<bool> allowed2(total, true);
  for (int j = cols; j < total; ++j) allowed2[j] = false;
  if (!run_simplex(T1, rhs, c2, basis, allowed2))
    return LpResult{LpResult::Status::Unbounded, 0.0, Vector()};

  Vector y = Vector::Zero(n);
  for (int i = 0; i < rows; ++i)
    if (basis[i] < n) y[basis[i]] = rhs[i];
  LpResult result;
  result.status = LpResult::Status::Optimal;
  result.x = lo + (y.array() * scale.array()).matrix();
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace rbfv
