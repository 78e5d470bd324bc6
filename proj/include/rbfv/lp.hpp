#pragma once

#include "rbfv/types.hpp"

namespace rbfv {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  double objective = 0.0;
  Vector x;
};

/// Minimizes c^T x over the box lo <= x <= hi subject to G x >= h, with a
/// dense two-phase simplex using Bland's rule (no cycling). Sized for the SCM
/// programs: tens of variables and constraints.
LpResult lp_box_min(const Vector& c, const Vector& lo, const Vector& hi,
                    const Matrix& G, const Vector& h);

}  // namespace rbfv
