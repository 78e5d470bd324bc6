#pragma once

#include "rbfv/eim.hpp"
#include "rbfv/energy.hpp"
#include "rbfv/sampling.hpp"

namespace rbfv {

struct ScmOptions {
  int m1 = 5;
  int m2 = 5;
  double tol = 1e-4;
  int max_iterations = 200;
  bool clamp_nonnegative = true;  // valid when the flux block is known PSD
  int dense_guard = 5000;
};

/// Certified coercivity bounds for alpha_{A_sym}(xi) = min eig(A_sym(xi), G).
/// Everything stored is independent of the HF dimension.
struct ScmModel {
  Vector box_lo, box_hi;               // per affine term: eigenvalue ranges of (A_d, G)
  Matrix w_ub;                         // selected Rayleigh-quotient vectors (rows)
  Matrix selected_theta;               // theta(xi_j) rows
  Vector alpha_at_selected;
  std::vector<ParameterPoint> selected;
  std::vector<ParameterPoint> training;
  Matrix training_theta;               // theta rows for the whole training set
  Vector training_lb;                  // final lower bounds over the training set
  std::vector<char> selected_mask;     // per training point
  int m1 = 5;
  int m2 = 5;
  double tol = 1e-4;
  double final_max_gap = 0.0;
  bool clamp_nonnegative = true;

  int constraint_count() const { return static_cast<int>(w_ub.rows()); }

  double alpha_ub(const Vector& theta) const;
  double alpha_lb(const ParameterPoint& xi, const Vector& theta) const;
};

/// Greedy SCM training: one exact generalized eigensolve per selected point,
/// LP lower bounds everywhere else, until the relative gap
/// (UB - LB) / UB is at most `tol` over the training set.
ScmModel scm_train(const AffineModel& affine, const EnergyMatrix& gstar,
                   const std::vector<ParameterPoint>& training, const ScmOptions& options);

}  // namespace rbfv
