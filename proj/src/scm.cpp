#include "rbfv/scm.hpp"

#include "rbfv/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbfv {

namespace {

double gap_ratio(double ub, double lb, double box_scale) {
  const double denom = std::max(std::abs(ub), 1e-16 * box_scale);
  return (ub - lb) / std::max(denom, 1e-300);
}

/// Indices of the `count` nearest points to xi (log-distance), smallest first.
std::vector<int> nearest_points(const ParameterPoint& xi,
                                const std::vector<ParameterPoint>& pool,
                                const std::vector<int>& candidates, int count) {
  std::vector<int> order = candidates;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return log_distance(xi, pool[a]) < log_distance(xi, pool[b]);
  });
  if (static_cast<int>(order.size()) > count) order.resize(count);
  return order;
}

double box_lower_bound(const Vector& theta, const Vector& lo, const Vector& hi) {
  double v = 0.0;
  for (int d = 0; d < theta.size(); ++d)
    v += theta[d] >= 0.0 ? theta[d] * lo[d] : theta[d] * hi[d];
  return v;
}

struct LbProblem {
  Matrix G;
  Vector h;
};

double solve_lb(const Vector& theta, const Vector& lo, const Vector& hi,
                const LbProblem& prob, double box_scale) {
  LpResult r = lp_box_min(theta, lo, hi, prob.G, prob.h);
  if (r.status == LpResult::Status::Infeasible)
    throw SolverError("SCM lower-bound LP infeasible; W_UB points are always feasible");
  if (r.status == LpResult::Status::Unbounded)
    return box_lower_bound(theta, lo, hi);  // box bound fallback
  (void)box_scale;
  return r.objective;
}

}  // namespace

double ScmModel::alpha_ub(const Vector& theta) const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < w_ub.rows(); ++j) best = std::min(best, theta.dot(w_ub.row(j)));
  return best;
}

double ScmModel::alpha_lb(const ParameterPoint& xi, const Vector& theta) const {
  // Constraints: exact alpha at the m1 nearest selected points, cached lower
  // bounds at the m2 nearest unselected training points.
  std::vector<int> sel_idx(selected.size());
  std::iota(sel_idx.begin(), sel_idx.end(), 0);
  std::vector<int> sel = nearest_points(xi, selected, sel_idx, m1);

  std::vector<int> unsel_candidates;
  for (int i = 0; i < static_cast<int>(training.size()); ++i)
    if (!selected_mask[i]) unsel_candidates.push_back(i);
  std::vector<int> unsel = nearest_points(xi, training, unsel_candidates, m2);

  const int rows = static_cast<int>(sel.size() + unsel.size());
  Matrix G(rows, theta.size());
  Vector h(rows);
  int r = 0;
  for (int j : sel) {
    G.row(r) = selected_theta.row(j);
    h[r++] = alpha_at_selected[j];
  }
  for (int i : unsel) {
    G.row(r) = training_theta.row(i);
    h[r++] = training_lb[i];
  }
  const double box_scale =
      std::max(box_lo.cwiseAbs().maxCoeff(), box_hi.cwiseAbs().maxCoeff());
  double lb = solve_lb(theta, box_lo, box_hi, {std::move(G), std::move(h)}, box_scale);
  if (clamp_nonnegative) lb = std::max(lb, 0.0);
  return lb;
}

ScmModel scm_train(const AffineModel& affine, const EnergyMatrix& gstar,
                   const std::vector<ParameterPoint>& training, const ScmOptions& options) {
  if (training.empty()) throw ModelError("SCM requires a non-empty training set");
  const int D = affine.term_count();
  const int L = static_cast<int>(training.size());

  ScmModel model;
  model.m1 = options.m1;
  model.m2 = options.m2;
  model.tol = options.tol;
  model.clamp_nonnegative = options.clamp_nonnegative;
  model.training = training;
  model.selected_mask.assign(L, 0);

  model.training_theta.resize(L, D);
  for (int i = 0; i < L; ++i) model.training_theta.row(i) = affine.theta(training[i]);

  // Constraint box: eigenvalue range of every affine term against G.
  model.box_lo.resize(D);
  model.box_hi.resize(D);
  for (int d = 0; d < D; ++d) {
    auto [lo, hi] =
        eigenvalue_range(symmetric_part(affine.A_d[d]), gstar, options.dense_guard);
    model.box_lo[d] = lo;
    model.box_hi[d] = hi;
  }
  const double box_scale =
      std::max(model.box_lo.cwiseAbs().maxCoeff(), model.box_hi.cwiseAbs().maxCoeff());

  // Previous-round lower bounds start from the box bound.
  Vector lb_prev(L);
  for (int i = 0; i < L; ++i)
    lb_prev[i] = box_lower_bound(model.training_theta.row(i), model.box_lo, model.box_hi);

  auto add_selected = [&](int idx) {
    const ParameterPoint& xi = training[idx];
    Vector theta = model.training_theta.row(idx);
    SparseMatrix A_sym = symmetric_part(affine.assemble_A(theta));
    auto [alpha, v] = exact_alpha_with_vector(A_sym, gstar, options.dense_guard);
    const double vnorm2 = gstar.inner(v, v);
    Vector w(D);
    for (int d = 0; d < D; ++d) w[d] = v.dot(affine.A_d[d] * v) / vnorm2;

    const int j = model.constraint_count();
    model.w_ub.conservativeResize(j + 1, D);
    model.w_ub.row(j) = w;
    model.selected_theta.conservativeResize(j + 1, D);
    model.selected_theta.row(j) = theta;
    model.alpha_at_selected.conservativeResize(j + 1);
    model.alpha_at_selected[j] = alpha;
    model.selected.push_back(xi);
    model.selected_mask[idx] = 1;
  };

  add_selected(0);

  Vector ub(L);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Vector lb_cur(L);
    double max_gap = 0.0;
    int worst = -1;
    model.training_lb = lb_prev;  // constraints reference the previous round
    for (int i = 0; i < L; ++i) {
      ub[i] = model.alpha_ub(model.training_theta.row(i));
      double lb = model.alpha_lb(training[i], model.training_theta.row(i));
      lb = std::max(lb, lb_prev[i]);  // both are valid lower bounds
      lb_cur[i] = lb;
      const double gap = gap_ratio(ub[i], lb, box_scale);
      if (!model.selected_mask[i] && gap > max_gap) {
        max_gap = gap;
        worst = i;
      }
    }
    lb_prev = lb_cur;
    model.final_max_gap = max_gap;
    if (max_gap <= options.tol || worst < 0) break;
    add_selected(worst);
  }

  model.training_lb = lb_prev;
  return model;
}

}  // namespace rbfv
