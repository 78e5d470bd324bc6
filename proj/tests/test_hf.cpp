#include <doctest.h>

#include "rbfv/hf.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace rbfv;
using namespace rbfv::testing;

namespace {

/// All-Dirichlet 2-cell case used by the closed-form oracles.
struct TwoCellCase {
  Mesh mesh;
  MpfaStructure st;
  FluidRockProps props;
  HFOperator op;
};

TwoCellCase make_two_cell(double kappa) {
  TwoCellCase c;
  auto e = extents(0, 2, 0, 1, 0, 1);
  c.mesh = build_cartesian_mesh(2, 1, 1, e, whole_zone(e));
  tag_boundaries(c.mesh, {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"});
  c.st = MpfaStructure::build(c.mesh);
  c.props = no_gravity_props();
  c.op = assemble(c.mesh, c.st, uniform_kappa(kappa), c.props);
  return c;
}

/// Independent dense stepping from hand-built two-point matrices.
std::vector<Vector> dense_reference(const Matrix& M, const Matrix& A, const Vector& b,
                                    const Vector& p0, double dt, int n_steps) {
  std::vector<Vector> states{p0};
  Matrix lhs = M + dt * A;
  for (int n = 0; n < n_steps; ++n)
    states.push_back(lhs.fullPivLu().solve(M * states.back() + dt * b));
  return states;
}

}  // namespace

TEST_CASE("hydrostatic initialization") {
  auto e = extents(0, 1, 0, 1, -200, 0);
  Mesh mesh = build_cartesian_mesh(1, 1, 2, e, whole_zone(e));
  tag_boundaries(mesh, {"zmax"});
  FluidRockProps props;
  props.rho = 700.0;
  props.gravity = 9.81;
  props.z_D = mesh.cells[1].center[2];  // upper cell at z_D

  Vector p0 = hydrostatic_init(mesh, props);
  CHECK(p0[1] == doctest::Approx(props.p_D).epsilon(1e-14));
  // 100 m below z_D.
  CHECK(p0[0] == doctest::Approx(props.p_D + 700.0 * 9.81 * 100.0).epsilon(1e-14));

  // Cells at equal depth share the value.
  auto e2 = extents(0, 2, 0, 1, -1, 0);
  Mesh flat = build_cartesian_mesh(2, 1, 1, e2, whole_zone(e2));
  Vector q = hydrostatic_init(flat, props);
  CHECK(q[0] == q[1]);

  // Neumann face unknowns copy the adjacent cell.
  tag_boundaries(flat, {"zmax"});
  Vector q2 = hydrostatic_init(flat, props);
  for (int f : flat.neumann_faces())
    CHECK(q2[flat.neumann_index(f)] == q2[flat.faces[f].owner]);
}

TEST_CASE("primal solve") {
  SUBCASE("steady state is a fixed point") {
    auto c = make_two_cell(4e-13);
    Vector p0(2);
    p0 << 3.0e5, 1.7e5;
    HFOperator op = c.op;
    op.b = op.A * p0;  // makes p0 stationary
    Trajectory traj = solve_primal(op, 1000.0, 5, p0);
    for (const auto& p : traj.states) CHECK((p - p0).norm() <= 1e-10 * p0.norm());
  }

  SUBCASE("matches the dense closed-form reference over 20 steps") {
    auto c = make_two_cell(2.5e-13);
    const double lambda = 2.5e-13 / c.props.mu;
    const double T = lambda;        // interior face: area 1, dK+dL = 1
    const double tb = 2.0 * lambda; // boundary faces: area 1, d = 0.5
    Matrix A(2, 2);
    A << 5 * tb + T, -T, -T, 5 * tb + T;
    Matrix M = Matrix::Zero(2, 2);
    const double m = 1.0 * c.props.phi * c.props.ct;
    M(0, 0) = M(1, 1) = m;
    Vector b(2);
    b << 5 * tb * c.props.p_D, 5 * tb * c.props.p_D;

    Vector p0(2);
    p0 << 2.4e5, 0.9e5;
    const double dt = 86400.0;
    auto ref = dense_reference(M, A, b, p0, dt, 20);
    Trajectory traj = solve_primal(c.op, dt, 20, p0);
    for (int n = 0; n <= 20; ++n)
      CHECK((traj.states[n] - ref[n]).norm() <= 1e-10 * ref[n].norm());
  }

  SUBCASE("zero steps returns the initial state only") {
    auto c = make_two_cell(1e-13);
    Vector p0 = Vector::Constant(2, 1e5);
    Trajectory traj = solve_primal(c.op, 10.0, 0, p0);
    CHECK(traj.states.size() == 1);
    CHECK((traj.states[0] - p0).norm() == 0.0);
  }

  SUBCASE("dimension mismatch is rejected") {
    auto c = make_two_cell(1e-13);
    CHECK_THROWS_AS(solve_primal(c.op, 10.0, 1, Vector::Zero(5)), SolverError);
  }
}

TEST_CASE("dual solve") {
  SUBCASE("zero functional gives the zero dual") {
    auto c = make_two_cell(3e-13);
    HFOperator op = c.op;
    op.l = Vector::Zero(2);
    DualTrajectory dual = solve_dual(op, 500.0, 4);
    for (const auto& psi : dual.states) CHECK(psi.norm() == 0.0);
  }

  SUBCASE("terminal condition inverts the mass matrix on cells") {
    auto c = make_two_cell(3e-13);
    Vector v(2);
    v << 2.0, -5.0;
    HFOperator op = c.op;
    op.l = -(op.M * v);
    DualTrajectory dual = solve_dual(op, 500.0, 3);
    CHECK((dual.states[3] - v).norm() <= 1e-12 * v.norm());
  }

  SUBCASE("matches the dense backward recursion") {
    auto c = make_two_cell(2e-13);
    const int N = 6;
    const double dt = 3600.0;
    DualTrajectory dual = solve_dual(c.op, dt, N);

    Matrix M = Matrix(c.op.M);
    Matrix At = Matrix(c.op.A).transpose();
    Vector psi = Vector::Zero(2);
    for (int i = 0; i < 2; ++i) psi[i] = -c.op.l[i] / M(i, i);
    std::vector<Vector> ref(N + 1);
    ref[N] = psi;
    Matrix lhs = M + dt * At;
    for (int n = N - 1; n >= 0; --n) ref[n] = lhs.fullPivLu().solve(M * ref[n + 1]);
    for (int n = 0; n <= N; ++n)
      CHECK((dual.states[n] - ref[n]).norm() <=
            1e-10 * std::max(1.0, ref[n].norm()));
  }
}

TEST_CASE("QOI series") {
  auto c = make_two_cell(2e-13);

  SUBCASE("constant pressure, no gravity: all outputs vanish") {
    // l^T 1 = 0 for an interior QOI surface; emulate with l summing to zero.
    HFOperator op = c.op;
    op.l = Vector(2);
    op.l << 4.0, -4.0;
    op.c = 0.0;
    Trajectory traj;
    traj.dt = 1.0;
    traj.states.assign(4, Vector::Constant(2, 7e5));
    auto s = qoi_series(op, traj);
    for (double v : s) CHECK(std::abs(v) <= 1e-9 * 4.0 * 7e5);
  }

  SUBCASE("single step against a dense matvec") {
    HFOperator op = c.op;
    op.l = Vector(2);
    op.l << 1.5, -0.5;
    op.c = 3.25;
    Vector p0(2);
    p0 << 2e5, 1e5;
    Trajectory traj = solve_primal(op, 100.0, 1, p0);
    auto s = qoi_series(op, traj);
    REQUIRE(s.size() == 1);
    const double expected = op.l.dot(traj.states[1]) + op.c;
    CHECK(s[0] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("dual shift") {
  auto c = make_two_cell(1e-13);
  const int N = 3;
  DualTrajectory dual = solve_dual(c.op, 100.0, N);

  SUBCASE("n = N is the identity map") {
    auto s = shift_dual(dual, N);
    REQUIRE(static_cast<int>(s.size()) == N + 1);
    for (int m = 0; m <= N; ++m) CHECK((s[m] - dual.states[m]).norm() == 0.0);
  }

  SUBCASE("n = 0 returns the terminal state only") {
    auto s = shift_dual(dual, 0);
    REQUIRE(s.size() == 1);
    CHECK((s[0] - dual.states[N]).norm() == 0.0);
  }

  SUBCASE("n = 1 on N = 3 gives (Psi^2, Psi^3)") {
    auto s = shift_dual(dual, 1);
    REQUIRE(s.size() == 2);
    CHECK((s[0] - dual.states[2]).norm() == 0.0);
    CHECK((s[1] - dual.states[3]).norm() == 0.0);
  }

  SUBCASE("out-of-range horizon is rejected") {
    CHECK_THROWS_AS(shift_dual(dual, N + 1), ModelError);
    CHECK_THROWS_AS(shift_dual(dual, -1), ModelError);
  }
}

TEST_CASE("shift equivalence against the per-horizon dual problem") {
  auto e = extents(0, 4, 0, 1, -1, 0);
  Mesh mesh = build_cartesian_mesh(4, 1, 1, e, whole_zone(e));
  tag_boundaries(mesh, {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"});
  select_gamma_int(mesh, Box3{Vec3(1, 0.1, -0.9), Vec3(3, 0.9, -0.1)});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props;
  HFOperator op = assemble(mesh, st, uniform_kappa(3e-13), props);

  const int N = 5;
  const double dt = 43200.0;
  DualTrajectory dual = solve_dual(op, dt, N);

  Matrix M = Matrix(op.M);
  Matrix lhs = M + dt * Matrix(op.A).transpose();
  for (int n = 0; n <= N; ++n) {
    // Direct per-horizon solve: M psi_n^n = -l, then backward to m = 0.
    std::vector<Vector> psi(n + 1);
    Vector terminal(op.size());
    for (int i = 0; i < op.size(); ++i) terminal[i] = -op.l[i] / M(i, i);
    psi[n] = terminal;
    for (int m = n - 1; m >= 0; --m) psi[m] = lhs.fullPivLu().solve(M * psi[m + 1]);

    auto shifted = shift_dual(dual, n);
    for (int m = 0; m <= n; ++m)
      CHECK((shifted[m] - psi[m]).norm() <= 1e-10 * std::max(1.0, psi[m].norm()));
  }
}

TEST_CASE("implicit Euler dissipates the discrete energy without sources") {
  auto e = extents(0, 3, 0, 3, -1, 0);
  Mesh mesh = build_cartesian_mesh(3, 3, 1, e, whole_zone(e));
  tag_boundaries(mesh, {"zmax"});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props;
  HFOperator op = assemble(mesh, st, uniform_kappa(4e-13), props);
  op.b = Vector::Zero(op.size());  // sources and boundary data off

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Vector p0(op.size());
    for (int i = 0; i < op.size(); ++i) p0[i] = u(rng);
    Trajectory traj = solve_primal(op, 5e4, 10, p0);
    double prev = traj.states[0].dot(op.M * traj.states[0]);
    for (int n = 1; n <= 10; ++n) {
      double cur = traj.states[n].dot(op.M * traj.states[n]);
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
}
