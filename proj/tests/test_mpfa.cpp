#include <doctest.h>

#include "rbfv/mpfa.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace rbfv;
using namespace rbfv::testing;

TEST_CASE("harmonic averaging point") {
  auto e = extents(0, 2, 0, 1, 0, 1);
  Mesh mesh = build_cartesian_mesh(2, 1, 1, e, whole_zone(e));
  int interior = -1;
  for (int f = 0; f < mesh.face_count(); ++f)
    if (mesh.faces[f].neighbor >= 0) interior = f;
  REQUIRE(interior >= 0);

  SUBCASE("equal mobilities and distances give the face midpoint") {
    auto hp = harmonic_point(mesh, interior, 3.0, 3.0);
    CHECK(hp.omega_owner == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hp.omega_neighbor == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hp.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("2:1 mobility ratio gives 2/3-1/3 weights") {
    auto hp = harmonic_point(mesh, interior, 2.0, 1.0);
    CHECK(hp.omega_owner == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(hp.omega_neighbor == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }

  SUBCASE("vanishing neighbor mobility pins the point to y_K") {
    auto hp = harmonic_point(mesh, interior, 1.0, 1e-300);
    CHECK(hp.omega_owner == doctest::Approx(1.0).epsilon(1e-12));
    // y_K: projection of the owner center onto the face plane.
    CHECK((hp.x - Vec3(1.0, 0.5, 0.5)).norm() <= 1e-12);
  }

  SUBCASE("both mobilities zero is a singular face") {
    CHECK_THROWS_AS(harmonic_point(mesh, interior, 0.0, 0.0), SolverError);
  }
}

TEST_CASE("conormal decomposition") {
  // Unit-cube cell centered at the origin: six face directions.
  std::vector<Vec3> candidates = {Vec3(0.5, 0, 0),  Vec3(-0.5, 0, 0), Vec3(0, 0.5, 0),
                                  Vec3(0, -0.5, 0), Vec3(0, 0, 0.5),  Vec3(0, 0, -0.5)};

  SUBCASE("axis-aligned isotropic target uses a single face") {
    const double lambda = 2.5;
    auto dec = conormal_decomposition(Vec3(lambda, 0, 0), candidates);
    REQUIRE(dec.stencil.size() == 1);
    CHECK(dec.stencil[0] == 0);
    CHECK(dec.alpha[0] == doctest::Approx(lambda / 0.5).epsilon(1e-12));
    CHECK(dec.residual <= 1e-9);
  }

  SUBCASE("zero mobility gives the empty decomposition") {
    auto dec = conormal_decomposition(Vec3::Zero(), candidates);
    CHECK(dec.stencil.empty());
  }

  SUBCASE("random SPD targets close within tolerance") {
    std::mt19937_64 rng(7);
    auto u = [&] { return std::uniform_real_distribution<double>(-1, 1)(rng); };
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::Matrix3d B;
      B << u(), u(), u(), u(), u(), u(), u(), u(), u();
      Eigen::Matrix3d spd = B * B.transpose() + Eigen::Matrix3d::Identity() * 0.1;
      Vec3 n(u(), u(), u());
      n.normalize();
      Vec3 target = spd * n;
      auto dec = conormal_decomposition(target, candidates);
      Vec3 sum = Vec3::Zero();
      for (std::size_t i = 0; i < dec.stencil.size(); ++i)
        sum += dec.alpha[i] * candidates[dec.stencil[i]];
      CHECK((sum - target).norm() <= 1e-9 * target.norm());
      // Axis-aligned candidates admit an all-nonnegative decomposition.
      for (double a : dec.alpha) CHECK(a >= -1e-12);
    }
  }

  SUBCASE("candidates that do not span the target are rejected") {
    std::vector<Vec3> planar = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 1, 0)};
    CHECK_THROWS_AS(conormal_decomposition(Vec3(0, 0, 1), planar), AssemblyError);
  }
}

TEST_CASE("Peaceman well index") {
  SUBCASE("isotropic equivalent radius") {
    const double h = 50.0;
    CHECK(peaceman_radius(1.0, 1.0, h, h) ==
          doctest::Approx(0.14 * std::sqrt(2.0) * h).epsilon(1e-14));
  }
  SUBCASE("direct evaluation with unit mobility") {
    const double re = peaceman_radius(1.0, 1.0, 1.0, 1.0);
    const double wi = well_index(1.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.0);
    CHECK(wi == doctest::Approx(2.0 * 3.14159265358979323846 / std::log(re / 0.1))
                    .epsilon(1e-14));
  }
  SUBCASE("vanishing mobility removes the well") {
    CHECK(well_index(0.0, 1.0, 1.0, 1.0, 1.0, 0.1, 0.0) == 0.0);
  }
  SUBCASE("well radius exceeding the Peaceman radius is rejected") {
    CHECK_THROWS_AS(well_index(1.0, 1.0, 1.0, 1.0, 1.0, 5.0, 0.0), ConfigError);
  }
}

TEST_CASE("two-cell assembly reduces to two-point transmissibilities") {
  auto e = extents(0, 2, 0, 1, 0, 1);
  Mesh mesh = build_cartesian_mesh(2, 1, 1, e, whole_zone(e));
  tag_boundaries(mesh, {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"});
  MpfaStructure st = MpfaStructure::build(mesh);

  FluidRockProps props = no_gravity_props();
  const double kappa = 3e-13;
  const double lambda = kappa / props.mu;
  HFOperator op = assemble(mesh, st, uniform_kappa(kappa), props);

  // Hand-assembled transmissibilities: interior T = lambda*|s|/(dK+dL); every
  // boundary face of the 1x1x1 cells has area 1 and distance 0.5.
  const double T = lambda * 1.0 / (0.5 + 0.5);
  const double tb = lambda * 1.0 / 0.5;
  Matrix expected(2, 2);
  expected << 5 * tb + T, -T, -T, 5 * tb + T;

  Matrix A = Matrix(op.A);
  REQUIRE(A.rows() == 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(A(i, j) == doctest::Approx(expected(i, j)).epsilon(1e-12));
  // Dirichlet data: b = sum of boundary transmissibilities times p_D.
  CHECK(op.b[0] == doctest::Approx(5 * tb * props.p_D).epsilon(1e-12));
}

TEST_CASE("assembly is linear in a uniform permeability") {
  auto e = extents(0, 4, 0, 2, -2, 0);
  Mesh mesh = build_cartesian_mesh(4, 2, 2, e, whole_zone(e));
  tag_boundaries(mesh, {"zmax"});
  select_perforations(mesh, Box3{Vec3(1, 0.4, -1.6), Vec3(2.2, 1.6, -0.4)});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props;

  HFOperator op1 = assemble(mesh, st, uniform_kappa(2e-13), props);
  HFOperator op2 = assemble(mesh, st, uniform_kappa(4e-13), props);
  Matrix d = Matrix(op2.A) - 2.0 * Matrix(op1.A);
  CHECK(d.cwiseAbs().maxCoeff() <= 1e-12 * Matrix(op1.A).cwiseAbs().maxCoeff());
}

TEST_CASE("Neumann face rows: structure") {
  auto e = extents(0, 2, 0, 1, 0, 1);
  Mesh mesh = build_cartesian_mesh(2, 1, 1, e, whole_zone(e));
  tag_boundaries(mesh, {"xmin"});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props = no_gravity_props();
  HFOperator op = assemble(mesh, st, uniform_kappa(1e-13), props);

  REQUIRE(op.n_face_unknowns == mesh.neumann_count());
  Matrix M = Matrix(op.M);
  Matrix A = Matrix(op.A);
  for (int f : mesh.neumann_faces()) {
    const int row = mesh.neumann_index(f);
    CHECK(M.row(row).cwiseAbs().maxCoeff() == 0.0);
    CHECK(M.col(row).cwiseAbs().maxCoeff() == 0.0);
    // Row enforces zero flux: diagonal entry positive, owner coupling negative.
    CHECK(A(row, row) > 0.0);
    CHECK(A(row, mesh.faces[f].owner) < 0.0);
    CHECK(A(row, row) == doctest::Approx(-A(row, mesh.faces[f].owner)).epsilon(1e-12));
  }
}

TEST_CASE("QOI functional") {
  auto e = extents(0, 5, 0, 5, 0, 5);
  Mesh mesh = build_cartesian_mesh(5, 5, 5, e, whole_zone(e));
  tag_boundaries(mesh, {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"});
  Box3 box{Vec3(1, 1, 1), Vec3(4, 4, 4)};
  select_gamma_int(mesh, box);
  MpfaStructure st = MpfaStructure::build(mesh);

  SUBCASE("uniform pressure gives zero flux") {
    FluidRockProps props = no_gravity_props();
    HFOperator op = assemble(mesh, st, uniform_kappa(1e-13), props);
    Vector ones = Vector::Ones(op.size());
    CHECK(std::abs(op.l.dot(ones)) <= 1e-12 * op.l.cwiseAbs().sum());
    CHECK(op.c == 0.0);
  }

  SUBCASE("linear field against the analytic Darcy flux on one side") {
    // Restrict gamma to the +x patch of the box surface.
    std::vector<int> plus_x;
    for (int f : mesh.gamma_int_faces)
      if (std::abs(mesh.faces[f].center[0] - 4.0) < 1e-9) plus_x.push_back(f);
    REQUIRE(plus_x.size() == 9);
    mesh.gamma_int_faces = plus_x;

    FluidRockProps props = no_gravity_props();
    const double kappa = 2e-13;
    const double lambda = kappa / props.mu;
    HFOperator op = assemble(mesh, st, uniform_kappa(kappa), props);

    Vector p(op.size());
    for (int c = 0; c < mesh.cell_count(); ++c) p[c] = mesh.cells[c].center[0];
    const double s = op.l.dot(p) + op.c;
    const double expected = -lambda * 9.0;  // projected area of the patch onto x
    CHECK(s == doctest::Approx(expected).epsilon(1e-9));
  }

  SUBCASE("hydrostatic equilibrium gives zero flux with gravity") {
    FluidRockProps props;  // gravity on
    Mesh m2 = build_cartesian_mesh(5, 5, 5, extents(0, 5, 0, 5, -5, 0), whole_zone(extents(0, 5, 0, 5, -5, 0)));
    tag_boundaries(m2, {"zmax"});
    select_gamma_int(m2, Box3{Vec3(1, 1, -4), Vec3(4, 4, -1)});
    MpfaStructure st2 = MpfaStructure::build(m2);
    HFOperator op = assemble(m2, st2, ParameterPoint{3e-13, 5e-16}, props);

    Vector p(op.size());
    const double rho_g = props.rho * props.gravity;
    for (int c = 0; c < m2.cell_count(); ++c)
      p[c] = props.p_D - rho_g * (m2.cells[c].center[2] - props.z_D);
    for (int f : m2.neumann_faces())
      p[m2.neumann_index(f)] = props.p_D - rho_g * (m2.faces[f].center[2] - props.z_D);

    const double scale = op.l.cwiseAbs().maxCoeff() * p.cwiseAbs().maxCoeff();
    CHECK(std::abs(op.l.dot(p) + op.c) <= 1e-9 * scale);
    // The hydrostatic state is also a steady state of the well-free system.
    CHECK((op.A * p - op.b).norm() <= 1e-9 * op.b.norm());
  }
}

TEST_CASE("coefficient vector") {
  auto e = extents(0, 4, 0, 2, -2, 0);
  Mesh mesh = build_cartesian_mesh(4, 2, 2, e,
                                   zone_box(Vec3(0, 0, -1), Vec3(4, 2, 0)));
  tag_boundaries(mesh, {"zmax"});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props;

  SUBCASE("uniform kappa scales the whole vector") {
    Vector v1 = st.coefficient_vector(props, uniform_kappa(1e-13));
    Vector v2 = st.coefficient_vector(props, uniform_kappa(2e-13));
    CHECK((v2 - 2.0 * v1).cwiseAbs().maxCoeff() <= 1e-12 * v1.cwiseAbs().maxCoeff());
  }

  SUBCASE("interpolation weights extracted from the vector sum to one") {
    Vector v = st.coefficient_vector(props, ParameterPoint{4e-13, 3e-16});
    for (std::size_t h = 0; h < st.half_faces.size(); ++h) {
      for (std::size_t t = 0; t < st.half_faces[h].stencil.size(); ++t) {
        const auto& ref = st.term_refs[h][t];
        if (ref.aw_owner_idx < 0) continue;
        const double alpha = v[ref.alpha_idx];
        const double sum = v[ref.aw_owner_idx] + v[ref.aw_neighbor_idx];
        CHECK(sum == doctest::Approx(alpha).epsilon(1e-12));
      }
    }
  }

  SUBCASE("deterministic across repeated evaluations") {
    ParameterPoint xi{7.7e-13, 9.9e-17};
    Vector v1 = st.coefficient_vector(props, xi);
    Vector v2 = st.coefficient_vector(props, xi);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("patch test: affine fields reproduce exact fluxes") {
  auto e = extents(0, 2, 0, 1.5, -1, 0);
  Mesh mesh = build_cartesian_mesh(4, 3, 2, e, whole_zone(e));
  tag_boundaries(mesh, {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props = no_gravity_props();
  const double kappa = 5e-13;
  const double lambda = kappa / props.mu;
  Vector coeffs = st.coefficient_vector(props, uniform_kappa(kappa));

  const Vec3 grad(7.0, -3.0, 2.0);
  Vector p(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c)
    p[c] = grad.dot(mesh.cells[c].center) + 11.0;

  for (int f = 0; f < mesh.face_count(); ++f) {
    const Face& face = mesh.faces[f];
    if (face.neighbor < 0) continue;
    auto fl = averaged_flux(mesh, st, coeffs, props, f, p);
    const double exact = -lambda * grad.dot(face.normal) * face.area;
    CHECK(fl.owner_side == doctest::Approx(exact).epsilon(1e-9));
    // Conservation is exact by construction.
    CHECK(fl.owner_side + fl.neighbor_side == 0.0);
  }
}

TEST_CASE("assembled symmetric part is positive semidefinite on sampled parameters") {
  auto e = extents(0, 4, 0, 4, -2, 0);
  Mesh mesh = build_cartesian_mesh(4, 4, 2, e,
                                   zone_box(Vec3(0, 0, -1), Vec3(4, 4, 0)));
  tag_boundaries(mesh, {"zmax"});
  select_perforations(mesh, Box3{Vec3(1.2, 1.2, -1.8), Vec3(2.8, 2.8, -0.2)});
  MpfaStructure st = MpfaStructure::build(mesh);
  FluidRockProps props;

  for (ParameterPoint xi : {ParameterPoint{1e-13, 1e-17}, ParameterPoint{1e-12, 1e-15},
                            ParameterPoint{3.3e-13, 4.7e-16}}) {
    HFOperator op = assemble(mesh, st, xi, props);
    Matrix As = 0.5 * (Matrix(op.A) + Matrix(op.A).transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(As);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * As.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("fluid/rock property validation") {
  FluidRockProps props;
  props.mu = -1.0;
  CHECK_THROWS_AS(props.validate(), ConfigError);
  FluidRockProps ok;
  CHECK_NOTHROW(ok.validate());
}
