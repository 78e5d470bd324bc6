#pragma once

#include "rbfv/mesh.hpp"
#include "rbfv/types.hpp"

namespace rbfv {

/// Fluid/rock constants (SI units).
struct FluidRockProps {
  double mu = 1.5e-5;      // Pa*s
  double ct = 1.4e-7;      // 1/Pa
  double phi = 0.2;        // -
  double rho = 700.0;      // kg/m^3
  double gravity = 9.81;   // m/s^2
  double p_bh = 4.13e7;    // Pa
  double z_bh = 0.0;       // m
  double r_w = 0.1;        // m
  double skin = 0.0;       // -
  double p_D = 1e5;        // Pa
  double z_D = 80.0;       // m

  void validate() const;
};

/// Two-zone permeability parameter (m^2).
struct ParameterPoint {
  double kappa1 = 0.0;
  double kappa2 = 0.0;

  double kappa(int zone) const { return zone == 1 ? kappa1 : kappa2; }
};

/// Per-cell scalar mobility kappa_zone / mu.
inline double mobility(const FluidRockProps& props, const ParameterPoint& xi, int zone) {
  return xi.kappa(zone) / props.mu;
}

struct HarmonicPoint {
  Vec3 x = Vec3::Zero();
  double omega_owner = 0.0;
  double omega_neighbor = 0.0;
};

/// Harmonic averaging interpolation point of an interior face for isotropic
/// per-cell mobilities (the tensor correction vectors vanish; the general
/// formula adds (dK dL)/(dL tauK + dK tauL) * (tauvecK - tauvecL)).
HarmonicPoint harmonic_point(const Mesh& mesh, int face, double lambda_owner,
                             double lambda_neighbor);

struct ConormalDecomposition {
  std::vector<int> stencil;    // candidate indices with nonzero coefficient
  std::vector<double> alpha;
  double residual = 0.0;       // relative to |target|
};

/// Expresses `target` as sum alpha_i * candidates[i] over a small stencil.
/// Preference order among decompositions with relative residual <= rel_tol:
/// all-nonnegative coefficients, then smallest stencil, then minimal
/// coefficient sum, then lexicographically smallest index set. Stencils up to
/// size 3 are enumerated exactly; a least-squares solve over all candidates is
/// the fallback.
ConormalDecomposition conormal_decomposition(const Vec3& target,
                                             const std::vector<Vec3>& candidates,
                                             double rel_tol = 1e-9);

/// Peaceman equivalent radius for diagonal mobilities (l1, l2) and horizontal
/// cell sizes (h1, h2).
double peaceman_radius(double l1, double l2, double h1, double h2);

/// Peaceman well index 2*pi*h3*sqrt(l1 l2) / (ln(re/rw) + skin).
double well_index(double l1, double l2, double h1, double h2, double h3,
                  double r_w, double skin);

/// Parameter-independent MPFA skeleton: face interpolation nodes, per
/// half-face conormal stencils at unit mobility (alpha(xi) = Lambda_K * beta on
/// the generated Cartesian meshes, where the nodes do not move with xi), and
/// the canonical layout of the scheme's coefficient vector
/// v = ((alpha)..., (alpha*omega)...).
class MpfaStructure {
 public:
  struct StencilTerm {
    int face = -1;
    double beta = 0.0;
  };

  struct HalfFace {
    int cell = -1;
    int face = -1;
    std::vector<StencilTerm> stencil;
  };

  /// Everything needed to evaluate one coefficient-vector entry from
  /// (kappa1, kappa2) without the mesh; persisted for the online stage.
  struct CoeffDescriptor {
    int kind = 0;        // 0: alpha, 1: alpha*omega
    double beta = 0.0;
    int zone_cell = 1;   // zone of the half-face cell
    int side = 0;        // kind 1: 0 = owner weight, 1 = neighbor weight
    double d_own = 0.0;  // stencil-face distances (kind 1)
    double d_nbr = 0.0;
    int zone_own = 1;
    int zone_nbr = 1;
  };

  struct TermRef {
    int alpha_idx = -1;
    int aw_owner_idx = -1;     // -1 unless the stencil face is interior
    int aw_neighbor_idx = -1;
  };

  std::vector<HalfFace> half_faces;                 // cell-major, E_K order
  std::vector<std::vector<TermRef>> term_refs;      // parallel to half_faces
  std::vector<Vec3> face_node;                      // interpolation node per face
  std::vector<int> owner_half_face;                 // face -> owner-side half-face
  std::vector<int> neighbor_half_face;              // face -> neighbor-side (-1 boundary)
  std::vector<CoeffDescriptor> descriptors;         // v entry evaluators
  int n_alpha = 0;
  int n_alphaomega = 0;

  int coefficient_count() const { return n_alpha + n_alphaomega; }

  static MpfaStructure build(const Mesh& mesh, double rel_tol = 1e-9);

  /// One coefficient-vector entry; shared by the offline snapshot builder and
  /// the online interpolation-index evaluator so both produce identical values.
  static double entry_value(const CoeffDescriptor& d, const FluidRockProps& props,
                            const ParameterPoint& xi);

  /// Full coefficient vector v(xi) in the canonical layout.
  Vector coefficient_vector(const FluidRockProps& props, const ParameterPoint& xi) const;
};

/// Flux-derived pieces of the discrete system, linear in the coefficient
/// vector: stiffness block, load constants, and the QOI pair (l, c).
struct FluxParts {
  SparseMatrix A;
  Vector b;
  Vector l;
  double c = 0.0;
};

/// Assembles A, b, l, c from coefficient-vector values in the canonical
/// layout. Called with v(xi) for the direct operator and with EIM basis
/// vectors for the parameter-independent affine terms.
FluxParts assemble_flux_parts(const Mesh& mesh, const MpfaStructure& structure,
                              const Vector& coeffs, const FluidRockProps& props);

/// Both one-sided averaged fluxes of a face, evaluated on a full state vector
/// (cells + Neumann face unknowns). For interior faces F_owner = -F_neighbor
/// exactly by construction; boundary faces only carry the owner flux.
struct FaceFluxes {
  double owner_side = 0.0;
  double neighbor_side = 0.0;
};

FaceFluxes averaged_flux(const Mesh& mesh, const MpfaStructure& structure,
                         const Vector& coeffs, const FluidRockProps& props, int face,
                         const Vector& p);

/// Peaceman well contribution for one zone; the actual well index is
/// kappa_zone times these entries.
struct WellTerm {
  int zone = 1;
  std::vector<std::pair<int, double>> a_diag;     // (cell row, WI / kappa)
  std::vector<std::pair<int, double>> b_entries;  // (cell row, rhs / kappa)
};

std::vector<WellTerm> well_terms(const Mesh& mesh, const FluidRockProps& props);

/// Full HF operator for one parameter: (M + dt A) p^{n+1} = M p^n + dt b,
/// s^{n+1} = l^T p^{n+1} + c.
struct HFOperator {
  SparseMatrix A;
  SparseMatrix M;
  Vector b;
  Vector l;
  double c = 0.0;
  int n_cells = 0;
  int n_face_unknowns = 0;

  int size() const { return n_cells + n_face_unknowns; }
};

SparseMatrix mass_matrix(const Mesh& mesh, const FluidRockProps& props);

HFOperator assemble(const Mesh& mesh, const MpfaStructure& structure,
                    const ParameterPoint& xi, const FluidRockProps& props);

}  // namespace rbfv
