#include "rbfv/mpfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rbfv {

void FluidRockProps::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw ConfigError(std::string("physics parameter '") + name + "' must be positive");
  };
  positive(mu, "mu");
  positive(ct, "ct");
  positive(phi, "phi");
  positive(rho, "rho");
  positive(gravity, "g");
  positive(r_w, "r_w");
}

HarmonicPoint harmonic_point(const Mesh& mesh, int face, double lambda_owner,
                             double lambda_neighbor) {
  const Face& f = mesh.faces[face];
  if (f.neighbor < 0)
    throw AssemblyError("harmonic point requested on a boundary face");
  const double tau_k = lambda_owner;
  const double tau_l = lambda_neighbor;
  const double denom = f.d_neighbor * tau_k + f.d_owner * tau_l;
  if (denom <= 0.0)
    throw SolverError("singular face: both mobilities vanish");
  HarmonicPoint hp;
  hp.omega_owner = f.d_neighbor * tau_k / denom;
  hp.omega_neighbor = f.d_owner * tau_l / denom;
  const Vec3 y_k = mesh.cells[f.owner].center + f.d_owner * f.normal;
  const Vec3 y_l = mesh.cells[f.neighbor].center - f.d_neighbor * f.normal;
  hp.x = hp.omega_owner * y_k + hp.omega_neighbor * y_l;
  return hp;
}

namespace {

struct Candidate {
  std::vector<int> subset;
  std::vector<double> alpha;
  double residual = 0.0;
  bool nonnegative = false;
  double alpha_sum = 0.0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.nonnegative != b.nonnegative) return a.nonnegative;
  if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
  if (a.alpha_sum != b.alpha_sum) return a.alpha_sum < b.alpha_sum;
  return a.subset < b.subset;
}

bool solve_subset(const Vec3& target, const std::vector<Vec3>& candidates,
                  const std::vector<int>& subset, Candidate& out) {
  const int m = static_cast<int>(subset.size());
  Eigen::Matrix<double, 3, Eigen::Dynamic> C(3, m);
  for (int i = 0; i < m; ++i) C.col(i) = candidates[subset[i]];
  Eigen::VectorXd alpha;
  if (m == 3) {
    Eigen::Matrix3d sq = C;
    if (std::abs(sq.determinant()) < 1e-12 * std::pow(C.colwise().norm().maxCoeff(), 3))
      return false;
    alpha = sq.partialPivLu().solve(target);
  } else {
    // Exact solve iff target lies in the span; normal equations suffice here.
    Eigen::MatrixXd G = C.transpose() * C;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (lu.rank() < m) return false;
    alpha = lu.solve(C.transpose() * target);
  }
  out.subset = subset;
  out.alpha.assign(alpha.data(), alpha.data() + m);
  out.residual = (C * alpha - target).norm();
  double max_abs = 0.0;
  for (double a : out.alpha) max_abs = std::max(max_abs, std::abs(a));
  out.nonnegative = true;
  for (double a : out.alpha)
    if (a < -1e-14 * max_abs) out.nonnegative = false;
  out.alpha_sum = std::accumulate(out.alpha.begin(), out.alpha.end(), 0.0);
  return true;
}

}  // namespace

ConormalDecomposition conormal_decomposition(const Vec3& target,
                                             const std::vector<Vec3>& candidates,
                                             double rel_tol) {
  ConormalDecomposition result;
  const double tnorm = target.norm();
  if (tnorm == 0.0) {
    result.residual = 0.0;
    return result;
  }
  const int n = static_cast<int>(candidates.size());
  const double abs_tol = rel_tol * tnorm;

  bool have_best = false;
  Candidate best;
  auto consider = [&](const std::vector<int>& subset) {
    Candidate c;
    if (!solve_subset(target, candidates, subset, c)) return;
    if (c.residual > abs_tol) return;
    if (!have_best || better(c, best)) {
      best = c;
      have_best = true;
    }
  };

  for (int i = 0; i < n; ++i) consider({i});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) consider({i, j});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) consider({i, j, k});

  if (have_best) {
    result.stencil = best.subset;
    result.alpha = best.alpha;
    result.residual = best.residual / tnorm;
    return result;
  }

  // Least-squares over the full face set (minimum-norm solution).
  Eigen::MatrixXd C(3, n);
  for (int i = 0; i < n; ++i) C.col(i) = candidates[i];
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
  Eigen::VectorXd alpha = cod.solve(target);
  const double res = (C * alpha - target).norm();
  if (res > abs_tol)
    throw AssemblyError("conormal decomposition failed: candidates do not span the target");
  for (int i = 0; i < n; ++i) {
    if (alpha[i] != 0.0) {
      result.stencil.push_back(i);
      result.alpha.push_back(alpha[i]);
    }
  }
  result.residual = res / tnorm;
  return result;
}

double peaceman_radius(double l1, double l2, double h1, double h2) {
  const double r12 = std::sqrt(l2 / l1);
  const double r21 = std::sqrt(l1 / l2);
  const double num = 0.14 * std::sqrt(r12 * h1 * h1 + r21 * h2 * h2);
  const double den = 0.5 * (std::sqrt(r12) + std::sqrt(r21));
  return num / den;
}

double well_index(double l1, double l2, double h1, double h2, double h3,
                  double r_w, double skin) {
  if (l1 * l2 == 0.0) return 0.0;
  const double re = peaceman_radius(l1, l2, h1, h2);
  if (re <= r_w)
    throw ConfigError("Peaceman radius does not exceed the well radius");
  const double denom = std::log(re / r_w) + skin;
  if (denom <= 0.0)
    throw ConfigError("Peaceman well denominator ln(re/rw)+skin must be positive");
  const double pi = 3.14159265358979323846;
  return 2.0 * pi * h3 * std::sqrt(l1 * l2) / denom;
}

MpfaStructure MpfaStructure::build(const Mesh& mesh, double rel_tol) {
  MpfaStructure st;
  const int nf = mesh.face_count();
  st.face_node.resize(nf);
  for (int f = 0; f < nf; ++f) {
    if (mesh.faces[f].neighbor >= 0)
      st.face_node[f] = harmonic_point(mesh, f, 1.0, 1.0).x;
    else
      st.face_node[f] = mesh.faces[f].center;
  }

  st.owner_half_face.assign(nf, -1);
  st.neighbor_half_face.assign(nf, -1);

  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Vec3& xc = mesh.cells[c].center;
    const auto& local_faces = mesh.cell_faces[c];
    std::vector<Vec3> candidates;
    candidates.reserve(local_faces.size());
    for (int f : local_faces) candidates.push_back(st.face_node[f] - xc);

    for (int f : local_faces) {
      const Face& face = mesh.faces[f];
      Vec3 normal = (face.owner == c) ? face.normal : Vec3(-face.normal);
      ConormalDecomposition dec = conormal_decomposition(normal, candidates, rel_tol);
      HalfFace hf;
      hf.cell = c;
      hf.face = f;
      for (std::size_t t = 0; t < dec.stencil.size(); ++t)
        hf.stencil.push_back({local_faces[dec.stencil[t]], dec.alpha[t]});
      int id = static_cast<int>(st.half_faces.size());
      st.half_faces.push_back(std::move(hf));
      if (face.owner == c)
        st.owner_half_face[f] = id;
      else
        st.neighbor_half_face[f] = id;
    }
  }

  // Coefficient-vector layout: all alpha entries first, then alpha*omega pairs
  // for interior stencil faces, both in half-face-major order.
  st.term_refs.resize(st.half_faces.size());
  for (std::size_t h = 0; h < st.half_faces.size(); ++h)
    st.term_refs[h].resize(st.half_faces[h].stencil.size());

  for (std::size_t h = 0; h < st.half_faces.size(); ++h) {
    const HalfFace& hf = st.half_faces[h];
    for (std::size_t t = 0; t < hf.stencil.size(); ++t) {
      CoeffDescriptor d;
      d.kind = 0;
      d.beta = hf.stencil[t].beta;
      d.zone_cell = mesh.cells[hf.cell].zone;
      st.term_refs[h][t].alpha_idx = static_cast<int>(st.descriptors.size());
      st.descriptors.push_back(d);
    }
  }
  st.n_alpha = static_cast<int>(st.descriptors.size());

  for (std::size_t h = 0; h < st.half_faces.size(); ++h) {
    const HalfFace& hf = st.half_faces[h];
    for (std::size_t t = 0; t < hf.stencil.size(); ++t) {
      const Face& sf = mesh.faces[hf.stencil[t].face];
      if (sf.neighbor < 0) continue;
      CoeffDescriptor d;
      d.kind = 1;
      d.beta = hf.stencil[t].beta;
      d.zone_cell = mesh.cells[hf.cell].zone;
      d.d_own = sf.d_owner;
      d.d_nbr = sf.d_neighbor;
      d.zone_own = mesh.cells[sf.owner].zone;
      d.zone_nbr = mesh.cells[sf.neighbor].zone;
      d.side = 0;
      st.term_refs[h][t].aw_owner_idx = static_cast<int>(st.descriptors.size());
      st.descriptors.push_back(d);
      d.side = 1;
      st.term_refs[h][t].aw_neighbor_idx = static_cast<int>(st.descriptors.size());
      st.descriptors.push_back(d);
    }
  }
  st.n_alphaomega = static_cast<int>(st.descriptors.size()) - st.n_alpha;
  return st;
}

double MpfaStructure::entry_value(const CoeffDescriptor& d, const FluidRockProps& props,
                                  const ParameterPoint& xi) {
  const double l1 = xi.kappa1 / props.mu;
  const double l2 = xi.kappa2 / props.mu;
  const double lam_cell = (d.zone_cell == 1) ? l1 : l2;
  const double a = lam_cell * d.beta;
  if (d.kind == 0) return a;
  const double lam_own = (d.zone_own == 1) ? l1 : l2;
  const double lam_nbr = (d.zone_nbr == 1) ? l1 : l2;
  const double denom = d.d_nbr * lam_own + d.d_own * lam_nbr;
  const double w = (d.side == 0) ? d.d_nbr * lam_own / denom : d.d_own * lam_nbr / denom;
  return a * w;
}

Vector MpfaStructure::coefficient_vector(const FluidRockProps& props,
                                         const ParameterPoint& xi) const {
  Vector v(descriptors.size());
  for (std::size_t i = 0; i < descriptors.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = entry_value(descriptors[i], props, xi);
  return v;
}

namespace {

/// Linear form over the unknown vector plus a constant.
struct LinearForm {
  std::vector<std::pair<int, double>> coeffs;
  double constant = 0.0;

  void add(int idx, double v) { coeffs.emplace_back(idx, v); }
};

}  // namespace

FluxParts assemble_flux_parts(const Mesh& mesh, const MpfaStructure& structure,
                              const Vector& coeffs, const FluidRockProps& props) {
  if (coeffs.size() != structure.coefficient_count())
    throw AssemblyError("coefficient vector length does not match the MPFA layout");

  const int nc = mesh.cell_count();
  const int nb = mesh.neumann_count();
  const int n = nc + nb;
  const double rho_g = props.rho * props.gravity;

  // One-sided flux form per half-face:
  //   F~ = |s| sum_t alpha_t [ (p_K + rho g z_K) - (p + rho g z)_{sigma'} ].
  std::vector<LinearForm> forms(structure.half_faces.size());
  for (std::size_t h = 0; h < structure.half_faces.size(); ++h) {
    const auto& hf = structure.half_faces[h];
    const double area = mesh.faces[hf.face].area;
    LinearForm& form = forms[h];
    const Vec3& xc = mesh.cells[hf.cell].center;
    for (std::size_t t = 0; t < hf.stencil.size(); ++t) {
      const auto& ref = structure.term_refs[h][t];
      const double a = area * coeffs[ref.alpha_idx];
      form.add(hf.cell, a);
      form.constant += a * rho_g * xc[2];
      const Face& sf = mesh.faces[hf.stencil[t].face];
      if (sf.neighbor >= 0) {
        const double ao = area * coeffs[ref.aw_owner_idx];
        const double an = area * coeffs[ref.aw_neighbor_idx];
        form.add(sf.owner, -ao);
        form.constant -= ao * rho_g * mesh.cells[sf.owner].center[2];
        form.add(sf.neighbor, -an);
        form.constant -= an * rho_g * mesh.cells[sf.neighbor].center[2];
      } else if (sf.tag == FaceTag::Dirichlet) {
        // Hydrostatically shifted trace: p_D - rho g (z_f - z_D) + rho g z_f.
        form.constant -= a * (props.p_D + rho_g * props.z_D);
      } else {
        form.add(mesh.neumann_index(hf.stencil[t].face), -a);
        form.constant -= a * rho_g * sf.center[2];
      }
    }
  }

  std::vector<Triplet> triplets;
  Vector b = Vector::Zero(n);

  auto accumulate_row = [&](int row, const LinearForm& form, double scale) {
    for (const auto& [idx, v] : form.coeffs) triplets.emplace_back(row, idx, scale * v);
    b[row] -= scale * form.constant;
  };

  for (int c = 0; c < nc; ++c) {
    for (int f : mesh.cell_faces[c]) {
      const Face& face = mesh.faces[f];
      if (face.neighbor >= 0) {
        // F_{K,s} = 1/2 F~_{K,s} - 1/2 F~_{L,s}.
        const int mine = (face.owner == c) ? structure.owner_half_face[f]
                                           : structure.neighbor_half_face[f];
        const int other = (face.owner == c) ? structure.neighbor_half_face[f]
                                            : structure.owner_half_face[f];
        accumulate_row(c, forms[mine], 0.5);
        accumulate_row(c, forms[other], -0.5);
      } else {
        accumulate_row(c, forms[structure.owner_half_face[f]], 1.0);
      }
    }
  }

  // Neumann face rows enforce -F_{K,s} = 0; the sign keeps the symmetric part
  // of the cell/face coupling positive semidefinite.
  for (int f : mesh.neumann_faces()) {
    accumulate_row(mesh.neumann_index(f), forms[structure.owner_half_face[f]], -1.0);
  }

  FluxParts parts;
  parts.A.resize(n, n);
  parts.A.setFromTriplets(triplets.begin(), triplets.end());
  parts.b = std::move(b);

  parts.l = Vector::Zero(n);
  parts.c = 0.0;
  if (mesh.has_gamma) {
    for (int f : mesh.gamma_int_faces) {
      const Face& face = mesh.faces[f];
      const bool owner_inside = mesh.gamma_box.contains(mesh.cells[face.owner].center);
      const int in_hf = owner_inside ? structure.owner_half_face[f]
                                     : structure.neighbor_half_face[f];
      const int out_hf = owner_inside ? structure.neighbor_half_face[f]
                                      : structure.owner_half_face[f];
      for (const auto& [idx, v] : forms[in_hf].coeffs) parts.l[idx] += 0.5 * v;
      for (const auto& [idx, v] : forms[out_hf].coeffs) parts.l[idx] -= 0.5 * v;
      parts.c += 0.5 * forms[in_hf].constant - 0.5 * forms[out_hf].constant;
    }
  }
  return parts;
}

namespace {

double one_sided_flux(const Mesh& mesh, const MpfaStructure& structure,
                      const Vector& coeffs, const FluidRockProps& props, int half_face,
                      const Vector& p) {
  const auto& hf = structure.half_faces[half_face];
  const double area = mesh.faces[hf.face].area;
  const double rho_g = props.rho * props.gravity;
  const double pot_cell = p[hf.cell] + rho_g * mesh.cells[hf.cell].center[2];
  double flux = 0.0;
  for (std::size_t t = 0; t < hf.stencil.size(); ++t) {
    const auto& ref = structure.term_refs[half_face][t];
    const double a = area * coeffs[ref.alpha_idx];
    const Face& sf = mesh.faces[hf.stencil[t].face];
    double pot_trace = 0.0;
    if (sf.neighbor >= 0) {
      flux += a * pot_cell;
      flux -= area * coeffs[ref.aw_owner_idx] *
              (p[sf.owner] + rho_g * mesh.cells[sf.owner].center[2]);
      flux -= area * coeffs[ref.aw_neighbor_idx] *
              (p[sf.neighbor] + rho_g * mesh.cells[sf.neighbor].center[2]);
      continue;
    } else if (sf.tag == FaceTag::Dirichlet) {
      pot_trace = props.p_D + rho_g * props.z_D;
    } else {
      pot_trace = p[mesh.neumann_index(hf.stencil[t].face)] + rho_g * sf.center[2];
    }
    flux += a * (pot_cell - pot_trace);
  }
  return flux;
}

}  // namespace

FaceFluxes averaged_flux(const Mesh& mesh, const MpfaStructure& structure,
                         const Vector& coeffs, const FluidRockProps& props, int face,
                         const Vector& p) {
  FaceFluxes out;
  const Face& f = mesh.faces[face];
  const double f_owner =
      one_sided_flux(mesh, structure, coeffs, props, structure.owner_half_face[face], p);
  if (f.neighbor < 0) {
    out.owner_side = f_owner;
    return out;
  }
  const double f_neighbor =
      one_sided_flux(mesh, structure, coeffs, props, structure.neighbor_half_face[face], p);
  out.owner_side = 0.5 * f_owner - 0.5 * f_neighbor;
  out.neighbor_side = 0.5 * f_neighbor - 0.5 * f_owner;
  return out;
}

std::vector<WellTerm> well_terms(const Mesh& mesh, const FluidRockProps& props) {
  std::vector<WellTerm> terms;
  auto term_for_zone = [&](int zone) -> WellTerm& {
    for (auto& t : terms)
      if (t.zone == zone) return t;
    terms.push_back(WellTerm{zone, {}, {}});
    return terms.back();
  };
  const double rho_g = props.rho * props.gravity;
  for (int c : mesh.perforated_cells) {
    const Cell& cell = mesh.cells[c];
    // Isotropic mobility: WI is linear in kappa_zone, so store WI/kappa.
    const double w =
        well_index(1.0, 1.0, cell.size[0], cell.size[1], cell.size[2], props.r_w,
                   props.skin) /
        props.mu;
    WellTerm& term = term_for_zone(cell.zone);
    term.a_diag.emplace_back(c, w);
    term.b_entries.emplace_back(c, w * (props.p_bh - rho_g * (props.z_bh - cell.center[2])));
  }
  std::sort(terms.begin(), terms.end(),
            [](const WellTerm& a, const WellTerm& b) { return a.zone < b.zone; });
  return terms;
}

SparseMatrix mass_matrix(const Mesh& mesh, const FluidRockProps& props) {
  const int n = mesh.cell_count() + mesh.neumann_count();
  SparseMatrix M(n, n);
  std::vector<Triplet> triplets;
  triplets.reserve(mesh.cell_count());
  for (int c = 0; c < mesh.cell_count(); ++c)
    triplets.emplace_back(c, c, mesh.cells[c].volume * props.phi * props.ct);
  M.setFromTriplets(triplets.begin(), triplets.end());
  return M;
}

HFOperator assemble(const Mesh& mesh, const MpfaStructure& structure,
                    const ParameterPoint& xi, const FluidRockProps& props) {
  Vector coeffs = structure.coefficient_vector(props, xi);
  FluxParts parts = assemble_flux_parts(mesh, structure, coeffs, props);

  HFOperator op;
  op.n_cells = mesh.cell_count();
  op.n_face_unknowns = mesh.neumann_count();
  op.A = std::move(parts.A);
  op.b = std::move(parts.b);
  op.l = std::move(parts.l);
  op.c = parts.c;
  op.M = mass_matrix(mesh, props);

  for (const auto& term : well_terms(mesh, props)) {
    const double kappa = xi.kappa(term.zone);
    std::vector<Triplet> triplets;
    for (const auto& [cell, w] : term.a_diag) triplets.emplace_back(cell, cell, kappa * w);
    SparseMatrix W(op.size(), op.size());
    W.setFromTriplets(triplets.begin(), triplets.end());
    op.A += W;
    for (const auto& [cell, v] : term.b_entries) op.b[cell] += kappa * v;
  }
  return op;
}

}  // namespace rbfv
