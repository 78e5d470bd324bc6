#include "rbfv/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace rbfv {

int Mesh::neumann_count() const { return static_cast<int>(neumann_faces_.size()); }

int Mesh::neumann_index(int face_id) const {
  int k = neumann_of_face_[face_id];
  if (k < 0) throw AssemblyError("face " + std::to_string(face_id) + " is not a Neumann face");
  return cell_count() + k;
}

void Mesh::rebuild_neumann_numbering() {
  neumann_faces_.clear();
  neumann_of_face_.assign(faces.size(), -1);
  for (int f = 0; f < face_count(); ++f) {
    if (faces[f].tag == FaceTag::Neumann) {
      neumann_of_face_[f] = static_cast<int>(neumann_faces_.size());
      neumann_faces_.push_back(f);
    }
  }
}

namespace {

int cell_id(int i, int j, int k, int nx, int ny) { return i + nx * (j + ny * k); }

}  // namespace

Mesh build_cartesian_mesh(int nx, int ny, int nz,
                          const std::array<std::array<double, 2>, 3>& extents,
                          const ZoneSpec& zone) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw ConfigError("mesh resolution must be >= 1 in every direction");
  for (int a = 0; a < 3; ++a) {
    if (!(extents[a][1] > extents[a][0]))
      throw ConfigError("degenerate mesh extents along axis " + std::to_string(a));
  }

  Mesh mesh;
  mesh.domain.lo = Vec3(extents[0][0], extents[1][0], extents[2][0]);
  mesh.domain.hi = Vec3(extents[0][1], extents[1][1], extents[2][1]);

  const int n[3] = {nx, ny, nz};
  Vec3 h;
  for (int a = 0; a < 3; ++a) h[a] = (extents[a][1] - extents[a][0]) / n[a];
  const double cell_volume = h[0] * h[1] * h[2];

  if (zone.zone1.volume() <= 0.0)
    throw ConfigError("zone-1 box has non-positive volume");

  mesh.cells.resize(static_cast<std::size_t>(nx) * ny * nz);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        Cell& c = mesh.cells[cell_id(i, j, k, nx, ny)];
        c.center = Vec3(extents[0][0] + (i + 0.5) * h[0],
                        extents[1][0] + (j + 0.5) * h[1],
                        extents[2][0] + (k + 0.5) * h[2]);
        c.size = h;
        c.volume = cell_volume;
        c.zone = zone.zone1.contains(c.center) ? 1 : 2;
      }
    }
  }

  mesh.cell_faces.assign(mesh.cells.size(), {});
  auto add_face = [&](int owner, int neighbor, const Vec3& center, const Vec3& normal,
                      double area, double d_own, double d_nbr) {
    Face f;
    f.center = center;
    f.normal = normal;
    f.area = area;
    f.owner = owner;
    f.neighbor = neighbor;
    f.d_owner = d_own;
    f.d_neighbor = d_nbr;
    int id = static_cast<int>(mesh.faces.size());
    mesh.faces.push_back(f);
    mesh.cell_faces[owner].push_back(id);
    if (neighbor >= 0) mesh.cell_faces[neighbor].push_back(id);
    return id;
  };

  const double areas[3] = {h[1] * h[2], h[0] * h[2], h[0] * h[1]};
  // Faces normal to each axis, swept in cell-index order for determinism.
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 normal = Vec3::Zero();
    normal[axis] = 1.0;
    for (int k = 0; k < nz; ++k) {
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          const int idx[3] = {i, j, k};
          const int me = cell_id(i, j, k, nx, ny);
          const Vec3& xc = mesh.cells[me].center;
          // Low-side boundary face.
          if (idx[axis] == 0) {
            Vec3 fc = xc;
            fc[axis] = extents[axis][0];
            add_face(me, -1, fc, -normal, areas[axis], 0.5 * h[axis], 0.0);
          }
          // High-side face: boundary, or interior shared with the next cell.
          Vec3 fc = xc;
          fc[axis] = xc[axis] + 0.5 * h[axis];
          if (idx[axis] == n[axis] - 1) {
            add_face(me, -1, fc, normal, areas[axis], 0.5 * h[axis], 0.0);
          } else {
            int other[3] = {i, j, k};
            other[axis] += 1;
            int nb = cell_id(other[0], other[1], other[2], nx, ny);
            add_face(me, nb, fc, normal, areas[axis], 0.5 * h[axis], 0.5 * h[axis]);
          }
        }
      }
    }
  }

  for (auto& f : mesh.faces)
    if (f.neighbor < 0) f.tag = FaceTag::Neumann;
  mesh.rebuild_neumann_numbering();
  return mesh;
}

void tag_boundaries(Mesh& mesh, const std::set<std::string>& dirichlet_planes) {
  if (dirichlet_planes.empty())
    throw ConfigError("at least one Dirichlet boundary plane is required");

  const double tol = 1e-9 * mesh.domain_diameter();
  auto on_plane = [&](const Face& f, const std::string& name) {
    if (name == "xmin") return std::abs(f.center[0] - mesh.domain.lo[0]) <= tol;
    if (name == "xmax") return std::abs(f.center[0] - mesh.domain.hi[0]) <= tol;
    if (name == "ymin") return std::abs(f.center[1] - mesh.domain.lo[1]) <= tol;
    if (name == "ymax") return std::abs(f.center[1] - mesh.domain.hi[1]) <= tol;
    if (name == "zmin") return std::abs(f.center[2] - mesh.domain.lo[2]) <= tol;
    if (name == "zmax") return std::abs(f.center[2] - mesh.domain.hi[2]) <= tol;
    throw ConfigError("unknown boundary plane name '" + name + "'");
  };

  int n_dirichlet = 0;
  for (auto& f : mesh.faces) {
    if (f.neighbor >= 0) continue;
    f.tag = FaceTag::Neumann;
    for (const auto& name : dirichlet_planes) {
      if (on_plane(f, name)) {
        f.tag = FaceTag::Dirichlet;
        ++n_dirichlet;
        break;
      }
    }
  }
  if (n_dirichlet == 0)
    throw ConfigError("Dirichlet spec matched no boundary face");
  mesh.rebuild_neumann_numbering();
}

std::vector<int> select_gamma_int(Mesh& mesh, const Box3& box) {
  const double tol = 1e-9 * mesh.domain_diameter();
  if (!box.strictly_inside(mesh.domain, tol))
    throw ConfigError("gamma_int box must lie strictly inside the domain");

  std::vector<int> out;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Face& face = mesh.faces[f];
    if (face.neighbor < 0) continue;
    const Vec3& p = face.center;
    bool on_surface = false;
    for (int a = 0; a < 3 && !on_surface; ++a) {
      for (double bound : {box.lo[a], box.hi[a]}) {
        if (std::abs(p[a] - bound) > tol) continue;
        bool in_patch = true;
        for (int b = 0; b < 3; ++b) {
          if (b == a) continue;
          if (p[b] < box.lo[b] - tol || p[b] > box.hi[b] + tol) in_patch = false;
        }
        if (in_patch) {
          on_surface = true;
          break;
        }
      }
    }
    if (on_surface) out.push_back(f);
  }
  if (out.empty())
    throw ConfigError("gamma_int box selects no interior face; QOI undefined");
  mesh.gamma_int_faces = out;
  mesh.gamma_box = box;
  mesh.has_gamma = true;
  return out;
}

std::vector<int> select_perforations(Mesh& mesh, const Box3& well_box) {
  std::vector<int> out;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    if (well_box.contains(mesh.cells[c].center)) out.push_back(c);
  }
  if (out.empty())
    throw ConfigError("well box contains no cell center");
  mesh.perforated_cells = out;
  return out;
}

}  // namespace rbfv
