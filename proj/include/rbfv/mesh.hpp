#pragma once

#include "rbfv/types.hpp"

#include <set>
#include <string>

namespace rbfv {

enum class FaceTag { Interior, Dirichlet, Neumann };

struct Cell {
  Vec3 center = Vec3::Zero();   // barycenter, used as the MPFA cell center
  Vec3 size = Vec3::Zero();     // axis-aligned extents (Cartesian cells)
  double volume = 0.0;
  int zone = 1;                 // 1 = reservoir, 2 = cap rock
};

struct Face {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::Zero();   // unit, outward from the owner cell
  double area = 0.0;
  int owner = -1;
  int neighbor = -1;            // -1 on boundary faces
  FaceTag tag = FaceTag::Interior;
  double d_owner = 0.0;         // orthogonal distance owner center -> face plane
  double d_neighbor = 0.0;      // 0 on boundary faces
};

/// Zone 1 (reservoir) is an axis-aligned box; the complement is zone 2.
struct ZoneSpec {
  Box3 zone1;
};

/// Admissible cell-centered mesh. Immutable after construction; safe for
/// concurrent reads.
class Mesh {
 public:
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<std::vector<int>> cell_faces;  // E_K, ordered per cell
  Box3 domain;

  std::vector<int> perforated_cells;  // sorted cell ids
  std::vector<int> gamma_int_faces;   // sorted interior face ids
  Box3 gamma_box;                     // box whose surface carries gamma_int
  bool has_gamma = false;

  int cell_count() const { return static_cast<int>(cells.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  /// Number of Neumann boundary faces (each carries one extra unknown).
  int neumann_count() const;

  /// Unknown index of a Neumann face (cell block first, then face block).
  int neumann_index(int face_id) const;

  /// Neumann face id for unknown row `cell_count() + k`.
  const std::vector<int>& neumann_faces() const { return neumann_faces_; }

  double domain_diameter() const { return domain.diameter(); }

  void rebuild_neumann_numbering();

 private:
  std::vector<int> neumann_faces_;   // sorted face ids
  std::vector<int> neumann_of_face_; // face id -> local index or -1
};

/// Builds an nx*ny*nz Cartesian hexahedral mesh over the given extents with
/// zone labels assigned by a center-in-box test. All faces start untagged
/// (Neumann); call tag_boundaries afterwards.
Mesh build_cartesian_mesh(int nx, int ny, int nz,
                          const std::array<std::array<double, 2>, 3>& extents,
                          const ZoneSpec& zone);

/// Domain boundary plane names accepted by tag_boundaries.
/// {"xmin","xmax","ymin","ymax","zmin","zmax"}.
void tag_boundaries(Mesh& mesh, const std::set<std::string>& dirichlet_planes);

/// Interior faces whose barycenters lie on the surface of `box`; fixes the
/// QOI surface and its orientation (outward from `box`).
std::vector<int> select_gamma_int(Mesh& mesh, const Box3& box);

/// Cells whose centers lie inside `well_box`.
std::vector<int> select_perforations(Mesh& mesh, const Box3& well_box);

}  // namespace rbfv
