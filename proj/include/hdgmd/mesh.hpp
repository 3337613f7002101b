// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMD_MESH_HPP
#define HDGMD_MESH_HPP

#include "hdgmd/common.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace hdgmd {

/// One of the three edges of a cell, seen from that cell.
struct CellFace {
  int face = -1;       ///< global face index
  int local_edge = -1; ///< 0:(v0,v1) 1:(v1,v2) 2:(v2,v0)
  int normal_sign = 1; ///< +1 if the global face normal is outward for this cell
  bool forward = true; ///< true if local traversal matches the global (lo,hi) direction
};

/// Conforming triangle mesh of a 2D polygonal domain.
///
/// Faces carry a single global orientation: vertices are stored (lo, hi)
/// by vertex index and the unit normal points from the lower-index
/// adjacent cell into the higher-index one (outward on the boundary).
/// Immutable after construction.
class Mesh {
public:
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> cells; // CCW vertex triples
  std::vector<int> region_tags;          // material id per cell

  std::vector<std::array<int, 2>> faces;      // (lo, hi) vertex pairs
  std::vector<std::array<int, 2>> face_cells; // adjacent cells, [1] = -1 on boundary
  std::vector<Vec2> face_normals;             // global unit normal per face
  std::vector<double> face_lengths;
  std::vector<bool> boundary_flags; // true if boundary face
  std::vector<std::array<CellFace, 3>> cell_faces;

  std::vector<double> h_per_cell; // cell diameters
  double h_max = 0.0;

  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  Vec2 vertex_of_cell(int cell, int local) const { return vertices[cells[cell][local]]; }
  double cell_area(int cell) const;
  Vec2 cell_centroid(int cell) const;
  double total_area() const;

  /// circumradius / inradius of a cell.
  double shape_ratio(int cell) const;
  double max_shape_ratio() const;

  /// Rebuild connectivity from vertices/cells/region_tags and validate all
  /// invariants. Throws InputError on duplicate, degenerate or
  /// non-conforming cells; CW cells are reordered with a warning.
  void finalize(std::vector<std::string>* warnings = nullptr);
};

/// Structured mesh of (0,1)^2 with 2 n^2 triangles; each grid square is
/// split along the lower-left to upper-right diagonal.
Mesh generate_unit_square(int n);

/// Grading parameters for the two-material L-shaped domain.
struct LshapeGrading {
  double h_min = 0.005; ///< target size at the re-entrant corner
  double ratio = 1.15;  ///< geometric growth factor away from attractors
};

/// Graded mesh of ([0,1]x[1/2,1]) u ([0,1/2]x[0,1/2]). Region tag 2 marks
/// [0,1/2]x[1/2,1], tag 1 the rest. The two well squares of side
/// `well_size` in the corners (0,0) and (1,1) are resolved exactly by
/// cell boundaries and the grid is refined toward them and the corner
/// (1/2,1/2).
Mesh generate_lshape(double well_size, const LshapeGrading& grading = {});

/// Midpoint refinement: each triangle split into 4 congruent children.
Mesh refine_uniform(const Mesh& mesh);

/// Plain-text mesh I/O ("hdgmesh 1" format).
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path, std::vector<std::string>* warnings = nullptr);
Mesh read_mesh(std::istream& in, std::vector<std::string>* warnings = nullptr);

/// Cells whose closure lies inside the axis-aligned box [lo, hi].
std::vector<int> cells_in_box(const Mesh& mesh, const Vec2& lo, const Vec2& hi);

} // namespace hdgmd

#endif
