// Copyright (c) 2026 the hdgmd authors
// SPDX-License-Identifier: Apache-2.0

#include "hdgmd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace hdgmd {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

} // namespace

double Mesh::cell_area(int cell) const {
  return signed_area(vertex_of_cell(cell, 0), vertex_of_cell(cell, 1), vertex_of_cell(cell, 2));
}

Vec2 Mesh::cell_centroid(int cell) const {
  return (vertex_of_cell(cell, 0) + vertex_of_cell(cell, 1) + vertex_of_cell(cell, 2)) / 3.0;
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int e = 0; e < num_cells(); ++e) area += cell_area(e);
  return area;
}

double Mesh::shape_ratio(int cell) const {
  const Vec2 p0 = vertex_of_cell(cell, 0);
  const Vec2 p1 = vertex_of_cell(cell, 1);
  const Vec2 p2 = vertex_of_cell(cell, 2);
  const double a = (p1 - p2).norm();
  const double b = (p2 - p0).norm();
  const double c = (p0 - p1).norm();
  const double area = cell_area(cell);
  const double s = 0.5 * (a + b + c);
  const double circum = a * b * c / (4.0 * area);
  const double in = area / s;
  return circum / in;
}

double Mesh::max_shape_ratio() const {
  double r = 0.0;
  for (int e = 0; e < num_cells(); ++e) r = std::max(r, shape_ratio(e));
  return r;
}

void Mesh::finalize(std::vector<std::string>* warnings) {
  const int ncells = num_cells();
  const int nverts = num_vertices();
  if (region_tags.empty()) region_tags.assign(ncells, 1);
  if (static_cast<int>(region_tags.size()) != ncells)
    throw InputError("mesh: region_tags size does not match cell count");

  std::set<std::array<int, 3>> seen;
  for (int e = 0; e < ncells; ++e) {
    auto& cell = cells[e];
    for (int v : cell) {
      if (v < 0 || v >= nverts)
        throw InputError("mesh: cell " + std::to_string(e) + " has vertex index out of range");
    }
    if (cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2])
      throw InputError("mesh: cell " + std::to_string(e) + " has repeated vertices");

    double area = cell_area(e);
    if (area < 0.0) {
      std::swap(cell[1], cell[2]);
      area = -area;
      if (warnings)
        warnings->push_back("cell " + std::to_string(e) + " was clockwise; reordered to CCW");
    }
    if (!(area > 0.0) || area < 1e-300)
      throw InputError("mesh: degenerate cell " + std::to_string(e));

    std::array<int, 3> key = cell;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second)
      throw InputError("mesh: duplicate cell " + std::to_string(e));
  }

  faces.clear();
  face_cells.clear();
  cell_faces.assign(ncells, {});
  std::map<std::array<int, 2>, int> face_index;
  for (int e = 0; e < ncells; ++e) {
    for (int le = 0; le < 3; ++le) {
      const int a = cells[e][le];
      const int b = cells[e][(le + 1) % 3];
      const std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
      auto [it, inserted] = face_index.try_emplace(key, static_cast<int>(faces.size()));
      if (inserted) {
        faces.push_back(key);
        face_cells.push_back({e, -1});
      } else {
        auto& adj = face_cells[it->second];
        if (adj[1] != -1)
          throw InputError("mesh: non-conforming connectivity, face shared by more than two cells");
        adj[1] = e;
        if (adj[0] > adj[1]) std::swap(adj[0], adj[1]);
      }
      cell_faces[e][le].face = it->second;
      cell_faces[e][le].local_edge = le;
      cell_faces[e][le].forward = a < b;
    }
  }

  const int nfaces = num_faces();
  face_normals.resize(nfaces);
  face_lengths.resize(nfaces);
  boundary_flags.resize(nfaces);
  for (int f = 0; f < nfaces; ++f) {
    const Vec2 t = vertices[faces[f][1]] - vertices[faces[f][0]];
    face_lengths[f] = t.norm();
    if (face_lengths[f] < 1e-300) throw InputError("mesh: zero-length face");
    Vec2 n(t.y(), -t.x());
    n /= face_lengths[f];
    // Orient from the lower-index adjacent cell to the higher-index one.
    const int owner = face_cells[f][0];
    const Vec2 away = 0.5 * (vertices[faces[f][0]] + vertices[faces[f][1]]) - cell_centroid(owner);
    if (n.dot(away) < 0.0) n = -n;
    face_normals[f] = n;
    boundary_flags[f] = face_cells[f][1] == -1;
  }

  for (int e = 0; e < ncells; ++e) {
    for (auto& cf : cell_faces[e]) {
      cf.normal_sign = (face_cells[cf.face][0] == e) ? 1 : -1;
    }
  }

  h_per_cell.resize(ncells);
  h_max = 0.0;
  for (int e = 0; e < ncells; ++e) {
    double h = 0.0;
    for (int le = 0; le < 3; ++le) h = std::max(h, face_lengths[cell_faces[e][le].face]);
    h_per_cell[e] = h;
    h_max = std::max(h_max, h);
  }
}

Mesh generate_unit_square(int n) {
  if (n < 1) throw InputError("generate_unit_square: n must be >= 1");
  Mesh mesh;
  const int nv = n + 1;
  mesh.vertices.reserve(nv * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i)
      mesh.vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

  auto vid = [nv](int i, int j) { return j * nv + i; };
  mesh.cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.cells.push_back({a, b, c});
      mesh.cells.push_back({a, c, d});
    }
  }
  mesh.region_tags.assign(mesh.cells.size(), 1);
  mesh.finalize();
  return mesh;
}

namespace {

// Knots of one graded segment [a, b]: sizes grow geometrically away from
// both ends, then all sizes are rescaled to fill the segment exactly.
std::vector<double> graded_segment(double a, double b, double ha, double hb, double ratio) {
  const double len = b - a;
  std::vector<double> left{ha}, right{hb};
  double sl = ha, sr = hb;
  while (sl + sr < len) {
    if (sl <= sr) {
      left.push_back(left.back() * ratio);
      sl += left.back();
    } else {
      right.push_back(right.back() * ratio);
      sr += right.back();
    }
  }
  const double scale = len / (sl + sr);
  std::vector<double> knots{a};
  for (double s : left) knots.push_back(knots.back() + s * scale);
  std::vector<double> tail;
  double pos = b;
  for (double s : right) {
    pos -= s * scale;
    tail.push_back(pos);
  }
  // tail.back() coincides with the last left knot; drop it.
  knots.pop_back();
  knots.push_back(tail.empty() ? b : tail.back());
  for (auto it = tail.rbegin() + 1; it < tail.rend(); ++it) knots.push_back(*it);
  knots.push_back(b);
  return knots;
}

std::vector<double> lshape_axis_knots(double w, const LshapeGrading& g) {
  // Mandatory knots 0, w, 1/2, 1-w, 1; wells attract at 0 and 1, the
  // re-entrant corner at 1/2.
  std::vector<double> knots;
  const int nw = std::max(1, static_cast<int>(std::ceil(w / g.h_min - 1e-9)));
  for (int i = 0; i <= nw; ++i) knots.push_back(w * i / nw);
  auto mid1 = graded_segment(w, 0.5, std::max(w / nw, g.h_min), g.h_min, g.ratio);
  knots.insert(knots.end(), mid1.begin() + 1, mid1.end());
  auto mid2 = graded_segment(0.5, 1.0 - w, g.h_min, std::max(w / nw, g.h_min), g.ratio);
  knots.insert(knots.end(), mid2.begin() + 1, mid2.end());
  for (int i = 1; i <= nw; ++i) knots.push_back(1.0 - w + w * i / nw);
  return knots;
}

} // namespace

Mesh generate_lshape(double well_size, const LshapeGrading& grading) {
  if (!(well_size > 0.0) || well_size > 0.5)
    throw InputError("generate_lshape: well_size must be in (0, 1/2]");
  if (!(grading.h_min > 0.0) || !(grading.ratio >= 1.0))
    throw InputError("generate_lshape: grading requires h_min > 0 and ratio >= 1");

  const std::vector<double> knots = lshape_axis_knots(well_size, grading);
  const int nk = static_cast<int>(knots.size());
  for (int i = 0; i + 1 < nk; ++i)
    if (!(knots[i + 1] - knots[i] > 1e-12))
      throw InputError("generate_lshape: grading produced degenerate cells");

  Mesh mesh;
  std::vector<int> vid(nk * nk, -1);
  auto in_domain = [](double x, double y) {
    const double eps = 1e-12;
    return y >= 0.5 - eps || x <= 0.5 + eps;
  };
  for (int j = 0; j < nk; ++j) {
    for (int i = 0; i < nk; ++i) {
      if (in_domain(knots[i], knots[j])) {
        vid[j * nk + i] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.emplace_back(knots[i], knots[j]);
      }
    }
  }
  for (int j = 0; j + 1 < nk; ++j) {
    for (int i = 0; i + 1 < nk; ++i) {
      const double xc = 0.5 * (knots[i] + knots[i + 1]);
      const double yc = 0.5 * (knots[j] + knots[j + 1]);
      if (!(yc > 0.5 || xc < 0.5)) continue; // excluded quadrant
      const int a = vid[j * nk + i], b = vid[j * nk + i + 1];
      const int c = vid[(j + 1) * nk + i + 1], d = vid[(j + 1) * nk + i];
      mesh.cells.push_back({a, b, c});
      mesh.cells.push_back({a, c, d});
      const int tag = (xc < 0.5 && yc > 0.5) ? 2 : 1;
      mesh.region_tags.push_back(tag);
      mesh.region_tags.push_back(tag);
    }
  }
  mesh.finalize();
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh fine;
  fine.vertices = mesh.vertices;
  std::vector<int> midpoint(mesh.num_faces());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    midpoint[f] = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(0.5 * (mesh.vertices[mesh.faces[f][0]] + mesh.vertices[mesh.faces[f][1]]));
  }
  fine.cells.reserve(4 * mesh.num_cells());
  fine.region_tags.reserve(4 * mesh.num_cells());
  for (int e = 0; e < mesh.num_cells(); ++e) {
    const auto& cell = mesh.cells[e];
    const int m01 = midpoint[mesh.cell_faces[e][0].face];
    const int m12 = midpoint[mesh.cell_faces[e][1].face];
    const int m20 = midpoint[mesh.cell_faces[e][2].face];
    fine.cells.push_back({cell[0], m01, m20});
    fine.cells.push_back({cell[1], m12, m01});
    fine.cells.push_back({cell[2], m20, m12});
    fine.cells.push_back({m01, m12, m20});
    for (int c = 0; c < 4; ++c) fine.region_tags.push_back(mesh.region_tags[e]);
  }
  fine.finalize();
  return fine;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("save_mesh: cannot open " + path);
  out << "hdgmesh 1\n";
  out << "V " << mesh.num_vertices() << "\n";
  out << std::setprecision(17);
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << "\n";
  out << "C " << mesh.num_cells() << "\n";
  for (int e = 0; e < mesh.num_cells(); ++e) {
    out << mesh.cells[e][0] << " " << mesh.cells[e][1] << " " << mesh.cells[e][2] << " "
        << mesh.region_tags[e] << "\n";
  }
  if (!out) throw InputError("save_mesh: write failed for " + path);
}

Mesh read_mesh(std::istream& in, std::vector<std::string>* warnings) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "hdgmesh" || version != 1)
    throw InputError("load_mesh: not an 'hdgmesh 1' file");
  std::string tag;
  int nv = 0;
  if (!(in >> tag >> nv) || tag != "V" || nv < 3)
    throw InputError("load_mesh: malformed vertex header");
  Mesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) {
    if (!(in >> v.x() >> v.y())) throw InputError("load_mesh: malformed vertex line");
  }
  int nc = 0;
  if (!(in >> tag >> nc) || tag != "C" || nc < 1)
    throw InputError("load_mesh: malformed cell header");
  mesh.cells.resize(nc);
  mesh.region_tags.resize(nc);
  for (int e = 0; e < nc; ++e) {
    if (!(in >> mesh.cells[e][0] >> mesh.cells[e][1] >> mesh.cells[e][2] >> mesh.region_tags[e]))
      throw InputError("load_mesh: malformed cell line");
  }
  mesh.finalize(warnings);
  return mesh;
}

Mesh load_mesh(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw InputError("load_mesh: cannot open " + path);
  try {
    return read_mesh(in, warnings);
  } catch (const InputError& err) {
    throw InputError(std::string(err.what()) + " (" + path + ")");
  }
}

std::vector<int> cells_in_box(const Mesh& mesh, const Vec2& lo, const Vec2& hi) {
  std::vector<int> out;
  const double eps = 1e-10;
  for (int e = 0; e < mesh.num_cells(); ++e) {
    bool inside = true;
    for (int v = 0; v < 3; ++v) {
      const Vec2 p = mesh.vertex_of_cell(e, v);
      inside = inside && p.x() >= lo.x() - eps && p.x() <= hi.x() + eps && p.y() >= lo.y() - eps &&
               p.y() <= hi.y() + eps;
    }
    if (inside) out.push_back(e);
  }
  return out;
}

} // namespace hdgmd
