#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrks/geometry.hpp"

namespace hrks {

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape-regular triangulation of a polygon with derived entity tables.
///
/// Triangles are stored with positive orientation. Edges carry the canonical
/// orientation (smaller vertex index, larger vertex index); local edge k of a
/// triangle is the edge opposite local vertex k. A mesh is immutable once
/// built and may be shared read-only across threads.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;

  std::vector<std::array<int, 2>> edges;          // lo < hi
  std::vector<std::array<int, 3>> tri_edges;      // edge opposite local vertex k
  std::vector<std::array<int, 2>> edge_tris;      // second = -1 on the boundary
  std::vector<char> vertex_boundary;
  std::vector<char> edge_boundary;

  // Compact indices for interior entities, -1 for boundary ones.
  std::vector<int> interior_vertex_id;
  std::vector<int> interior_edge_id;
  int n_interior_vertices = 0;
  int n_interior_edges = 0;

  int nv() const { return static_cast<int>(vertices.size()); }
  int nt() const { return static_cast<int>(triangles.size()); }
  int ne() const { return static_cast<int>(edges.size()); }

  double area(int t) const;
  Vec2 centroid(int t) const;
  double diameter(int t) const;  // longest edge
  double mesh_size() const;      // max diameter

  /// Gradients of the three barycentric coordinates (constant per cell).
  std::array<Vec2, 3> barycentric_gradients(int t) const;
  /// Barycentric coordinates of a point with respect to cell t.
  std::array<double, 3> barycentric(int t, const Vec2& p) const;
  /// Index of a cell containing p, or -1. Points on shared edges resolve to
  /// the lowest cell index.
  int locate(const Vec2& p, double tol = 1e-12) const;
};

enum class MeshPattern { crisscross, alternating };

struct EntityTables {
  std::vector<int> interior_vertices;
  std::vector<int> boundary_vertices;
  std::vector<int> interior_edges;
  std::vector<int> boundary_edges;
};

/// Builds all derived tables and validates the mesh: positive areas, edge
/// incidence, Euler relation for a simply connected domain, and the
/// requirement that every boundary vertex is joined by an edge to an
/// interior vertex. Triangles listed clockwise are reordered.
Mesh finalize_mesh(std::vector<Vec2> vertices,
                   std::vector<std::array<int, 3>> triangles);

/// Structured families on the unit square. crisscross splits each of the
/// n x n squares into four triangles through its center; alternating splits
/// each square into two with the diagonal direction alternating
/// checkerboard-wise.
Mesh generate_structured(int n, MeshPattern pattern);

EntityTables classify_entities(const Mesh& mesh);

/// Uniform refinement: each triangle is split into four congruent children
/// through the edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Plain-text format: line 1 "nv nt", then nv lines "x y", then nt lines
/// "i j k" with 0-based vertex indices.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

}  // namespace hrks
