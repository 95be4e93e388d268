#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "dynbc/geometry.hpp"

namespace dynbc {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Triangle with a designated refinement edge for newest vertex bisection.
/// Local edge e runs from v[e] to v[(e+1)%3]; vertices are CCW.
struct Triangle {
  std::array<int, 3> v{};
  int refEdge = 0;
  int gen = 0;
  int parent = -1; // index in the mesh this triangle was refined from
};

/// Unique-edge connectivity derived from the triangle list.
struct EdgeTopology {
  std::vector<std::array<int, 2>> edges;    // vertex pairs, smaller index first
  std::vector<std::array<int, 3>> triEdges; // edge id per triangle local edge
  std::vector<std::array<int, 2>> edgeTris; // adjacent triangles, -1 if none
  std::vector<int> boundaryEdgeOfEdge;      // boundary chain position or -1
  std::vector<int> edgeOfBoundaryEdge;
};

/// Conforming triangulation of a polygonal domain.  Immutable once built;
/// refinement produces a new mesh.  The boundary is kept as a closed CCW
/// chain of directed edges, which also fixes an arc-length parametrization
/// of Gamma starting at the chain's first vertex.
class Mesh2D {
 public:
  Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
         std::vector<std::array<int, 2>> boundaryEdges);

  int num_vertices() const { return static_cast<int>(verts_.size()); }
  int num_triangles() const { return static_cast<int>(tris_.size()); }
  int num_boundary_edges() const { return static_cast<int>(bd_.size()); }

  const std::vector<Vec2>& vertices() const { return verts_; }
  const std::vector<Triangle>& triangles() const { return tris_; }
  const std::vector<std::array<int, 2>>& boundary_edges() const { return bd_; }
  const EdgeTopology& topology() const { return topo_; }

  Vec2 vertex(int v) const { return verts_[v]; }

  double tri_area(int t) const;
  double tri_diameter(int t) const;
  double edge_length(int e) const;
  double boundary_edge_length(int k) const;
  /// Unit normal of edge e, oriented as perp of (smaller -> larger vertex).
  Vec2 edge_normal(int e) const;
  Vec2 boundary_outward_normal(int k) const;
  double min_angle() const;
  /// Triangles sharing vertex v, ascending.
  std::vector<int> vertex_patch(int v) const;

  double perimeter() const { return perimeter_; }
  /// Arc coordinate of the start vertex of boundary edge k (k may be nb).
  double boundary_arc(int k) const { return bdArc_[k]; }
  /// Boundary edge whose half-open arc interval contains s (s wrapped mod perimeter).
  int boundary_edge_at_arc(double s) const;
  Vec2 point_at_arc(double s) const;
  /// Triangle owning boundary edge k, and the local edge it sits on.
  int boundary_tri(int k) const { return bdTri_[k]; }
  int boundary_local_edge(int k) const { return bdLocalEdge_[k]; }
  /// Arc coordinates of polygon corners (direction changes), ascending.
  const std::vector<double>& corner_arcs() const { return cornerArcs_; }
  /// Position of vertex v in the CCW boundary vertex chain, or -1.
  int trace_node_of_vertex(int v) const;
  bool is_boundary_vertex(int v) const { return trace_node_of_vertex(v) >= 0; }

  void dump(std::ostream& os) const;

 private:
  void build_topology();
  void build_boundary_tables();
  void validate() const;

  std::vector<Vec2> verts_;
  std::vector<Triangle> tris_;
  std::vector<std::array<int, 2>> bd_;
  EdgeTopology topo_;
  std::vector<double> bdArc_;      // size nb+1, last entry = perimeter
  std::vector<int> bdTri_;
  std::vector<int> bdLocalEdge_;
  std::vector<int> traceNode_;     // per vertex, -1 if interior
  std::vector<double> cornerArcs_;
  double perimeter_ = 0.0;
};

/// Criss-cross partition of the unit square into n x n cells of 4 triangles.
Mesh2D create_unit_square(int n);

/// Criss-cross L-shape (0,1)^2 minus [1/2,1) x (0,1/2], 2n x 2n base grid.
Mesh2D create_lshape(int n);

/// Newest vertex bisection of the marked triangles plus conforming closure.
/// Boundary edges listed in markedBoundaryEdges (positions in the boundary
/// chain) are split as well, via the same closure.
Mesh2D bisect(const Mesh2D& mesh, std::span<const int> markedTriangles,
              std::span<const int> markedBoundaryEdges = {});

/// Every triangle split into four (two bisection generations); nested vertices.
Mesh2D uniform_refine(const Mesh2D& mesh);

} // namespace dynbc
