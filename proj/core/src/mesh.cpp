#include "dynbc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_map>

namespace dynbc {

namespace {

inline std::int64_t pack_pair(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::int64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

} // namespace

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
               std::vector<std::array<int, 2>> boundaryEdges)
    : verts_(std::move(vertices)), tris_(std::move(triangles)), bd_(std::move(boundaryEdges)) {
  build_topology();
  build_boundary_tables();
  validate();
}

void Mesh2D::build_topology() {
  const int nt = num_triangles();
  topo_.edges.clear();
  topo_.triEdges.assign(nt, {-1, -1, -1});
  std::unordered_map<std::int64_t, int> edgeId;
  edgeId.reserve(3 * nt);
  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < 3; ++e) {
      int a = tris_[t].v[e];
      int b = tris_[t].v[(e + 1) % 3];
      auto key = pack_pair(a, b);
      auto it = edgeId.find(key);
      int id;
      if (it == edgeId.end()) {
        id = static_cast<int>(topo_.edges.size());
        edgeId.emplace(key, id);
        topo_.edges.push_back({std::min(a, b), std::max(a, b)});
      } else {
        id = it->second;
      }
      topo_.triEdges[t][e] = id;
    }
  }
  const int ne = static_cast<int>(topo_.edges.size());
  topo_.edgeTris.assign(ne, {-1, -1});
  for (int t = 0; t < nt; ++t)
    for (int e = 0; e < 3; ++e) {
      auto& adj = topo_.edgeTris[topo_.triEdges[t][e]];
      if (adj[0] < 0)
        adj[0] = t;
      else if (adj[1] < 0)
        adj[1] = t;
      else
        throw MeshError("edge shared by more than two triangles");
    }

  const int nb = num_boundary_edges();
  topo_.boundaryEdgeOfEdge.assign(ne, -1);
  topo_.edgeOfBoundaryEdge.assign(nb, -1);
  bdTri_.assign(nb, -1);
  bdLocalEdge_.assign(nb, -1);
  for (int k = 0; k < nb; ++k) {
    auto it = edgeId.find(pack_pair(bd_[k][0], bd_[k][1]));
    if (it == edgeId.end()) throw MeshError("boundary edge is not a mesh edge");
    topo_.edgeOfBoundaryEdge[k] = it->second;
    topo_.boundaryEdgeOfEdge[it->second] = k;
    int t = topo_.edgeTris[it->second][0];
    bdTri_[k] = t;
    for (int e = 0; e < 3; ++e)
      if (topo_.triEdges[t][e] == it->second) bdLocalEdge_[k] = e;
  }
}

void Mesh2D::build_boundary_tables() {
  const int nb = num_boundary_edges();
  bdArc_.assign(nb + 1, 0.0);
  for (int k = 0; k < nb; ++k)
    bdArc_[k + 1] = bdArc_[k] + norm(verts_[bd_[k][1]] - verts_[bd_[k][0]]);
  perimeter_ = bdArc_[nb];

  traceNode_.assign(num_vertices(), -1);
  for (int k = 0; k < nb; ++k) traceNode_[bd_[k][0]] = k;

  cornerArcs_.clear();
  for (int k = 0; k < nb; ++k) {
    int prev = (k + nb - 1) % nb;
    Vec2 din = verts_[bd_[prev][1]] - verts_[bd_[prev][0]];
    Vec2 dout = verts_[bd_[k][1]] - verts_[bd_[k][0]];
    if (std::abs(cross(din, dout)) > 1e-12 * norm(din) * norm(dout))
      cornerArcs_.push_back(bdArc_[k]);
  }
}

void Mesh2D::validate() const {
  const int nb = num_boundary_edges();
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& v = tris_[t].v;
    Vec2 a = verts_[v[0]], b = verts_[v[1]], c = verts_[v[2]];
    if (cross(b - a, c - a) <= 0.0) throw MeshError("triangle not positively oriented");
    if (tris_[t].refEdge < 0 || tris_[t].refEdge > 2) throw MeshError("bad refinement edge index");
  }
  int hanging = 0;
  for (std::size_t e = 0; e < topo_.edges.size(); ++e)
    if (topo_.edgeTris[e][1] < 0) {
      ++hanging;
      if (topo_.boundaryEdgeOfEdge[e] < 0)
        throw MeshError("interior edge with a single triangle (hanging node)");
    }
  if (hanging != nb) throw MeshError("boundary chain does not cover the topological boundary");
  for (int k = 0; k < nb; ++k) {
    if (bd_[k][1] != bd_[(k + 1) % nb][0]) throw MeshError("boundary chain not closed");
    int t = bdTri_[k], e = bdLocalEdge_[k];
    if (tris_[t].v[e] != bd_[k][0] || tris_[t].v[(e + 1) % 3] != bd_[k][1])
      throw MeshError("boundary chain orientation disagrees with triangle orientation");
  }
}

double Mesh2D::tri_area(int t) const {
  const auto& v = tris_[t].v;
  return 0.5 * cross(verts_[v[1]] - verts_[v[0]], verts_[v[2]] - verts_[v[0]]);
}

double Mesh2D::tri_diameter(int t) const {
  const auto& v = tris_[t].v;
  double h = 0.0;
  for (int e = 0; e < 3; ++e)
    h = std::max(h, norm(verts_[v[(e + 1) % 3]] - verts_[v[e]]));
  return h;
}

double Mesh2D::edge_length(int e) const {
  return norm(verts_[topo_.edges[e][1]] - verts_[topo_.edges[e][0]]);
}

double Mesh2D::boundary_edge_length(int k) const {
  return norm(verts_[bd_[k][1]] - verts_[bd_[k][0]]);
}

Vec2 Mesh2D::edge_normal(int e) const {
  Vec2 d = verts_[topo_.edges[e][1]] - verts_[topo_.edges[e][0]];
  return (1.0 / norm(d)) * perp(d);
}

Vec2 Mesh2D::boundary_outward_normal(int k) const {
  Vec2 d = verts_[bd_[k][1]] - verts_[bd_[k][0]];
  return (1.0 / norm(d)) * perp(d);
}

double Mesh2D::min_angle() const {
  double best = M_PI;
  for (int t = 0; t < num_triangles(); ++t) {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i) {
      Vec2 d1 = verts_[v[(i + 1) % 3]] - verts_[v[i]];
      Vec2 d2 = verts_[v[(i + 2) % 3]] - verts_[v[i]];
      best = std::min(best, std::atan2(std::abs(cross(d1, d2)), dot(d1, d2)));
    }
  }
  return best;
}

std::vector<int> Mesh2D::vertex_patch(int v) const {
  std::vector<int> patch;
  for (int t = 0; t < num_triangles(); ++t)
    if (tris_[t].v[0] == v || tris_[t].v[1] == v || tris_[t].v[2] == v) patch.push_back(t);
  return patch;
}

int Mesh2D::boundary_edge_at_arc(double s) const {
  double L = perimeter_;
  s -= L * std::floor(s / L);
  auto it = std::upper_bound(bdArc_.begin(), bdArc_.end(), s);
  int k = static_cast<int>(it - bdArc_.begin()) - 1;
  if (k >= num_boundary_edges()) k = num_boundary_edges() - 1;
  if (k < 0) k = 0;
  return k;
}

Vec2 Mesh2D::point_at_arc(double s) const {
  double L = perimeter_;
  s -= L * std::floor(s / L);
  int k = boundary_edge_at_arc(s);
  double len = bdArc_[k + 1] - bdArc_[k];
  double t = (s - bdArc_[k]) / len;
  return verts_[bd_[k][0]] + t * (verts_[bd_[k][1]] - verts_[bd_[k][0]]);
}

int Mesh2D::trace_node_of_vertex(int v) const { return traceNode_[v]; }

void Mesh2D::dump(std::ostream& os) const {
  os << std::setprecision(17);
  os << num_vertices() << ' ' << num_triangles() << ' ' << num_boundary_edges() << '\n';
  for (const auto& p : verts_) os << p.x << ' ' << p.y << '\n';
  for (const auto& t : tris_)
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.refEdge << ' ' << t.gen << '\n';
  for (const auto& b : bd_) os << b[0] << ' ' << b[1] << '\n';
}

namespace {

// Order the topological boundary of a triangle soup into a closed CCW chain.
// Directed edges are taken in triangle-local direction, so the interior stays
// on the left.  The chain starts at the lexicographically smallest (y,x) vertex.
std::vector<std::array<int, 2>> derive_boundary_chain(const std::vector<Vec2>& verts,
                                                      const std::vector<Triangle>& tris) {
  std::unordered_map<std::int64_t, int> count;
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) count[pack_pair(t.v[e], t.v[(e + 1) % 3])]++;
  std::unordered_map<int, std::array<int, 2>> next; // start vertex -> directed edge
  for (const auto& t : tris)
    for (int e = 0; e < 3; ++e) {
      int a = t.v[e], b = t.v[(e + 1) % 3];
      if (count[pack_pair(a, b)] == 1) next[a] = {a, b};
    }
  if (next.empty()) throw MeshError("mesh has no boundary");
  int start = next.begin()->first;
  for (const auto& [v, edge] : next) {
    (void)edge;
    if (verts[v].y < verts[start].y ||
        (verts[v].y == verts[start].y && verts[v].x < verts[start].x))
      start = v;
  }
  std::vector<std::array<int, 2>> chain;
  int cur = start;
  do {
    auto it = next.find(cur);
    if (it == next.end()) throw MeshError("boundary walk failed (open chain)");
    chain.push_back(it->second);
    cur = it->second[1];
  } while (cur != start && chain.size() <= next.size());
  if (cur != start || chain.size() != next.size())
    throw MeshError("boundary is not a single closed chain");
  return chain;
}

void add_crisscross_cell(std::vector<Vec2>& verts, std::vector<Triangle>& tris,
                         int sw, int se, int ne, int nw, Vec2 center) {
  int c = static_cast<int>(verts.size());
  verts.push_back(center);
  // outer cell edge is the strict longest side, so it is the refinement edge
  tris.push_back({{sw, se, c}, 0, 0, -1});
  tris.push_back({{se, ne, c}, 0, 0, -1});
  tris.push_back({{ne, nw, c}, 0, 0, -1});
  tris.push_back({{nw, sw, c}, 0, 0, -1});
}

} // namespace

Mesh2D create_unit_square(int n) {
  if (n < 1) throw MeshError("create_unit_square needs n >= 1");
  std::vector<Vec2> verts;
  const double h = 1.0 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.push_back({i * h, j * h});
  auto corner = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Triangle> tris;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      add_crisscross_cell(verts, tris, corner(i, j), corner(i + 1, j), corner(i + 1, j + 1),
                          corner(i, j + 1), {(i + 0.5) * h, (j + 0.5) * h});
  auto bd = derive_boundary_chain(verts, tris);
  return Mesh2D(std::move(verts), std::move(tris), std::move(bd));
}

Mesh2D create_lshape(int n) {
  if (n < 1) throw MeshError("create_lshape needs n >= 1");
  const int g = 2 * n;
  const double h = 1.0 / g;
  auto keep = [n, g](int i, int j) { return !(i >= n && j < n) && i < g && j < g; };
  std::vector<Vec2> verts;
  std::vector<int> cornerId((g + 1) * (g + 1), -1);
  auto gridIndex = [g](int i, int j) { return j * (g + 1) + i; };
  for (int j = 0; j <= g; ++j)
    for (int i = 0; i <= g; ++i) {
      bool used = false;
      for (int dj = -1; dj <= 0 && !used; ++dj)
        for (int di = -1; di <= 0 && !used; ++di)
          if (i + di >= 0 && j + dj >= 0 && keep(i + di, j + dj)) used = true;
      if (used) {
        cornerId[gridIndex(i, j)] = static_cast<int>(verts.size());
        verts.push_back({i * h, j * h});
      }
    }
  std::vector<Triangle> tris;
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < g; ++i)
      if (keep(i, j))
        add_crisscross_cell(verts, tris, cornerId[gridIndex(i, j)], cornerId[gridIndex(i + 1, j)],
                            cornerId[gridIndex(i + 1, j + 1)], cornerId[gridIndex(i, j + 1)],
                            {(i + 0.5) * h, (j + 0.5) * h});
  auto bd = derive_boundary_chain(verts, tris);
  return Mesh2D(std::move(verts), std::move(tris), std::move(bd));
}

namespace {

// Recursive NVB split of one triangle against the midpoint table.  Children
// are (peak, refA, mid) and (refB, peak, mid) with refinement edge 0, i.e.
// the two remaining parent edges become the children's refinement edges.
void split_triangle(const std::array<int, 3>& v, int refEdge, int gen, int parent,
                    const std::unordered_map<std::int64_t, int>& midOf,
                    std::vector<Triangle>& out) {
  int a = v[refEdge], b = v[(refEdge + 1) % 3], c = v[(refEdge + 2) % 3];
  auto it = midOf.find(pack_pair(a, b));
  if (it == midOf.end()) {
    out.push_back({v, refEdge, gen, parent});
    return;
  }
  int m = it->second;
  split_triangle({c, a, m}, 0, gen + 1, parent, midOf, out);
  split_triangle({b, c, m}, 0, gen + 1, parent, midOf, out);
}

} // namespace

Mesh2D bisect(const Mesh2D& mesh, std::span<const int> markedTriangles,
              std::span<const int> markedBoundaryEdges) {
  const auto& topo = mesh.topology();
  const int ne = static_cast<int>(topo.edges.size());
  std::vector<char> marked(ne, 0);
  for (int t : markedTriangles) {
    if (t < 0 || t >= mesh.num_triangles()) throw MeshError("marked triangle out of range");
    marked[topo.triEdges[t][mesh.triangles()[t].refEdge]] = 1;
  }
  for (int k : markedBoundaryEdges) {
    if (k < 0 || k >= mesh.num_boundary_edges()) throw MeshError("marked boundary edge out of range");
    marked[topo.edgeOfBoundaryEdge[k]] = 1;
  }

  // conforming closure: a triangle with any marked edge gets its refinement
  // edge marked too; iterate to the fixpoint
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& te = topo.triEdges[t];
      if (marked[te[0]] || marked[te[1]] || marked[te[2]]) {
        int re = te[mesh.triangles()[t].refEdge];
        if (!marked[re]) {
          marked[re] = 1;
          changed = true;
        }
      }
    }
  }

  std::vector<Vec2> verts = mesh.vertices();
  std::unordered_map<std::int64_t, int> midOf;
  for (int e = 0; e < ne; ++e)
    if (marked[e]) {
      int a = topo.edges[e][0], b = topo.edges[e][1];
      midOf.emplace(pack_pair(a, b), static_cast<int>(verts.size()));
      verts.push_back(midpoint(mesh.vertex(a), mesh.vertex(b)));
    }

  std::vector<Triangle> tris;
  tris.reserve(mesh.num_triangles() * 2);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    split_triangle(tri.v, tri.refEdge, tri.gen, t, midOf, tris);
  }

  std::vector<std::array<int, 2>> bd;
  bd.reserve(mesh.num_boundary_edges());
  for (const auto& e : mesh.boundary_edges()) {
    auto it = midOf.find(pack_pair(e[0], e[1]));
    if (it == midOf.end()) {
      bd.push_back(e);
    } else {
      bd.push_back({e[0], it->second});
      bd.push_back({it->second, e[1]});
    }
  }
  return Mesh2D(std::move(verts), std::move(tris), std::move(bd));
}

Mesh2D uniform_refine(const Mesh2D& mesh) {
  // marking every edge sends each triangle through both bisection
  // generations at once: four similar children, nested vertices
  const auto& topo = mesh.topology();
  std::vector<Vec2> verts = mesh.vertices();
  std::unordered_map<std::int64_t, int> midOf;
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    int a = topo.edges[e][0], b = topo.edges[e][1];
    midOf.emplace(pack_pair(a, b), static_cast<int>(verts.size()));
    verts.push_back(midpoint(mesh.vertex(a), mesh.vertex(b)));
  }
  std::vector<Triangle> tris;
  tris.reserve(mesh.num_triangles() * 4);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    split_triangle(tri.v, tri.refEdge, tri.gen, t, midOf, tris);
  }
  std::vector<std::array<int, 2>> bd;
  bd.reserve(mesh.num_boundary_edges() * 2);
  for (const auto& e : mesh.boundary_edges()) {
    int m = midOf.at(pack_pair(e[0], e[1]));
    bd.push_back({e[0], m});
    bd.push_back({m, e[1]});
  }
  return Mesh2D(std::move(verts), std::move(tris), std::move(bd));
}

} // namespace dynbc
