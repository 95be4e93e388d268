#pragma once

#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dynbc/adapt.hpp"

namespace testsup {

using namespace dynbc;

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

inline std::vector<double> random_vector(std::mt19937& gen, int n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

/// Bivariate polynomial of degree <= 2.  Every quadrature rule in the project
/// integrates products of these with the discrete spaces exactly, which keeps
/// oracle comparisons at roundoff level.
struct Poly2 {
  double c[6] = {0, 0, 0, 0, 0, 0};
  double operator()(Vec2 v) const {
    return c[0] + c[1] * v.x + c[2] * v.y + c[3] * v.x * v.y + c[4] * v.x * v.x +
           c[5] * v.y * v.y;
  }
};

inline Poly2 random_poly2(std::mt19937& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Poly2 p;
  for (double& x : p.c) x = d(gen);
  return p;
}

/// Quadratic in the arc-length coordinate.
struct Poly1 {
  double c[3] = {0, 0, 0};
  double operator()(double s) const { return c[0] + c[1] * s + c[2] * s * s; }
};

inline Poly1 random_poly1(std::mt19937& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Poly1 p;
  for (double& x : p.c) x = d(gen);
  return p;
}

/// Conformity check built from scratch: positive CCW areas, every interior
/// edge shared by exactly two triangles, single-triangle edges exactly the
/// boundary chain, and that chain closed and consecutive.
inline void check_mesh(const Mesh2D& mesh) {
  std::map<std::pair<int, int>, int> sides;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    Vec2 a = mesh.vertex(v[0]), b = mesh.vertex(v[1]), c = mesh.vertex(v[2]);
    ensure(cross(b - a, c - a) > 0.0, "triangle not CCW or degenerate");
    for (int e = 0; e < 3; ++e) {
      int s0 = v[e], s1 = v[(e + 1) % 3];
      sides[{std::min(s0, s1), std::max(s0, s1)}]++;
    }
  }
  std::map<std::pair<int, int>, int> bd;
  const auto& chain = mesh.boundary_edges();
  for (std::size_t k = 0; k < chain.size(); ++k) {
    bd[{std::min(chain[k][0], chain[k][1]), std::max(chain[k][0], chain[k][1])}]++;
    ensure(chain[k][1] == chain[(k + 1) % chain.size()][0], "boundary chain broken");
  }
  for (const auto& [key, count] : sides) {
    ensure(count <= 2, "edge shared by more than two triangles");
    ensure(count + bd[key] == 2, "hanging node or boundary mismatch");
  }
}

/// The surface partition against its bulk mesh: contiguous cover of the whole
/// boundary, each segment inside exactly one bulk boundary edge, corner arcs
/// only at segment endpoints, and the rho size ratio.
inline void check_gamma(const GammaMesh& gamma, const Mesh2D& bulk) {
  const double eps = 1e-12 * (1.0 + bulk.perimeter());
  ensure(gamma.num_segments() >= bulk.num_boundary_edges(), "coarser than the trace");
  double cursor = 0.0;
  for (int i = 0; i < gamma.num_segments(); ++i) {
    const auto& seg = gamma.segments()[i];
    ensure(seg.s1 > seg.s0, "empty segment");
    ensure(std::abs(seg.s0 - cursor) < eps, "gap or overlap in the cover");
    cursor = seg.s1;
    ensure(seg.parentEdge >= 0 && seg.parentEdge < bulk.num_boundary_edges(),
           "parent edge out of range");
    double a = bulk.boundary_arc(seg.parentEdge);
    double b = bulk.boundary_arc(seg.parentEdge + 1);
    ensure(seg.s0 > a - eps && seg.s1 < b + eps, "segment leaves its parent edge");
    ensure(b - a <= gamma.rho() * (seg.s1 - seg.s0) + eps, "rho ratio violated");
    for (double corner : bulk.corner_arcs())
      ensure(!(corner > seg.s0 + eps && corner < seg.s1 - eps), "segment crosses a corner");
  }
  ensure(std::abs(cursor - bulk.perimeter()) < eps, "cover does not close");
  ensure(std::abs(gamma.total_length() - bulk.perimeter()) < eps, "total length off");
}

/// A small state on the unit square or L-shape after a few random adaptive
/// refinement rounds; data stays polynomial so quadrature is exact everywhere.
inline AdaptState random_state(std::mt19937& gen, bool lshape, SchemeConfig scheme, int rounds,
                               double sigma = 1.0) {
  AdaptState st;
  st.bulk = std::make_shared<Mesh2D>(lshape ? create_lshape(1) : create_unit_square(1));
  st.gamma = std::make_shared<GammaMesh>(GammaMesh::trace_of(*st.bulk));
  st.scheme = scheme;
  st.data.f = random_poly2(gen);
  st.data.g = random_poly1(gen);
  st.data.sigma = sigma;
  for (int r = 0; r < rounds; ++r) {
    MarkResult marks;
    std::uniform_int_distribution<int> pickT(0, st.bulk->num_triangles() - 1);
    std::uniform_int_distribution<int> pickS(0, st.gamma->num_segments() - 1);
    int nT = 1 + static_cast<int>(gen() % 3);
    for (int i = 0; i < nT; ++i) marks.markedTris.push_back(pickT(gen));
    if (gen() % 2 == 0) marks.markedSegs.push_back(pickS(gen));
    st = refine_state(st, marks);
  }
  return st;
}

} // namespace testsup
