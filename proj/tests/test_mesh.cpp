#include "doctest.h"
#include "test_support.hpp"

using namespace dynbc;
using testsup::check_mesh;

namespace {

double total_area(const Mesh2D& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) a += m.tri_area(t);
  return a;
}

// square split along the diagonal into two triangles, refinement edge on the
// diagonal for both
Mesh2D two_tri_square() {
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<Triangle> tris(2);
  tris[0].v = {0, 1, 2};
  tris[0].refEdge = 2; // edge 2-0, the diagonal
  tris[1].v = {0, 2, 3};
  tris[1].refEdge = 0;
  std::vector<std::array<int, 2>> bd = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return Mesh2D(std::move(v), std::move(tris), std::move(bd));
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("unit square construction") {
  Mesh2D m1 = create_unit_square(1);
  CHECK(m1.num_vertices() == 5);
  CHECK(m1.num_triangles() == 4);
  CHECK(m1.num_boundary_edges() == 4);
  CHECK(total_area(m1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m1.perimeter() == doctest::Approx(4.0).epsilon(1e-14));
  check_mesh(m1);

  Mesh2D m2 = create_unit_square(2);
  CHECK(m2.num_vertices() == 13);
  CHECK(m2.num_triangles() == 16);
  CHECK(m2.num_boundary_edges() == 8);
  CHECK(total_area(m2) == doctest::Approx(1.0).epsilon(1e-14));
  check_mesh(m2);

  CHECK_THROWS_AS(create_unit_square(0), MeshError);
}

TEST_CASE("lshape construction") {
  Mesh2D m = create_lshape(1);
  CHECK(total_area(m) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(m.num_boundary_edges() == 8);
  CHECK(m.perimeter() == doctest::Approx(4.0).epsilon(1e-14));
  check_mesh(m);
  // the reentrant region [1/2,1) x (0,1/2] is removed
  for (const Vec2& v : m.vertices()) {
    bool removedInterior = v.x > 0.5 + 1e-12 && v.x < 1.0 - 1e-12 && v.y > 1e-12 &&
                           v.y < 0.5 - 1e-12;
    CHECK_FALSE(removedInterior);
  }
  CHECK_THROWS_AS(create_lshape(0), MeshError);
}

TEST_CASE("bisect splits the marked pair across the shared refinement edge") {
  Mesh2D m = two_tri_square();
  check_mesh(m);
  int marked[] = {0};
  Mesh2D r = bisect(m, marked);
  CHECK(r.num_triangles() == 4);
  CHECK(r.num_vertices() == 5);
  check_mesh(r);
  bool midpointAdded = false;
  for (const Vec2& v : r.vertices())
    if (std::abs(v.x - 0.5) < 1e-14 && std::abs(v.y - 0.5) < 1e-14) midpointAdded = true;
  CHECK(midpointAdded);
  CHECK(total_area(r) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bisect with nothing marked is the identity") {
  Mesh2D m = create_unit_square(2);
  Mesh2D r = bisect(m, {});
  CHECK(r.num_triangles() == m.num_triangles());
  CHECK(r.num_vertices() == m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) {
    CHECK(r.vertex(i).x == m.vertex(i).x);
    CHECK(r.vertex(i).y == m.vertex(i).y);
  }
}

TEST_CASE("bisect marked boundary edges") {
  Mesh2D m = create_unit_square(1);
  int bdMark[] = {0};
  Mesh2D r = bisect(m, {}, std::span<const int>(bdMark, 1));
  check_mesh(r);
  CHECK(r.num_boundary_edges() == m.num_boundary_edges() + 1);
  CHECK(total_area(r) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("uniform refine quarters every triangle and nests vertices") {
  Mesh2D m = create_unit_square(1);
  Mesh2D r = uniform_refine(m);
  CHECK(r.num_triangles() == 4 * m.num_triangles());
  check_mesh(r);
  CHECK(total_area(r) == doctest::Approx(total_area(m)).epsilon(1e-14));
  // original vertices survive in place
  for (int i = 0; i < m.num_vertices(); ++i) {
    CHECK(r.vertex(i).x == doctest::Approx(m.vertex(i).x).epsilon(1e-15));
    CHECK(r.vertex(i).y == doctest::Approx(m.vertex(i).y).epsilon(1e-15));
  }
  CHECK(r.min_angle() >= 0.5 * m.min_angle() - 1e-12);
}

TEST_CASE("children tile their parent") {
  Mesh2D m = create_unit_square(1);
  int marked[] = {0, 2};
  Mesh2D r = bisect(m, marked);
  std::vector<double> childArea(m.num_triangles(), 0.0);
  for (int t = 0; t < r.num_triangles(); ++t) {
    int p = r.triangles()[t].parent;
    REQUIRE(p >= 0);
    REQUIRE(p < m.num_triangles());
    childArea[p] += r.tri_area(t);
  }
  for (int t = 0; t < m.num_triangles(); ++t)
    CHECK(childArea[t] == doctest::Approx(m.tri_area(t)).epsilon(1e-13));
}

TEST_CASE("geometry queries") {
  Mesh2D m = two_tri_square();
  CHECK(m.tri_diameter(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(m.tri_area(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.min_angle() == doctest::Approx(std::atan(1.0)).epsilon(1e-12)); // 45 degrees

  // bottom edge of the square faces downward
  Vec2 n = m.boundary_outward_normal(0);
  CHECK(n.x == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(n.y == doctest::Approx(-1.0).epsilon(1e-14));

  Mesh2D cc = create_unit_square(1);
  // interior edges connect boundary corners to the center vertex
  const auto& topo = cc.topology();
  int interior = 0;
  for (std::size_t e = 0; e < topo.edges.size(); ++e)
    if (topo.edgeTris[e][1] >= 0) {
      ++interior;
      CHECK(topo.edgeTris[e][0] != topo.edgeTris[e][1]);
    }
  CHECK(interior == 4);
  // the center vertex sees all four triangles
  CHECK(cc.vertex_patch(4).size() == 4);
}

TEST_CASE("arc parametrization walks the boundary chain") {
  Mesh2D m = create_unit_square(2);
  CHECK(m.boundary_arc(0) == 0.0);
  CHECK(m.boundary_arc(m.num_boundary_edges()) == doctest::Approx(4.0).epsilon(1e-14));
  for (int k = 0; k < m.num_boundary_edges(); ++k) {
    double mid = 0.5 * (m.boundary_arc(k) + m.boundary_arc(k + 1));
    CHECK(m.boundary_edge_at_arc(mid) == k);
    Vec2 a = m.vertex(m.boundary_edges()[k][0]);
    Vec2 b = m.vertex(m.boundary_edges()[k][1]);
    Vec2 p = m.point_at_arc(mid);
    CHECK(norm(p - midpoint(a, b)) < 1e-13);
  }
  CHECK(m.corner_arcs().size() == 4);
}

TEST_CASE("repeated bisection keeps the minimum angle bounded") {
  Mesh2D m = create_unit_square(1);
  const double bound = 0.5 * m.min_angle() - 1e-12;
  std::mt19937 gen(7);
  for (int round = 0; round < 8; ++round) {
    std::uniform_int_distribution<int> pick(0, m.num_triangles() - 1);
    std::vector<int> marked = {pick(gen), pick(gen)};
    m = bisect(m, marked);
    check_mesh(m);
    CHECK(m.min_angle() >= bound);
  }
}

TEST_CASE("dump format") {
  Mesh2D m = create_unit_square(1);
  std::ostringstream os;
  m.dump(os);
  std::istringstream is(os.str());
  int nv, nt, nb;
  is >> nv >> nt >> nb;
  CHECK(nv == m.num_vertices());
  CHECK(nt == m.num_triangles());
  CHECK(nb == m.num_boundary_edges());
  for (int i = 0; i < nv; ++i) {
    double x, y;
    is >> x >> y;
    CHECK(x == m.vertex(i).x);
    CHECK(y == m.vertex(i).y);
  }
  for (int i = 0; i < nt; ++i) {
    int v0, v1, v2, refEdge, gen;
    is >> v0 >> v1 >> v2 >> refEdge >> gen;
    CHECK(v0 == m.triangles()[i].v[0]);
    CHECK(refEdge == m.triangles()[i].refEdge);
  }
  for (int i = 0; i < nb; ++i) {
    int a, b;
    is >> a >> b;
    CHECK(a == m.boundary_edges()[i][0]);
    CHECK(b == m.boundary_edges()[i][1]);
  }
  CHECK_FALSE(is.fail());
}

TEST_CASE("marks out of range are rejected") {
  Mesh2D m = create_unit_square(1);
  int bad[] = {99};
  CHECK_THROWS_AS(bisect(m, bad), MeshError);
  int badBd[] = {-1};
  CHECK_THROWS_AS(bisect(m, {}, std::span<const int>(badBd, 1)), MeshError);
}

} // TEST_SUITE
