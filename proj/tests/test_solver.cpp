#include "doctest.h"
#include "test_support.hpp"

using namespace dynbc;

namespace {

std::shared_ptr<const DofMap> spaces_of(const AdaptState& st) {
  return build_spaces(st.bulk, st.gamma, st.scheme);
}

// u random, p the exact trace samples, lambda random: the only triples that
// satisfy the constraint row exactly, which a round-trip needs
SolutionTriple consistent_triple(std::mt19937& gen, std::shared_ptr<const DofMap> dofs) {
  SolutionTriple x;
  x.dofs = dofs;
  x.u = testsup::random_vector(gen, dofs->dimV());
  x.lambda = testsup::random_vector(gen, dofs->dimM());
  x.p.assign(dofs->dimQ(), 0.0);
  for (int s = 0; s < dofs->gamma().num_segments(); ++s) {
    const auto& sd = dofs->segment_dofs()[s];
    x.p[sd.qL] = evaluate_trace_on_segment(*dofs, x.u, s, 0.0);
    x.p[sd.qR] = evaluate_trace_on_segment(*dofs, x.u, s, 1.0);
    if (sd.qM >= 0) x.p[sd.qM] = evaluate_trace_on_segment(*dofs, x.u, s, 0.5);
  }
  return x;
}

Eigen::VectorXd stack(const SolutionTriple& x) {
  Eigen::VectorXd v(x.u.size() + x.p.size() + x.lambda.size());
  int i = 0;
  for (double a : x.u) v[i++] = a;
  for (double a : x.p) v[i++] = a;
  for (double a : x.lambda) v[i++] = a;
  return v;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("zero loads give the zero triple") {
  std::mt19937 gen(31);
  AdaptState st = testsup::random_state(gen, false, scheme_p2p0(), 2);
  st.data = {};
  auto dofs = spaces_of(st);
  SolutionTriple sol = solve(assemble(*dofs, st.data), dofs);
  CHECK(stack(sol).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant data is reproduced exactly") {
  std::mt19937 gen(32);
  const double c = 0.8125;
  for (SchemeConfig scheme : {scheme_p1(), scheme_p2p0()}) {
    scheme.alpha = [](Vec2 v) { return 1.0 + v.x * v.x; };
    scheme.kappa = [](Vec2 v) { return 2.0 - v.y; };
    AdaptState st = testsup::random_state(gen, true, scheme, 2, 3.0);
    st.data.f = [c](Vec2) { return 3.0 * c; };
    st.data.g = [c](double) { return 3.0 * c; };
    st.data.sigma = 3.0;
    auto dofs = spaces_of(st);
    SolutionTriple sol = solve(assemble(*dofs, st.data), dofs);
    for (double v : sol.u) CHECK(v == doctest::Approx(c).epsilon(1e-10));
    for (double v : sol.p) CHECK(v == doctest::Approx(c).epsilon(1e-10));
    for (double v : sol.lambda) CHECK(std::abs(v) < 1e-9);
  }
}

TEST_CASE("round trip recovers a manufactured triple") {
  std::mt19937 gen(33);
  for (SchemeConfig scheme : {scheme_p1(), scheme_p2p0(), scheme_p2p1()}) {
    AdaptState st = testsup::random_state(gen, false, scheme, 2);
    auto dofs = spaces_of(st);
    SaddleSystem sys = assemble(*dofs, st.data);
    SolutionTriple want = consistent_triple(gen, dofs);
    Eigen::VectorXd b = apply_saddle(sys, stack(want));
    CHECK(b.tail(sys.dimM).cwiseAbs().maxCoeff() < 1e-12); // constraint-consistent input
    sys.F = b.head(sys.dimV);
    sys.G = b.segment(sys.dimV, sys.dimQ);
    SolutionTriple got = solve(sys, dofs);
    double scale = stack(want).cwiseAbs().maxCoeff();
    CHECK((stack(got) - stack(want)).cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("residual and constraint contracts hold across levels") {
  std::mt19937 gen(34);
  for (int rounds : {0, 3, 6}) {
    AdaptState st = testsup::random_state(gen, true, scheme_p2p0(), rounds);
    auto dofs = spaces_of(st);
    SaddleSystem sys = assemble(*dofs, st.data);
    SolutionTriple sol = solve(sys, dofs);

    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.dim_total());
    b.head(sys.dimV) = sys.F;
    b.segment(sys.dimV, sys.dimQ) = sys.G;
    Eigen::VectorXd r = apply_saddle(sys, stack(sol)) - b;
    double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * bscale);

    Eigen::Map<Eigen::VectorXd> u(sol.u.data(), sys.dimV);
    Eigen::Map<Eigen::VectorXd> p(sol.p.data(), sys.dimQ);
    CHECK((sys.Cu * u - sys.Cp * p).cwiseAbs().maxCoeff() <= 1e-10 * bscale);
  }
}

TEST_CASE("solve is deterministic") {
  std::mt19937 gen(35);
  AdaptState st = testsup::random_state(gen, false, scheme_p1(), 3);
  auto dofs = spaces_of(st);
  SaddleSystem sys = assemble(*dofs, st.data);
  SolutionTriple a = solve(sys, dofs);
  SolutionTriple b = solve(sys, dofs);
  CHECK(a.u == b.u);
  CHECK(a.p == b.p);
  CHECK(a.lambda == b.lambda);
}

TEST_CASE("a singular system is reported, not returned") {
  std::mt19937 gen(36);
  AdaptState st = testsup::random_state(gen, false, scheme_p1(), 1);
  auto dofs = spaces_of(st);
  SaddleSystem sys = assemble(*dofs, st.data);
  sys.Au.setZero();
  CHECK_THROWS_AS(solve(sys, dofs), NumericalError);
}

TEST_CASE("prolongation is the identity on the function") {
  std::mt19937 gen(37);
  for (SchemeConfig scheme : {scheme_p1(), scheme_p2p0()}) {
    AdaptState st = testsup::random_state(gen, false, scheme, 2);
    auto coarse = spaces_of(st);
    SolutionTriple sol = consistent_triple(gen, coarse);

    AdaptState fineSt = uniform_refine_state(st);
    auto fine = spaces_of(fineSt);
    SolutionTriple pro = prolong(sol, fine);

    std::uniform_real_distribution<double> d(0.0, 1.0);
    PointLocator loc(*st.bulk);
    int done = 0;
    while (done < 100) {
      Vec2 x{d(gen), d(gen)};
      double a, b, c;
      try {
        loc.locate(x, a, b, c);
      } catch (const SpacesError&) {
        continue;
      }
      CHECK(evaluate_bulk(*coarse, sol.u, x) ==
            doctest::Approx(evaluate_bulk(*fine, pro.u, x)).epsilon(1e-13));
      ++done;
    }
    std::uniform_real_distribution<double> ds(0.0, st.bulk->perimeter());
    for (int i = 0; i < 100; ++i) {
      double s = ds(gen);
      CHECK(evaluate_gamma(*coarse, sol.p, s) ==
            doctest::Approx(evaluate_gamma(*fine, pro.p, s)).epsilon(1e-13));
      CHECK(evaluate_multiplier(*coarse, sol.lambda, s) ==
            doctest::Approx(evaluate_multiplier(*fine, pro.lambda, s)).epsilon(1e-13));
    }
  }
}

TEST_CASE("prolongation of constants and functoriality") {
  std::mt19937 gen(38);
  AdaptState st = testsup::random_state(gen, true, scheme_p2p0(), 1);
  auto coarse = spaces_of(st);
  SolutionTriple ones;
  ones.dofs = coarse;
  ones.u.assign(coarse->dimV(), 1.0);
  ones.p.assign(coarse->dimQ(), 1.0);
  ones.lambda.assign(coarse->dimM(), 1.0);

  AdaptState mid = uniform_refine_state(st);
  AdaptState fin = uniform_refine_state(mid);
  auto midDofs = spaces_of(mid);
  auto finDofs = spaces_of(fin);

  SolutionTriple oneFine = prolong(ones, finDofs);
  for (double v : oneFine.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : oneFine.p) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  SolutionTriple sol = consistent_triple(gen, coarse);
  SolutionTriple twice = prolong(prolong(sol, midDofs), finDofs);
  SolutionTriple once = prolong(sol, finDofs);
  CHECK((stack(twice) - stack(once)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("prolongation rejects unrelated meshes") {
  std::mt19937 gen(39);
  AdaptState a = testsup::random_state(gen, false, scheme_p1(), 0);
  AdaptState b = testsup::random_state(gen, true, scheme_p1(), 0);
  auto da = spaces_of(a);
  auto db = spaces_of(b);
  SolutionTriple sol = consistent_triple(gen, da);
  CHECK_THROWS_AS(prolong(sol, db), NumericalError);
}

TEST_CASE("Galerkin orthogonality against the reference solution") {
  std::mt19937 gen(40);
  AdaptState st;
  st.bulk = std::make_shared<Mesh2D>(create_lshape(1));
  st.gamma = std::make_shared<GammaMesh>(GammaMesh::trace_of(*st.bulk));
  st.scheme = scheme_p1();
  // data integrated exactly on every refinement level, so the coarse and fine
  // load functionals agree on embedded test functions
  st.data.f = [](Vec2 v) { return 1.0 + v.x - 2.0 * v.y; };
  st.data.g = [](double) { return 0.3; };

  auto coarse = spaces_of(st);
  SolutionTriple xc = solve(assemble(*coarse, st.data), coarse);

  AdaptState fineSt = uniform_refine_state(uniform_refine_state(st));
  auto fine = spaces_of(fineSt);
  SaddleSystem fineSys = assemble(*fine, st.data);
  SolutionTriple xf = solve(fineSys, fine);

  Eigen::VectorXd err = stack(prolong(xc, fine)) - stack(xf);
  Eigen::VectorXd Ae = apply_saddle(fineSys, err);
  for (int trial = 0; trial < 10; ++trial) {
    SolutionTriple vc = consistent_triple(gen, coarse);
    Eigen::VectorXd pv = stack(prolong(vc, fine));
    double dot = std::abs(pv.dot(Ae));
    CHECK(dot <= 1e-8 * pv.norm() * Ae.norm());
  }
}

TEST_CASE("solve_reference refines twice and stays nested") {
  std::mt19937 gen(41);
  AdaptState st = testsup::random_state(gen, false, scheme_p1(), 1);
  SolutionTriple ref = solve_reference(st);
  CHECK(ref.dofs->bulk().num_triangles() == 16 * st.bulk->num_triangles());
  CHECK(ref.dofs->gamma().num_segments() == 4 * st.gamma->num_segments());
}

TEST_CASE("inf-sup diagnostic is stable under surface refinement") {
  Mesh2D bulk = create_unit_square(2);
  for (SchemeConfig scheme : {scheme_p1(), scheme_p2p0(), scheme_p2p1()}) {
    auto bp = std::make_shared<Mesh2D>(bulk);
    auto g0 = std::make_shared<GammaMesh>(GammaMesh::trace_of(*bp));
    double beta = infsup_constant(*build_spaces(bp, g0, scheme));
    CHECK(beta > 0.05);
    CHECK(beta < 2.0);

    std::vector<int> all(g0->num_segments());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    auto g1 = std::make_shared<GammaMesh>(refine_gamma(*g0, all, *bp));
    double betaFine = infsup_constant(*build_spaces(bp, g1, scheme));
    CHECK(std::abs(betaFine - beta) / beta < 0.2);
  }
}

} // TEST_SUITE
