#include "dynbc/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

namespace dynbc {

SolutionTriple solve(const SaddleSystem& sys, std::shared_ptr<const DofMap> dofs) {
  const int n = sys.dim_total();
  Eigen::SparseMatrix<double> A = sys.global();
  A.makeCompressed();
  Eigen::VectorXd b(n);
  b.segment(0, sys.dimV) = sys.F;
  b.segment(sys.dimV, sys.dimQ) = sys.G;
  b.segment(sys.dimV + sys.dimQ, sys.dimM).setZero();

  // symmetric equilibration: the constraint rows shrink with the local edge
  // length, and without rescaling the multiplier block of deeply graded
  // meshes loses most of its accuracy to the condition number
  Eigen::VectorXd rowMax = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rowSum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      rowMax[it.row()] = std::max(rowMax[it.row()], std::abs(it.value()));
      rowSum[it.row()] += std::abs(it.value());
    }
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = rowMax[i] > 0.0 ? 1.0 / std::sqrt(rowMax[i]) : 1.0;
  Eigen::SparseMatrix<double> As = d.asDiagonal() * A * d.asDiagonal();
  As.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(As);
  if (lu.info() != Eigen::Success) throw NumericalError("saddle factorization failed");
  Eigen::VectorXd x = d.asDiagonal() * Eigen::VectorXd(lu.solve(d.asDiagonal() * b));
  if (lu.info() != Eigen::Success) throw NumericalError("saddle solve failed");

  // relative residual in the backward-error sense: ||Ax-b|| against
  // ||A||*||x|| + ||b||, all infinity norms; iterative refinement against the
  // blockwise operator usually reaches machine level in one round
  const double normA = rowSum.maxCoeff();
  const double normB = b.lpNorm<Eigen::Infinity>();
  auto rel_res = [&](const Eigen::VectorXd& y) {
    return (apply_saddle(sys, y) - b).lpNorm<Eigen::Infinity>() /
           (normA * y.lpNorm<Eigen::Infinity>() + normB + 1e-300);
  };
  double res = rel_res(x);
  for (int round = 0; round < 3 && !(res <= 1e-10); ++round) {
    Eigen::VectorXd r = b - apply_saddle(sys, x);
    x += d.asDiagonal() * Eigen::VectorXd(lu.solve(d.asDiagonal() * r));
    res = rel_res(x);
  }
  if (!(res <= 1e-10)) throw NumericalError("saddle solve residual exceeds tolerance");

  SolutionTriple sol;
  sol.dofs = std::move(dofs);
  sol.u.assign(x.data(), x.data() + sys.dimV);
  sol.p.assign(x.data() + sys.dimV, x.data() + sys.dimV + sys.dimQ);
  sol.lambda.assign(x.data() + sys.dimV + sys.dimQ, x.data() + sys.dim_total());
  return sol;
}

namespace {

std::uint64_t coord_key(double v) {
  std::uint64_t k;
  static_assert(sizeof(k) == sizeof(v));
  std::memcpy(&k, &v, sizeof(k));
  return k;
}

struct PointKey {
  std::uint64_t x, y;
  bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& p) const {
    return std::hash<std::uint64_t>()(p.x * 1000003u ^ p.y);
  }
};

void check_nested(const Mesh2D& coarse, const Mesh2D& fine) {
  std::unordered_set<PointKey, PointKeyHash> fineVerts;
  fineVerts.reserve(fine.num_vertices());
  for (const auto& v : fine.vertices()) fineVerts.insert({coord_key(v.x), coord_key(v.y)});
  for (const auto& v : coarse.vertices())
    if (!fineVerts.count({coord_key(v.x), coord_key(v.y)}))
      throw NumericalError("prolongation requires nested meshes");
}

void check_nested_gamma(const GammaMesh& coarse, const GammaMesh& fine) {
  const double tol = 1e-9 * coarse.total_length();
  std::vector<double> ends;
  ends.reserve(fine.num_segments());
  for (const auto& s : fine.segments()) ends.push_back(s.s0);
  for (const auto& s : coarse.segments()) {
    auto it = std::lower_bound(ends.begin(), ends.end(), s.s0 - tol);
    if (it == ends.end() || std::abs(*it - s.s0) > tol)
      throw NumericalError("prolongation requires nested meshes");
  }
}

} // namespace

SolutionTriple prolong(const SolutionTriple& sol, std::shared_ptr<const DofMap> fine) {
  const DofMap& cd = *sol.dofs;
  const DofMap& fd = *fine;
  check_nested(cd.bulk(), fd.bulk());
  check_nested_gamma(cd.gamma(), fd.gamma());

  SolutionTriple out;
  out.dofs = fine;
  out.u.assign(fd.dimV(), 0.0);
  out.p.assign(fd.dimQ(), 0.0);
  out.lambda.assign(fd.dimM(), 0.0);

  PointLocator loc(cd.bulk());
  auto evalCoarse = [&](Vec2 x) {
    double l0, l1, l2;
    int t = loc.locate(x, l0, l1, l2);
    return evaluate_bulk_local(cd, sol.u, t, l0, l1, l2);
  };
  const Mesh2D& fb = fd.bulk();
  for (int v = 0; v < fb.num_vertices(); ++v) out.u[v] = evalCoarse(fb.vertex(v));
  if (fd.scheme().bulkDegree == 2) {
    const auto& edges = fb.topology().edges;
    for (std::size_t e = 0; e < edges.size(); ++e)
      out.u[fb.num_vertices() + e] =
          evalCoarse(midpoint(fb.vertex(edges[e][0]), fb.vertex(edges[e][1])));
  }

  const GammaMesh& fg = fd.gamma();
  for (int s = 0; s < fg.num_segments(); ++s) {
    out.p[s] = evaluate_gamma(cd, sol.p, fg.segments()[s].s0);
    if (fd.scheme().surfaceDegree == 2)
      out.p[fg.num_segments() + s] =
          evaluate_gamma(cd, sol.p, 0.5 * (fg.segments()[s].s0 + fg.segments()[s].s1));
  }

  if (fd.scheme().multiplier == MultiplierKind::P1Trace) {
    for (int k = 0; k < fb.num_boundary_edges(); ++k)
      out.lambda[k] = evaluate_multiplier(cd, sol.lambda, fb.boundary_arc(k));
  } else {
    for (int k = 0; k < fb.num_boundary_edges(); ++k)
      out.lambda[k] = evaluate_multiplier(
          cd, sol.lambda, 0.5 * (fb.boundary_arc(k) + fb.boundary_arc(k + 1)));
  }
  return out;
}

double infsup_constant(const DofMap& dofs) {
  if (dofs.dimM() == 0) throw SpacesError("inf-sup diagnostic needs a nonempty multiplier space");
  if (dofs.dim_total() > 20000)
    throw SpacesError("inf-sup diagnostic is dense; space too large");

  ProblemData unit; // loads irrelevant, only the coupling blocks are needed
  unit.sigma = 1.0;
  SaddleSystem sys = assemble(dofs, unit);

  const int nX = dofs.dimV() + dofs.dimQ();
  Eigen::MatrixXd NX = Eigen::MatrixXd::Zero(nX, nX);
  NX.topLeftCorner(dofs.dimV(), dofs.dimV()) = Eigen::MatrixXd(h1_norm_matrix_bulk(dofs));
  NX.bottomRightCorner(dofs.dimQ(), dofs.dimQ()) = Eigen::MatrixXd(h1_norm_matrix_gamma(dofs));

  Eigen::MatrixXd C(dofs.dimM(), nX);
  C.leftCols(dofs.dimV()) = Eigen::MatrixXd(sys.Cu);
  C.rightCols(dofs.dimQ()) = -Eigen::MatrixXd(sys.Cp);

  Eigen::LLT<Eigen::MatrixXd> llt(NX);
  if (llt.info() != Eigen::Success) throw NumericalError("norm matrix not positive definite");
  Eigen::MatrixXd S = C * llt.solve(C.transpose());
  S = 0.5 * (S + S.transpose()).eval();

  Eigen::MatrixXd NM = Eigen::MatrixXd(multiplier_norm_matrix(dofs));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(S, NM);
  if (ges.info() != Eigen::Success) throw NumericalError("inf-sup eigensolve failed");
  double lmin = ges.eigenvalues()(0);
  return std::sqrt(std::max(lmin, 0.0));
}

} // namespace dynbc
