#include "dynbc/assembly.hpp"

#include <iomanip>
#include <ostream>

#include "dynbc/quadrature.hpp"

namespace dynbc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void sample_alpha(const SchemeConfig& scheme, const Mesh2D& mesh, int t, double* a) {
  const auto& v = mesh.triangles()[t].v;
  for (int i = 0; i < 3; ++i)
    a[i] = scheme.alpha ? scheme.alpha(mesh.vertex(v[i])) : 1.0;
}

void sample_kappa(const SchemeConfig& scheme, const Mesh2D& bulk, const GammaSegment& seg,
                  double* k) {
  if (!scheme.kappa) {
    k[0] = k[1] = 1.0;
    return;
  }
  k[0] = scheme.kappa(bulk.point_at_arc(seg.s0));
  k[1] = scheme.kappa(bulk.point_at_arc(seg.s1));
}

} // namespace

SaddleSystem assemble(const DofMap& dofs, const ProblemData& data) {
  const Mesh2D& mesh = dofs.bulk();
  const GammaMesh& gamma = dofs.gamma();
  const SchemeConfig& scheme = dofs.scheme();
  const int deg = scheme.bulkDegree;
  const int nd = dofs.bulk_dofs_per_tri();
  const double sigma = data.sigma;

  SaddleSystem sys;
  sys.dimV = dofs.dimV();
  sys.dimQ = dofs.dimQ();
  sys.dimM = dofs.dimM();
  sys.F = Eigen::VectorXd::Zero(sys.dimV);
  sys.G = Eigen::VectorXd::Zero(sys.dimQ);

  // bulk block and load
  Triplets tAu;
  tAu.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nd * nd);
  const auto& triRule = tri_rule_deg5();
  int gd[6];
  double N[6];
  Vec2 G[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    TriGeom geom = tri_geom(mesh, t);
    double a[3];
    sample_alpha(scheme, mesh, t, a);
    dofs.bulk_tri_dofs(t, gd);
    double mass[36] = {0}, stiff[36] = {0}, load[6] = {0};
    const auto& v = mesh.triangles()[t].v;
    Vec2 x0 = mesh.vertex(v[0]), x1 = mesh.vertex(v[1]), x2 = mesh.vertex(v[2]);
    for (const auto& qp : triRule) {
      eval_bulk_basis(deg, qp.l0, qp.l1, qp.l2, N);
      eval_bulk_basis_grad(deg, geom, qp.l0, qp.l1, qp.l2, G);
      double alpha = a[0] * qp.l0 + a[1] * qp.l1 + a[2] * qp.l2;
      Vec2 x = qp.l0 * x0 + qp.l1 * x1 + qp.l2 * x2;
      double w = qp.w * geom.area;
      double fval = data.f ? data.f(x) : 0.0;
      for (int i = 0; i < nd; ++i) {
        load[i] += w * fval * N[i];
        for (int j = 0; j < nd; ++j) {
          mass[i * nd + j] += w * N[i] * N[j];
          stiff[i * nd + j] += w * alpha * dot(G[i], G[j]);
        }
      }
    }
    for (int i = 0; i < nd; ++i) {
      double shifted = load[i];
      if (data.uShift)
        for (int j = 0; j < nd; ++j)
          shifted += data.shiftFactor * mass[i * nd + j] * (*data.uShift)[gd[j]];
      sys.F[gd[i]] += shifted;
      for (int j = 0; j < nd; ++j)
        tAu.emplace_back(gd[i], gd[j], sigma * mass[i * nd + j] + stiff[i * nd + j]);
    }
  }
  sys.Au.resize(sys.dimV, sys.dimV);
  sys.Au.setFromTriplets(tAu.begin(), tAu.end());

  // surface block and load
  const int sdeg = scheme.surfaceDegree;
  const int snd = sdeg + 1;
  const auto& lineRule = line_rule_deg9();
  Triplets tAp;
  tAp.reserve(static_cast<std::size_t>(gamma.num_segments()) * snd * snd);
  for (int s = 0; s < gamma.num_segments(); ++s) {
    const auto& seg = gamma.segments()[s];
    const auto& sd = dofs.segment_dofs()[s];
    int qd[3] = {sd.qL, sd.qR, sd.qM};
    double h = seg.s1 - seg.s0;
    double k[2];
    sample_kappa(scheme, mesh, seg, k);
    double mass[9] = {0}, stiff[9] = {0}, load[3] = {0};
    double Ns[3], dNs[3];
    for (const auto& qp : lineRule) {
      eval_line_basis(sdeg, qp.t, Ns);
      eval_line_basis_deriv(sdeg, qp.t, dNs);
      double kappa = k[0] * (1.0 - qp.t) + k[1] * qp.t;
      double sArc = seg.s0 + qp.t * h;
      double gval = data.g ? data.g(sArc) : 0.0;
      for (int i = 0; i < snd; ++i) {
        load[i] += qp.w * h * gval * Ns[i];
        for (int j = 0; j < snd; ++j) {
          mass[i * snd + j] += qp.w * h * Ns[i] * Ns[j];
          stiff[i * snd + j] += qp.w * kappa * dNs[i] * dNs[j] / h;
        }
      }
    }
    for (int i = 0; i < snd; ++i) {
      double shifted = load[i];
      if (data.pShift)
        for (int j = 0; j < snd; ++j)
          shifted += data.shiftFactor * mass[i * snd + j] * (*data.pShift)[qd[j]];
      sys.G[qd[i]] += shifted;
      for (int j = 0; j < snd; ++j)
        tAp.emplace_back(qd[i], qd[j], sigma * mass[i * snd + j] + stiff[i * snd + j]);
    }
  }
  sys.Ap.resize(sys.dimQ, sys.dimQ);
  sys.Ap.setFromTriplets(tAp.begin(), tAp.end());

  // coupling blocks, integrated segment-wise on T_Gamma (the common refinement)
  Triplets tCu, tCp;
  const int mnd = scheme.multiplier == MultiplierKind::P1Trace ? 2 : 1;
  const int vnd = deg + 1; // trace dofs of the parent edge
  for (int s = 0; s < gamma.num_segments(); ++s) {
    const auto& seg = gamma.segments()[s];
    const auto& sd = dofs.segment_dofs()[s];
    const auto& ed = dofs.boundary_edge_dofs()[seg.parentEdge];
    int qd[3] = {sd.qL, sd.qR, sd.qM};
    int vd[3] = {ed.vA, ed.vB, ed.vMid};
    int md[2] = {ed.m0, ed.m1};
    double h = seg.s1 - seg.s0;
    double hE = ed.arcB - ed.arcA;
    double Nq[3], Nv[3], Nm[2];
    for (const auto& qp : lineRule) {
      double sArc = seg.s0 + qp.t * h;
      double te = (sArc - ed.arcA) / hE;
      eval_line_basis(sdeg, qp.t, Nq);
      eval_line_basis(deg, te, Nv);
      if (mnd == 2)
        eval_line_basis(1, te, Nm);
      else
        Nm[0] = 1.0;
      double w = qp.w * h;
      for (int m = 0; m < mnd; ++m) {
        for (int i = 0; i < vnd; ++i) tCu.emplace_back(md[m], vd[i], w * Nm[m] * Nv[i]);
        for (int i = 0; i < snd; ++i) tCp.emplace_back(md[m], qd[i], w * Nm[m] * Nq[i]);
      }
    }
  }
  sys.Cu.resize(sys.dimM, sys.dimV);
  sys.Cu.setFromTriplets(tCu.begin(), tCu.end());
  sys.Cp.resize(sys.dimM, sys.dimQ);
  sys.Cp.setFromTriplets(tCp.begin(), tCp.end());
  return sys;
}

Eigen::SparseMatrix<double> SaddleSystem::global() const {
  Triplets t;
  t.reserve(Au.nonZeros() + Ap.nonZeros() + 2 * Cu.nonZeros() + 2 * Cp.nonZeros());
  const int oQ = dimV, oM = dimV + dimQ;
  for (int k = 0; k < Au.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Au, k); it; ++it)
      t.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < Ap.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Ap, k); it; ++it)
      t.emplace_back(oQ + it.row(), oQ + it.col(), it.value());
  for (int k = 0; k < Cu.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Cu, k); it; ++it) {
      t.emplace_back(it.col(), oM + it.row(), -it.value());
      t.emplace_back(oM + it.row(), it.col(), -it.value());
    }
  for (int k = 0; k < Cp.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Cp, k); it; ++it) {
      t.emplace_back(oQ + it.col(), oM + it.row(), it.value());
      t.emplace_back(oM + it.row(), oQ + it.col(), it.value());
    }
  Eigen::SparseMatrix<double> m(dim_total(), dim_total());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd apply_saddle(const SaddleSystem& sys, const Eigen::VectorXd& x) {
  const auto xU = x.segment(0, sys.dimV);
  const auto xP = x.segment(sys.dimV, sys.dimQ);
  const auto xM = x.segment(sys.dimV + sys.dimQ, sys.dimM);
  Eigen::VectorXd y(sys.dim_total());
  y.segment(0, sys.dimV) = sys.Au * xU - sys.Cu.transpose() * xM;
  y.segment(sys.dimV, sys.dimQ) = sys.Ap * xP + sys.Cp.transpose() * xM;
  y.segment(sys.dimV + sys.dimQ, sys.dimM) = -(sys.Cu * xU) + sys.Cp * xP;
  return y;
}

Eigen::SparseMatrix<double> h1_norm_matrix_bulk(const DofMap& dofs) {
  const Mesh2D& mesh = dofs.bulk();
  const int deg = dofs.scheme().bulkDegree;
  const int nd = dofs.bulk_dofs_per_tri();
  Triplets trip;
  int gd[6];
  double N[6];
  Vec2 G[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    TriGeom geom = tri_geom(mesh, t);
    dofs.bulk_tri_dofs(t, gd);
    for (const auto& qp : tri_rule_deg5()) {
      eval_bulk_basis(deg, qp.l0, qp.l1, qp.l2, N);
      eval_bulk_basis_grad(deg, geom, qp.l0, qp.l1, qp.l2, G);
      double w = qp.w * geom.area;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          trip.emplace_back(gd[i], gd[j], w * (N[i] * N[j] + dot(G[i], G[j])));
    }
  }
  Eigen::SparseMatrix<double> m(dofs.dimV(), dofs.dimV());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> h1_norm_matrix_gamma(const DofMap& dofs) {
  const GammaMesh& gamma = dofs.gamma();
  const int sdeg = dofs.scheme().surfaceDegree;
  const int snd = sdeg + 1;
  Triplets trip;
  double Ns[3], dNs[3];
  for (int s = 0; s < gamma.num_segments(); ++s) {
    const auto& sd = dofs.segment_dofs()[s];
    int qd[3] = {sd.qL, sd.qR, sd.qM};
    double h = gamma.segment_length(s);
    for (const auto& qp : line_rule_deg9()) {
      eval_line_basis(sdeg, qp.t, Ns);
      eval_line_basis_deriv(sdeg, qp.t, dNs);
      for (int i = 0; i < snd; ++i)
        for (int j = 0; j < snd; ++j)
          trip.emplace_back(qd[i], qd[j], qp.w * (h * Ns[i] * Ns[j] + dNs[i] * dNs[j] / h));
    }
  }
  Eigen::SparseMatrix<double> m(dofs.dimQ(), dofs.dimQ());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::SparseMatrix<double> multiplier_norm_matrix(const DofMap& dofs) {
  const GammaMesh& gamma = dofs.gamma();
  const int mnd = dofs.scheme().multiplier == MultiplierKind::P1Trace ? 2 : 1;
  Triplets trip;
  double Nm[2] = {1.0, 0.0};
  for (int s = 0; s < gamma.num_segments(); ++s) {
    const auto& seg = gamma.segments()[s];
    const auto& ed = dofs.boundary_edge_dofs()[seg.parentEdge];
    int md[2] = {ed.m0, ed.m1};
    double h = seg.s1 - seg.s0;
    // weight is the length of the trace edge the basis lives on, so the norm
    // does not depend on how finely the surface mesh subdivides it
    double hE = ed.arcB - ed.arcA;
    for (const auto& qp : line_rule_deg9()) {
      if (mnd == 2) {
        double te = (seg.s0 + qp.t * h - ed.arcA) / hE;
        eval_line_basis(1, te, Nm);
      }
      for (int i = 0; i < mnd; ++i)
        for (int j = 0; j < mnd; ++j)
          trip.emplace_back(md[i], md[j], qp.w * hE * h * Nm[i] * Nm[j]);
    }
  }
  Eigen::SparseMatrix<double> m(dofs.dimM(), dofs.dimM());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void dump_matrix(std::ostream& os, const Eigen::SparseMatrix<double>& m) {
  os << std::setprecision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace dynbc
