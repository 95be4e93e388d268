#include "dynbc/estimator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "dynbc/quadrature.hpp"

namespace dynbc {

double EstimatorReport::total() const { return std::sqrt(total2); }
double ErrorNorms::total() const { return std::sqrt(errU * errU + errP * errP + errL * errL); }

namespace {

// barycentric coordinates of x in triangle t
void barycentric(const Mesh2D& mesh, int t, Vec2 x, double* l) {
  const auto& v = mesh.triangles()[t].v;
  Vec2 a = mesh.vertex(v[0]), b = mesh.vertex(v[1]), c = mesh.vertex(v[2]);
  double A2 = cross(b - a, c - a);
  l[0] = cross(b - x, c - x) / A2;
  l[1] = cross(c - x, a - x) / A2;
  l[2] = 1.0 - l[0] - l[1];
}

struct ElementData {
  TriGeom geom;
  double alpha[3];   // vertex samples
  Vec2 gradAlpha;    // constant per element
  double lapU;       // sum of coeffs times constant basis Laplacians
  int gd[6];
};

ElementData element_data(const DofMap& dofs, std::span<const double> u, int t) {
  ElementData e;
  const Mesh2D& mesh = dofs.bulk();
  e.geom = tri_geom(mesh, t);
  const auto& v = mesh.triangles()[t].v;
  const auto& alpha = dofs.scheme().alpha;
  for (int i = 0; i < 3; ++i) e.alpha[i] = alpha ? alpha(mesh.vertex(v[i])) : 1.0;
  e.gradAlpha = e.alpha[0] * e.geom.gradLambda[0] + e.alpha[1] * e.geom.gradLambda[1] +
                e.alpha[2] * e.geom.gradLambda[2];
  dofs.bulk_tri_dofs(t, e.gd);
  e.lapU = 0.0;
  for (int i = 0; i < dofs.bulk_dofs_per_tri(); ++i)
    e.lapU += u[e.gd[i]] * bulk_basis_laplacian(dofs.scheme().bulkDegree, e.geom, i);
  return e;
}

// alpha * grad(u_h) . n at a barycentric point of element t
double flux_at(const DofMap& dofs, std::span<const double> u, const ElementData& e, double l0,
               double l1, double l2, Vec2 n) {
  Vec2 G[6];
  eval_bulk_basis_grad(dofs.scheme().bulkDegree, e.geom, l0, l1, l2, G);
  Vec2 grad{};
  for (int i = 0; i < dofs.bulk_dofs_per_tri(); ++i) grad = grad + u[e.gd[i]] * G[i];
  double alpha = e.alpha[0] * l0 + e.alpha[1] * l1 + e.alpha[2] * l2;
  return alpha * dot(grad, n);
}

} // namespace

EstimatorReport estimate(const SolutionTriple& sol, const ProblemData& data) {
  const DofMap& dofs = *sol.dofs;
  const Mesh2D& mesh = dofs.bulk();
  const GammaMesh& gamma = dofs.gamma();
  const double sigma = data.sigma;
  const int deg = dofs.scheme().bulkDegree;
  const int nd = dofs.bulk_dofs_per_tri();

  EstimatorReport rep;
  rep.etaT2.assign(mesh.num_triangles(), 0.0);
  rep.etaEint2.assign(mesh.topology().edges.size(), 0.0);
  rep.etaEbd2.assign(mesh.num_boundary_edges(), 0.0);
  rep.etaI2.assign(gamma.num_segments(), 0.0);

  // element residual  h_T^2 || f - sigma u_h + div(alpha grad u_h) ||_T^2
  double N[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementData e = element_data(dofs, sol.u, t);
    const auto& v = mesh.triangles()[t].v;
    Vec2 x0 = mesh.vertex(v[0]), x1 = mesh.vertex(v[1]), x2 = mesh.vertex(v[2]);
    double acc = 0.0;
    for (const auto& qp : tri_rule_deg5()) {
      eval_bulk_basis(deg, qp.l0, qp.l1, qp.l2, N);
      double uh = 0.0, ushift = 0.0;
      for (int i = 0; i < nd; ++i) {
        uh += sol.u[e.gd[i]] * N[i];
        if (data.uShift) ushift += (*data.uShift)[e.gd[i]] * N[i];
      }
      Vec2 G[6];
      eval_bulk_basis_grad(deg, e.geom, qp.l0, qp.l1, qp.l2, G);
      Vec2 grad{};
      for (int i = 0; i < nd; ++i) grad = grad + sol.u[e.gd[i]] * G[i];
      double alpha = e.alpha[0] * qp.l0 + e.alpha[1] * qp.l1 + e.alpha[2] * qp.l2;
      double lap = alpha * e.lapU + dot(e.gradAlpha, grad);
      Vec2 x = qp.l0 * x0 + qp.l1 * x1 + qp.l2 * x2;
      double fval = (data.f ? data.f(x) : 0.0) + data.shiftFactor * ushift;
      double r = fval - sigma * uh + lap;
      acc += qp.w * r * r;
    }
    double hT = mesh.tri_diameter(t);
    rep.etaT2[t] = hT * hT * acc * e.geom.area;
  }

  // interior flux jumps  h_E || [alpha grad u_h . n] ||_E^2
  const auto& topo = mesh.topology();
  for (std::size_t eid = 0; eid < topo.edges.size(); ++eid) {
    int t0 = topo.edgeTris[eid][0], t1 = topo.edgeTris[eid][1];
    if (t1 < 0) continue;
    Vec2 xa = mesh.vertex(topo.edges[eid][0]), xb = mesh.vertex(topo.edges[eid][1]);
    Vec2 n = mesh.edge_normal(static_cast<int>(eid));
    ElementData e0 = element_data(dofs, sol.u, t0);
    ElementData e1 = element_data(dofs, sol.u, t1);
    double h = norm(xb - xa);
    double acc = 0.0;
    for (const auto& qp : line_rule_deg9()) {
      Vec2 x = xa + qp.t * (xb - xa);
      double l[3];
      barycentric(mesh, t0, x, l);
      double f0 = flux_at(dofs, sol.u, e0, l[0], l[1], l[2], n);
      barycentric(mesh, t1, x, l);
      double f1 = flux_at(dofs, sol.u, e1, l[0], l[1], l[2], n);
      double jump = f0 - f1;
      acc += qp.w * jump * jump;
    }
    rep.etaEint2[eid] = h * h * acc;
  }

  // boundary edges: flux mismatch h_E ||lambda_h - alpha grad u_h . n||_E^2
  // plus the constraint mismatch sum_{I in E} h_I^{-1} ||u_h - p_h||_I^2
  for (int k = 0; k < mesh.num_boundary_edges(); ++k) {
    int t = mesh.boundary_tri(k);
    int le = mesh.boundary_local_edge(k);
    ElementData e = element_data(dofs, sol.u, t);
    const auto& ed = dofs.boundary_edge_dofs()[k];
    Vec2 n = mesh.boundary_outward_normal(k);
    double hE = ed.arcB - ed.arcA;
    double acc = 0.0;
    for (const auto& qp : line_rule_deg9()) {
      double l[3] = {0.0, 0.0, 0.0};
      l[le] = 1.0 - qp.t;
      l[(le + 1) % 3] = qp.t;
      double flux = flux_at(dofs, sol.u, e, l[0], l[1], l[2], n);
      double lam;
      if (dofs.scheme().multiplier == MultiplierKind::P1Trace)
        lam = sol.lambda[ed.m0] * (1.0 - qp.t) + sol.lambda[ed.m1] * qp.t;
      else
        lam = sol.lambda[ed.m0];
      double r = lam - flux;
      acc += qp.w * r * r;
    }
    double val = hE * hE * acc;
    for (int s : dofs.segments_of_edge()[k]) {
      double c = 0.0;
      for (const auto& qp : line_rule_deg9()) {
        double d = evaluate_trace_on_segment(dofs, sol.u, s, qp.t) -
                   evaluate_gamma_local(dofs, sol.p, s, qp.t);
        c += qp.w * d * d;
      }
      val += c; // h_I^{-1} * h_I cancels
    }
    rep.etaEbd2[k] = val;
  }

  // surface residual  h_I^2 || g - sigma p_h + d/ds(kappa dp/ds) - lambda_h ||_I^2
  const int sdeg = dofs.scheme().surfaceDegree;
  const auto& kappa = dofs.scheme().kappa;
  for (int s = 0; s < gamma.num_segments(); ++s) {
    const auto& seg = gamma.segments()[s];
    double h = seg.s1 - seg.s0;
    double k0 = kappa ? kappa(mesh.point_at_arc(seg.s0)) : 1.0;
    double k1 = kappa ? kappa(mesh.point_at_arc(seg.s1)) : 1.0;
    const auto& sd = dofs.segment_dofs()[s];
    double acc = 0.0;
    for (const auto& qp : line_rule_deg9()) {
      double ph = evaluate_gamma_local(dofs, sol.p, s, qp.t);
      double dN[3];
      eval_line_basis_deriv(sdeg, qp.t, dN);
      double dp = sol.p[sd.qL] * dN[0] + sol.p[sd.qR] * dN[1];
      double ddp = 0.0;
      if (sdeg == 2) {
        dp += sol.p[sd.qM] * dN[2];
        ddp = 4.0 * sol.p[sd.qL] + 4.0 * sol.p[sd.qR] - 8.0 * sol.p[sd.qM];
      }
      double kap = k0 * (1.0 - qp.t) + k1 * qp.t;
      double lapP = ((k1 - k0) * dp + kap * ddp) / (h * h);
      double lam = evaluate_multiplier_on_segment(dofs, sol.lambda, s, qp.t);
      double sArc = seg.s0 + qp.t * h;
      double gval = (data.g ? data.g(sArc) : 0.0);
      if (data.pShift)
        gval += data.shiftFactor * evaluate_gamma_local(dofs, *data.pShift, s, qp.t);
      double r = gval - sigma * ph + lapP - lam;
      acc += qp.w * r * r;
    }
    rep.etaI2[s] = h * h * h * acc;
  }

  rep.total2 = 0.0;
  for (double v : rep.etaT2) rep.total2 += v;
  for (double v : rep.etaEint2) rep.total2 += v;
  for (double v : rep.etaEbd2) rep.total2 += v;
  for (double v : rep.etaI2) rep.total2 += v;
  if (!std::isfinite(rep.total2)) throw NumericalError("estimator produced a non-finite value");
  return rep;
}

AttributedIndicators attribute(const EstimatorReport& report, const DofMap& dofs) {
  const Mesh2D& mesh = dofs.bulk();
  AttributedIndicators out;
  out.tildeT2 = report.etaT2;
  out.tildeI2 = report.etaI2;
  const auto& topo = mesh.topology();
  for (std::size_t eid = 0; eid < topo.edges.size(); ++eid) {
    int t1 = topo.edgeTris[eid][1];
    if (t1 < 0) continue;
    double half = 0.5 * report.etaEint2[eid];
    out.tildeT2[topo.edgeTris[eid][0]] += half;
    out.tildeT2[t1] += half;
  }
  for (int k = 0; k < mesh.num_boundary_edges(); ++k) {
    const auto& segs = dofs.segments_of_edge()[k];
    double share = report.etaEbd2[k] / (1.0 + segs.size());
    out.tildeT2[mesh.boundary_tri(k)] += share;
    for (int s : segs) out.tildeI2[s] += share;
  }
  return out;
}

void dump_estimator(std::ostream& os, const EstimatorReport& report) {
  os << std::setprecision(17);
  for (std::size_t i = 0; i < report.etaT2.size(); ++i)
    os << "T " << i << ' ' << report.etaT2[i] << '\n';
  for (std::size_t i = 0; i < report.etaEint2.size(); ++i)
    if (report.etaEint2[i] != 0.0) os << "Ein " << i << ' ' << report.etaEint2[i] << '\n';
  for (std::size_t i = 0; i < report.etaEbd2.size(); ++i)
    os << "Ebd " << i << ' ' << report.etaEbd2[i] << '\n';
  for (std::size_t i = 0; i < report.etaI2.size(); ++i)
    os << "I " << i << ' ' << report.etaI2[i] << '\n';
}

ErrorNorms error_norms(const SolutionTriple& sol, const SolutionTriple& ref) {
  const DofMap& fd = *ref.dofs;
  SolutionTriple pro = prolong(sol, ref.dofs);

  ErrorNorms err;
  const Mesh2D& mesh = fd.bulk();
  const int deg = fd.scheme().bulkDegree;
  const int nd = fd.bulk_dofs_per_tri();
  std::vector<double> eu(fd.dimV());
  for (int i = 0; i < fd.dimV(); ++i) eu[i] = pro.u[i] - ref.u[i];
  int gd[6];
  double N[6];
  Vec2 G[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    TriGeom geom = tri_geom(mesh, t);
    fd.bulk_tri_dofs(t, gd);
    double acc = 0.0;
    for (const auto& qp : tri_rule_deg5()) {
      eval_bulk_basis(deg, qp.l0, qp.l1, qp.l2, N);
      eval_bulk_basis_grad(deg, geom, qp.l0, qp.l1, qp.l2, G);
      double v = 0.0;
      Vec2 g{};
      for (int i = 0; i < nd; ++i) {
        v += eu[gd[i]] * N[i];
        g = g + eu[gd[i]] * G[i];
      }
      acc += qp.w * (v * v + dot(g, g));
    }
    err.errU += acc * geom.area;
  }
  err.errU = std::sqrt(err.errU);

  const GammaMesh& gamma = fd.gamma();
  std::vector<double> ep(fd.dimQ());
  for (int i = 0; i < fd.dimQ(); ++i) ep[i] = pro.p[i] - ref.p[i];
  double accP = 0.0;
  for (int s = 0; s < gamma.num_segments(); ++s) {
    double h = gamma.segment_length(s);
    for (const auto& qp : line_rule_deg9()) {
      double v = evaluate_gamma_local(fd, ep, s, qp.t);
      double d = evaluate_gamma_deriv_local(fd, ep, s, qp.t);
      accP += qp.w * h * (v * v + d * d);
    }
  }
  err.errP = std::sqrt(accP);

  std::vector<double> el(fd.dimM());
  for (int i = 0; i < fd.dimM(); ++i) el[i] = pro.lambda[i] - ref.lambda[i];
  double accL = 0.0;
  for (int s = 0; s < gamma.num_segments(); ++s) {
    double h = gamma.segment_length(s);
    for (const auto& qp : line_rule_deg9()) {
      double v = evaluate_multiplier_on_segment(fd, el, s, qp.t);
      accL += qp.w * h * h * v * v;
    }
  }
  err.errL = std::sqrt(accL);
  return err;
}

} // namespace dynbc
