#include "oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dynbc/quadrature.hpp"

namespace oracles {

using namespace dynbc;

SolutionTriple oracle_solve(const SaddleSystem& sys, std::shared_ptr<const DofMap> dofs) {
  const int nV = sys.dimV, nQ = sys.dimQ, nM = sys.dimM;
  const int n = nV + nQ + nM;
  if (n > 500) throw NumericalError("oracle_solve accepts at most 500 unknowns");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  A.block(0, 0, nV, nV) = Eigen::MatrixXd(sys.Au);
  A.block(nV, nV, nQ, nQ) = Eigen::MatrixXd(sys.Ap);
  Eigen::MatrixXd Cu = Eigen::MatrixXd(sys.Cu);
  Eigen::MatrixXd Cp = Eigen::MatrixXd(sys.Cp);
  A.block(0, nV + nQ, nV, nM) = -Cu.transpose();
  A.block(nV, nV + nQ, nQ, nM) = Cp.transpose();
  A.block(nV + nQ, 0, nM, nV) = Cu;
  A.block(nV + nQ, nV, nM, nQ) = -Cp;

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b.head(nV) = sys.F;
  b.segment(nV, nQ) = sys.G;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw NumericalError("oracle_solve: singular system");
  Eigen::VectorXd x = lu.solve(b);

  SolutionTriple sol;
  sol.dofs = std::move(dofs);
  sol.u.assign(x.data(), x.data() + nV);
  sol.p.assign(x.data() + nV, x.data() + nV + nQ);
  sol.lambda.assign(x.data() + nV + nQ, x.data() + n);
  return sol;
}

namespace {

// barycentric gradients and area from the vertex coordinates alone
struct Geom {
  Vec2 v[3];
  Vec2 gl[3];
  double area;
};

Geom geom_of(const Mesh2D& mesh, int t) {
  Geom g;
  const auto& tri = mesh.triangles()[t].v;
  for (int i = 0; i < 3; ++i) g.v[i] = mesh.vertex(tri[i]);
  double A2 = cross(g.v[1] - g.v[0], g.v[2] - g.v[0]);
  g.area = 0.5 * A2;
  for (int i = 0; i < 3; ++i) g.gl[i] = (1.0 / A2) * perp(g.v[(i + 1) % 3] - g.v[(i + 2) % 3]);
  return g;
}

void bary_of_point(const Geom& g, Vec2 x, double* l) {
  double A2 = 2.0 * g.area;
  l[0] = cross(g.v[1] - x, g.v[2] - x) / A2;
  l[1] = cross(g.v[2] - x, g.v[0] - x) / A2;
  l[2] = 1.0 - l[0] - l[1];
}

// local shape values on the triangle; vertex functions then e01,e12,e20
void shape(int deg, const double* l, double* N) {
  if (deg == 1) {
    N[0] = l[0];
    N[1] = l[1];
    N[2] = l[2];
    return;
  }
  for (int i = 0; i < 3; ++i) N[i] = l[i] * (2.0 * l[i] - 1.0);
  N[3] = 4.0 * l[0] * l[1];
  N[4] = 4.0 * l[1] * l[2];
  N[5] = 4.0 * l[2] * l[0];
}

void shape_grad(int deg, const Geom& g, const double* l, Vec2* G) {
  if (deg == 1) {
    for (int i = 0; i < 3; ++i) G[i] = g.gl[i];
    return;
  }
  for (int i = 0; i < 3; ++i) G[i] = (4.0 * l[i] - 1.0) * g.gl[i];
  G[3] = 4.0 * (l[1] * g.gl[0] + l[0] * g.gl[1]);
  G[4] = 4.0 * (l[2] * g.gl[1] + l[1] * g.gl[2]);
  G[5] = 4.0 * (l[0] * g.gl[2] + l[2] * g.gl[0]);
}

// Laplacians of the local shapes, constant on the element
void shape_lap(int deg, const Geom& g, double* L) {
  if (deg == 1) {
    L[0] = L[1] = L[2] = 0.0;
    return;
  }
  for (int i = 0; i < 3; ++i) L[i] = 4.0 * dot(g.gl[i], g.gl[i]);
  L[3] = 8.0 * dot(g.gl[0], g.gl[1]);
  L[4] = 8.0 * dot(g.gl[1], g.gl[2]);
  L[5] = 8.0 * dot(g.gl[2], g.gl[0]);
}

struct Element {
  Geom g;
  int gd[6];
  int nd;
  double alpha[3];
  Vec2 gradAlpha;
  double lapU; // elementwise constant
};

Element element_of(const DofMap& dofs, std::span<const double> u, int t) {
  Element e;
  e.g = geom_of(dofs.bulk(), t);
  e.nd = dofs.bulk_dofs_per_tri();
  dofs.bulk_tri_dofs(t, e.gd);
  const auto& alpha = dofs.scheme().alpha;
  for (int i = 0; i < 3; ++i) e.alpha[i] = alpha ? alpha(e.g.v[i]) : 1.0;
  e.gradAlpha =
      e.alpha[0] * e.g.gl[0] + e.alpha[1] * e.g.gl[1] + e.alpha[2] * e.g.gl[2];
  double L[6];
  shape_lap(dofs.scheme().bulkDegree, e.g, L);
  e.lapU = 0.0;
  for (int i = 0; i < e.nd; ++i) e.lapU += u[e.gd[i]] * L[i];
  return e;
}

double value_at(const DofMap& dofs, std::span<const double> u, const Element& e, const double* l) {
  double N[6];
  shape(dofs.scheme().bulkDegree, l, N);
  double s = 0.0;
  for (int i = 0; i < e.nd; ++i) s += u[e.gd[i]] * N[i];
  return s;
}

Vec2 grad_at(const DofMap& dofs, std::span<const double> u, const Element& e, const double* l) {
  Vec2 G[6];
  shape_grad(dofs.scheme().bulkDegree, e.g, l, G);
  Vec2 s{};
  for (int i = 0; i < e.nd; ++i) s = s + u[e.gd[i]] * G[i];
  return s;
}

double interp_alpha(const Element& e, const double* l) {
  return e.alpha[0] * l[0] + e.alpha[1] * l[1] + e.alpha[2] * l[2];
}

// 1D quadratic shapes in a unit coordinate; left, right, mid
void line_shape(int deg, double t, double* N) {
  if (deg == 1) {
    N[0] = 1.0 - t;
    N[1] = t;
    N[2] = 0.0;
    return;
  }
  N[0] = 1.0 - 3.0 * t + 2.0 * t * t;
  N[1] = 2.0 * t * t - t;
  N[2] = 4.0 * t * (1.0 - t);
}

// multiplier value at an arc position inside boundary edge k
double lambda_at(const DofMap& dofs, std::span<const double> lam, int k, double s) {
  const auto& ed = dofs.boundary_edge_dofs()[k];
  if (dofs.scheme().multiplier == MultiplierKind::P0Trace) return lam[ed.m0];
  double t = (s - ed.arcA) / (ed.arcB - ed.arcA);
  return lam[ed.m0] * (1.0 - t) + lam[ed.m1] * t;
}

// bulk trace at an arc position inside boundary edge k
double trace_at(const DofMap& dofs, std::span<const double> u, int k, double s) {
  const auto& ed = dofs.boundary_edge_dofs()[k];
  double t = (s - ed.arcA) / (ed.arcB - ed.arcA);
  double N[3];
  line_shape(dofs.scheme().bulkDegree, t, N);
  double val = u[ed.vA] * N[0] + u[ed.vB] * N[1];
  if (dofs.scheme().bulkDegree == 2) val += u[ed.vMid] * N[2];
  return val;
}

// surface function at a local coordinate of segment seg
double gamma_at(const DofMap& dofs, std::span<const double> p, int seg, double t) {
  const auto& sd = dofs.segment_dofs()[seg];
  double N[3];
  line_shape(dofs.scheme().surfaceDegree, t, N);
  double val = p[sd.qL] * N[0] + p[sd.qR] * N[1];
  if (dofs.scheme().surfaceDegree == 2) val += p[sd.qM] * N[2];
  return val;
}

} // namespace

EstimatorReport oracle_estimate(const SolutionTriple& sol, const ProblemData& data) {
  const DofMap& dofs = *sol.dofs;
  const Mesh2D& mesh = dofs.bulk();
  const GammaMesh& gamma = dofs.gamma();
  const double sigma = data.sigma;
  const int deg = dofs.scheme().bulkDegree;

  EstimatorReport rep;
  rep.etaT2.assign(mesh.num_triangles(), 0.0);
  rep.etaEint2.assign(mesh.topology().edges.size(), 0.0);
  rep.etaEbd2.assign(mesh.num_boundary_edges(), 0.0);
  rep.etaI2.assign(gamma.num_segments(), 0.0);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Element e = element_of(dofs, sol.u, t);
    double acc = 0.0;
    for (const auto& qp : tri_rule_deg7()) {
      double l[3] = {qp.l0, qp.l1, qp.l2};
      Vec2 x = l[0] * e.g.v[0] + l[1] * e.g.v[1] + l[2] * e.g.v[2];
      double fval = data.f ? data.f(x) : 0.0;
      if (data.uShift) fval += data.shiftFactor * value_at(dofs, *data.uShift, e, l);
      double div = interp_alpha(e, l) * e.lapU + dot(e.gradAlpha, grad_at(dofs, sol.u, e, l));
      double r = fval - sigma * value_at(dofs, sol.u, e, l) + div;
      acc += qp.w * r * r;
    }
    double hT = 0.0;
    for (int i = 0; i < 3; ++i)
      hT = std::max(hT, norm(e.g.v[(i + 1) % 3] - e.g.v[i]));
    rep.etaT2[t] = hT * hT * acc * e.g.area;
  }

  const auto& topo = mesh.topology();
  for (std::size_t eid = 0; eid < topo.edges.size(); ++eid) {
    int t0 = topo.edgeTris[eid][0], t1 = topo.edgeTris[eid][1];
    if (t1 < 0) continue;
    Vec2 xa = mesh.vertex(topo.edges[eid][0]);
    Vec2 xb = mesh.vertex(topo.edges[eid][1]);
    double h = norm(xb - xa);
    Vec2 n = (1.0 / h) * perp(xb - xa);
    Element e0 = element_of(dofs, sol.u, t0);
    Element e1 = element_of(dofs, sol.u, t1);
    double acc = 0.0;
    for (const auto& qp : line_rule_deg15()) {
      Vec2 x = xa + qp.t * (xb - xa);
      double l[3];
      bary_of_point(e0.g, x, l);
      double f0 = interp_alpha(e0, l) * dot(grad_at(dofs, sol.u, e0, l), n);
      bary_of_point(e1.g, x, l);
      double f1 = interp_alpha(e1, l) * dot(grad_at(dofs, sol.u, e1, l), n);
      double jump = f0 - f1;
      acc += qp.w * jump * jump;
    }
    rep.etaEint2[eid] = h * h * acc;
  }

  for (int k = 0; k < mesh.num_boundary_edges(); ++k) {
    const auto& ed = dofs.boundary_edge_dofs()[k];
    int t = mesh.boundary_tri(k);
    Element e = element_of(dofs, sol.u, t);
    Vec2 xa = mesh.vertex(mesh.boundary_edges()[k][0]);
    Vec2 xb = mesh.vertex(mesh.boundary_edges()[k][1]);
    double hE = norm(xb - xa);
    Vec2 n = (1.0 / hE) * perp(xb - xa);
    double acc = 0.0;
    for (const auto& qp : line_rule_deg15()) {
      Vec2 x = xa + qp.t * (xb - xa);
      double l[3];
      bary_of_point(e.g, x, l);
      double flux = interp_alpha(e, l) * dot(grad_at(dofs, sol.u, e, l), n);
      double s = ed.arcA + qp.t * (ed.arcB - ed.arcA);
      double r = lambda_at(dofs, sol.lambda, k, s) - flux;
      acc += qp.w * r * r;
    }
    double val = hE * hE * acc;
    for (int seg : dofs.segments_of_edge()[k]) {
      const auto& sg = gamma.segments()[seg];
      double hI = sg.s1 - sg.s0;
      double c = 0.0;
      for (const auto& qp : line_rule_deg15()) {
        double s = sg.s0 + qp.t * hI;
        double d = trace_at(dofs, sol.u, k, s) - gamma_at(dofs, sol.p, seg, qp.t);
        c += qp.w * d * d;
      }
      val += c; // 1/h_I weight against the h_I of the arc element cancels
    }
    rep.etaEbd2[k] = val;
  }

  const auto& kappa = dofs.scheme().kappa;
  const int sdeg = dofs.scheme().surfaceDegree;
  for (int seg = 0; seg < gamma.num_segments(); ++seg) {
    const auto& sg = gamma.segments()[seg];
    const auto& sd = dofs.segment_dofs()[seg];
    double h = sg.s1 - sg.s0;
    double k0 = kappa ? kappa(mesh.point_at_arc(sg.s0)) : 1.0;
    double k1 = kappa ? kappa(mesh.point_at_arc(sg.s1)) : 1.0;
    double acc = 0.0;
    for (const auto& qp : line_rule_deg15()) {
      double t = qp.t;
      double dp, ddp;
      if (sdeg == 1) {
        dp = sol.p[sd.qR] - sol.p[sd.qL];
        ddp = 0.0;
      } else {
        dp = sol.p[sd.qL] * (4.0 * t - 3.0) + sol.p[sd.qR] * (4.0 * t - 1.0) +
             sol.p[sd.qM] * (4.0 - 8.0 * t);
        ddp = 4.0 * sol.p[sd.qL] + 4.0 * sol.p[sd.qR] - 8.0 * sol.p[sd.qM];
      }
      double kap = k0 * (1.0 - t) + k1 * t;
      double lap = ((k1 - k0) * dp + kap * ddp) / (h * h);
      double s = sg.s0 + t * h;
      double gval = data.g ? data.g(s) : 0.0;
      if (data.pShift) gval += data.shiftFactor * gamma_at(dofs, *data.pShift, seg, t);
      double r = gval - sigma * gamma_at(dofs, sol.p, seg, t) + lap -
                 lambda_at(dofs, sol.lambda, sg.parentEdge, s);
      acc += qp.w * r * r;
    }
    rep.etaI2[seg] = h * h * h * acc;
  }

  rep.total2 = 0.0;
  for (double v : rep.etaT2) rep.total2 += v;
  for (double v : rep.etaEint2) rep.total2 += v;
  for (double v : rep.etaEbd2) rep.total2 += v;
  for (double v : rep.etaI2) rep.total2 += v;
  return rep;
}

int oracle_doerfler_min_size(const std::vector<double>& values, double theta) {
  const int n = static_cast<int>(values.size());
  if (n > 15) throw std::invalid_argument("oracle_doerfler_min_size: too many values");
  double total = 0.0;
  for (double v : values) total += v;
  if (total == 0.0) return 0;
  const double need = (1.0 - theta) * total - 1e-12 * total;
  int best = n;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += values[i];
        ++size;
      }
    if (sum >= need && size < best) best = size;
  }
  return best;
}

} // namespace oracles
