#include "dynbc/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace dynbc {

SchemeConfig scheme_p1() { return {1, 1, MultiplierKind::P1Trace, {}, {}}; }
SchemeConfig scheme_p2p0() { return {2, 2, MultiplierKind::P0Trace, {}, {}}; }
SchemeConfig scheme_p2p1() { return {2, 2, MultiplierKind::P1Trace, {}, {}}; }

DofMap::DofMap(std::shared_ptr<const Mesh2D> bulk, std::shared_ptr<const GammaMesh> gamma,
               SchemeConfig scheme)
    : bulk_(std::move(bulk)), gamma_(std::move(gamma)), scheme_(std::move(scheme)) {
  const bool p1 = scheme_.bulkDegree == 1 && scheme_.surfaceDegree == 1 &&
                  scheme_.multiplier == MultiplierKind::P1Trace;
  const bool p2p0 = scheme_.bulkDegree == 2 && scheme_.surfaceDegree == 2 &&
                    scheme_.multiplier == MultiplierKind::P0Trace;
  const bool p2p1 = scheme_.bulkDegree == 2 && scheme_.surfaceDegree == 2 &&
                    scheme_.multiplier == MultiplierKind::P1Trace;
  if (!p1 && !p2p0 && !p2p1)
    throw SpacesError("unsupported scheme (admitted: P1/P1/P1, P2/P2/P0, P2/P2/P1)");

  gamma_->check_against(*bulk_);

  const int nv = bulk_->num_vertices();
  const int ne = static_cast<int>(bulk_->topology().edges.size());
  dimV_ = scheme_.bulkDegree == 1 ? nv : nv + ne;

  const int ns = gamma_->num_segments();
  dimQ_ = scheme_.surfaceDegree == 1 ? ns : 2 * ns;
  segDofs_.resize(ns);
  for (int i = 0; i < ns; ++i) {
    segDofs_[i].qL = i;
    segDofs_[i].qR = (i + 1) % ns;
    segDofs_[i].qM = scheme_.surfaceDegree == 2 ? ns + i : -1;
  }

  const int nb = bulk_->num_boundary_edges();
  dimM_ = nb; // one dof per chain vertex (P1) or per chain edge (P0)
  bdDofs_.resize(nb);
  const auto& bd = bulk_->boundary_edges();
  for (int k = 0; k < nb; ++k) {
    auto& d = bdDofs_[k];
    d.vA = bd[k][0];
    d.vB = bd[k][1];
    if (scheme_.bulkDegree == 2)
      d.vMid = nv + bulk_->topology().edgeOfBoundaryEdge[k];
    if (scheme_.multiplier == MultiplierKind::P1Trace) {
      d.m0 = bulk_->trace_node_of_vertex(bd[k][0]);
      d.m1 = bulk_->trace_node_of_vertex(bd[k][1]);
    } else {
      d.m0 = k;
    }
    d.arcA = bulk_->boundary_arc(k);
    d.arcB = bulk_->boundary_arc(k + 1);
  }

  segsOfEdge_.assign(nb, {});
  for (int i = 0; i < ns; ++i) segsOfEdge_[gamma_->segments()[i].parentEdge].push_back(i);
}

void DofMap::bulk_tri_dofs(int t, int* out) const {
  const auto& tri = bulk_->triangles()[t];
  out[0] = tri.v[0];
  out[1] = tri.v[1];
  out[2] = tri.v[2];
  if (scheme_.bulkDegree == 2) {
    const int nv = bulk_->num_vertices();
    const auto& te = bulk_->topology().triEdges[t];
    out[3] = nv + te[0];
    out[4] = nv + te[1];
    out[5] = nv + te[2];
  }
}

std::shared_ptr<const DofMap> build_spaces(std::shared_ptr<const Mesh2D> bulk,
                                           std::shared_ptr<const GammaMesh> gamma,
                                           SchemeConfig scheme) {
  return std::make_shared<const DofMap>(std::move(bulk), std::move(gamma), std::move(scheme));
}

TriGeom tri_geom(const Mesh2D& mesh, int t) {
  const auto& v = mesh.triangles()[t].v;
  Vec2 x0 = mesh.vertex(v[0]), x1 = mesh.vertex(v[1]), x2 = mesh.vertex(v[2]);
  TriGeom g;
  g.area = 0.5 * cross(x1 - x0, x2 - x0);
  double inv2A = 1.0 / (2.0 * g.area);
  g.gradLambda[0] = inv2A * perp(x1 - x2);
  g.gradLambda[1] = inv2A * perp(x2 - x0);
  g.gradLambda[2] = inv2A * perp(x0 - x1);
  return g;
}

void eval_bulk_basis(int degree, double l0, double l1, double l2, double* N) {
  if (degree == 1) {
    N[0] = l0;
    N[1] = l1;
    N[2] = l2;
    return;
  }
  N[0] = l0 * (2.0 * l0 - 1.0);
  N[1] = l1 * (2.0 * l1 - 1.0);
  N[2] = l2 * (2.0 * l2 - 1.0);
  N[3] = 4.0 * l0 * l1;
  N[4] = 4.0 * l1 * l2;
  N[5] = 4.0 * l2 * l0;
}

void eval_bulk_basis_grad(int degree, const TriGeom& g, double l0, double l1, double l2, Vec2* G) {
  const double l[3] = {l0, l1, l2};
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) G[i] = g.gradLambda[i];
    return;
  }
  for (int i = 0; i < 3; ++i) G[i] = (4.0 * l[i] - 1.0) * g.gradLambda[i];
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    G[3 + i] = 4.0 * (l[j] * g.gradLambda[i] + l[i] * g.gradLambda[j]);
  }
}

double bulk_basis_laplacian(int degree, const TriGeom& g, int localDof) {
  if (degree == 1) return 0.0;
  if (localDof < 3) return 4.0 * dot(g.gradLambda[localDof], g.gradLambda[localDof]);
  int i = localDof - 3;
  int j = (i + 1) % 3;
  return 8.0 * dot(g.gradLambda[i], g.gradLambda[j]);
}

void eval_line_basis(int degree, double t, double* N) {
  if (degree == 0) {
    N[0] = 1.0;
    return;
  }
  if (degree == 1) {
    N[0] = 1.0 - t;
    N[1] = t;
    return;
  }
  N[0] = (1.0 - t) * (1.0 - 2.0 * t);
  N[1] = t * (2.0 * t - 1.0);
  N[2] = 4.0 * t * (1.0 - t);
}

void eval_line_basis_deriv(int degree, double t, double* dN) {
  if (degree == 0) {
    dN[0] = 0.0;
    return;
  }
  if (degree == 1) {
    dN[0] = -1.0;
    dN[1] = 1.0;
    return;
  }
  dN[0] = 4.0 * t - 3.0;
  dN[1] = 4.0 * t - 1.0;
  dN[2] = 4.0 - 8.0 * t;
}

PointLocator::PointLocator(const Mesh2D& mesh) : mesh_(mesh) {
  lo_ = hi_ = mesh.vertex(0);
  for (const auto& p : mesh.vertices()) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi_.x = std::max(hi_.x, p.x);
    hi_.y = std::max(hi_.y, p.y);
  }
  int n = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nx_ = ny_ = n;
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  double dx = (hi_.x - lo_.x) / nx_, dy = (hi_.y - lo_.y) / ny_;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    Vec2 a = mesh.vertex(v[0]), b = mesh.vertex(v[1]), c = mesh.vertex(v[2]);
    double x0 = std::min({a.x, b.x, c.x}), x1 = std::max({a.x, b.x, c.x});
    double y0 = std::min({a.y, b.y, c.y}), y1 = std::max({a.y, b.y, c.y});
    int i0 = std::clamp(static_cast<int>((x0 - lo_.x) / dx), 0, nx_ - 1);
    int i1 = std::clamp(static_cast<int>((x1 - lo_.x) / dx), 0, nx_ - 1);
    int j0 = std::clamp(static_cast<int>((y0 - lo_.y) / dy), 0, ny_ - 1);
    int j1 = std::clamp(static_cast<int>((y1 - lo_.y) / dy), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

int PointLocator::locate(Vec2 x, double& l0, double& l1, double& l2) const {
  double dx = (hi_.x - lo_.x) / nx_, dy = (hi_.y - lo_.y) / ny_;
  int i = std::clamp(static_cast<int>((x.x - lo_.x) / dx), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>((x.y - lo_.y) / dy), 0, ny_ - 1);
  const double tol = -1e-12;
  int best = -1;
  double bl0 = 0, bl1 = 0, bl2 = 0, bestMin = -1e300;
  for (int t : cells_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& v = mesh_.triangles()[t].v;
    Vec2 a = mesh_.vertex(v[0]), b = mesh_.vertex(v[1]), c = mesh_.vertex(v[2]);
    double A2 = cross(b - a, c - a);
    double m0 = cross(b - x, c - x) / A2;
    double m1 = cross(c - x, a - x) / A2;
    double m2 = 1.0 - m0 - m1;
    double mn = std::min({m0, m1, m2});
    if (mn >= tol && best < 0) {
      best = t;
      bl0 = m0;
      bl1 = m1;
      bl2 = m2;
      break; // cell lists are ascending, first hit is the smallest index
    }
    if (mn > bestMin) bestMin = mn;
  }
  if (best < 0) throw SpacesError("point not inside the mesh");
  l0 = bl0;
  l1 = bl1;
  l2 = bl2;
  return best;
}

double evaluate_bulk_local(const DofMap& dofs, std::span<const double> u, int t, double l0,
                           double l1, double l2) {
  int gd[6];
  double N[6];
  dofs.bulk_tri_dofs(t, gd);
  eval_bulk_basis(dofs.scheme().bulkDegree, l0, l1, l2, N);
  double val = 0.0;
  for (int i = 0; i < dofs.bulk_dofs_per_tri(); ++i) val += u[gd[i]] * N[i];
  return val;
}

Vec2 evaluate_bulk_grad_local(const DofMap& dofs, std::span<const double> u, int t, double l0,
                              double l1, double l2) {
  int gd[6];
  Vec2 G[6];
  dofs.bulk_tri_dofs(t, gd);
  TriGeom g = tri_geom(dofs.bulk(), t);
  eval_bulk_basis_grad(dofs.scheme().bulkDegree, g, l0, l1, l2, G);
  Vec2 val{};
  for (int i = 0; i < dofs.bulk_dofs_per_tri(); ++i) val = val + u[gd[i]] * G[i];
  return val;
}

double evaluate_bulk(const DofMap& dofs, std::span<const double> u, Vec2 x) {
  PointLocator loc(dofs.bulk());
  double l0, l1, l2;
  int t = loc.locate(x, l0, l1, l2);
  return evaluate_bulk_local(dofs, u, t, l0, l1, l2);
}

Vec2 evaluate_bulk_grad(const DofMap& dofs, std::span<const double> u, Vec2 x) {
  PointLocator loc(dofs.bulk());
  double l0, l1, l2;
  int t = loc.locate(x, l0, l1, l2);
  return evaluate_bulk_grad_local(dofs, u, t, l0, l1, l2);
}

double evaluate_gamma_local(const DofMap& dofs, std::span<const double> p, int seg, double t) {
  const auto& sd = dofs.segment_dofs()[seg];
  double N[3];
  eval_line_basis(dofs.scheme().surfaceDegree, t, N);
  double val = p[sd.qL] * N[0] + p[sd.qR] * N[1];
  if (sd.qM >= 0) val += p[sd.qM] * N[2];
  return val;
}

double evaluate_gamma_deriv_local(const DofMap& dofs, std::span<const double> p, int seg,
                                  double t) {
  const auto& sd = dofs.segment_dofs()[seg];
  double dN[3];
  eval_line_basis_deriv(dofs.scheme().surfaceDegree, t, dN);
  double val = p[sd.qL] * dN[0] + p[sd.qR] * dN[1];
  if (sd.qM >= 0) val += p[sd.qM] * dN[2];
  return val / dofs.gamma().segment_length(seg);
}

double evaluate_gamma(const DofMap& dofs, std::span<const double> p, double s) {
  int seg = dofs.gamma().segment_at_arc(s);
  const auto& g = dofs.gamma().segments()[seg];
  double L = dofs.gamma().total_length();
  s -= L * std::floor(s / L);
  double t = (s - g.s0) / (g.s1 - g.s0);
  return evaluate_gamma_local(dofs, p, seg, std::clamp(t, 0.0, 1.0));
}

double evaluate_multiplier_on_segment(const DofMap& dofs, std::span<const double> lam, int seg,
                                      double t) {
  const auto& gs = dofs.gamma().segments()[seg];
  const auto& ed = dofs.boundary_edge_dofs()[gs.parentEdge];
  if (dofs.scheme().multiplier == MultiplierKind::P0Trace) return lam[ed.m0];
  double s = gs.s0 + t * (gs.s1 - gs.s0);
  double te = (s - ed.arcA) / (ed.arcB - ed.arcA);
  return lam[ed.m0] * (1.0 - te) + lam[ed.m1] * te;
}

double evaluate_multiplier(const DofMap& dofs, std::span<const double> lam, double s) {
  double L = dofs.gamma().total_length();
  s -= L * std::floor(s / L);
  int seg = dofs.gamma().segment_at_arc(s);
  const auto& gs = dofs.gamma().segments()[seg];
  double t = std::clamp((s - gs.s0) / (gs.s1 - gs.s0), 0.0, 1.0);
  return evaluate_multiplier_on_segment(dofs, lam, seg, t);
}

double evaluate_trace_on_segment(const DofMap& dofs, std::span<const double> u, int seg,
                                 double t) {
  const auto& gs = dofs.gamma().segments()[seg];
  const auto& ed = dofs.boundary_edge_dofs()[gs.parentEdge];
  double s = gs.s0 + t * (gs.s1 - gs.s0);
  double te = (s - ed.arcA) / (ed.arcB - ed.arcA);
  double N[3];
  eval_line_basis(dofs.scheme().bulkDegree, te, N);
  double val = u[ed.vA] * N[0] + u[ed.vB] * N[1];
  if (dofs.scheme().bulkDegree == 2) val += u[ed.vMid] * N[2];
  return val;
}

std::vector<std::array<double, 3>> trace_values(const DofMap& dofs, std::span<const double> u) {
  std::vector<std::array<double, 3>> out(dofs.gamma().num_segments());
  for (int i = 0; i < dofs.gamma().num_segments(); ++i)
    out[i] = {evaluate_trace_on_segment(dofs, u, i, 0.0),
              evaluate_trace_on_segment(dofs, u, i, 1.0),
              evaluate_trace_on_segment(dofs, u, i, 0.5)};
  return out;
}

} // namespace dynbc
