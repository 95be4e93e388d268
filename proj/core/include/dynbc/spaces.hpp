#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "dynbc/gamma.hpp"
#include "dynbc/mesh.hpp"

namespace dynbc {

class SpacesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MultiplierKind { P1Trace, P0Trace };

/// Discretization choice plus the variable coefficients.  alpha/kappa are
/// samplers; the discrete operators use their per-element linear interpolants
/// (vertex values on triangles, endpoint values on segments).  Empty means 1.
struct SchemeConfig {
  int bulkDegree = 1;
  int surfaceDegree = 1;
  MultiplierKind multiplier = MultiplierKind::P1Trace;
  std::function<double(Vec2)> alpha;
  std::function<double(Vec2)> kappa;
};

SchemeConfig scheme_p1();
SchemeConfig scheme_p2p0();
/// P2 bulk/surface pair with the multiplier swapped to continuous P1 on the trace.
SchemeConfig scheme_p2p1();

/// Q_h dofs of one segment: endpoint nodes, midpoint node for P2 (else -1).
struct SegmentDofs {
  int qL = -1;
  int qR = -1;
  int qM = -1;
};

/// Dofs attached to one bulk boundary edge: the bulk trace dofs living on it
/// and the multiplier dofs.  P1 multiplier: m0/m1 = chain vertex nodes;
/// P0: m0 = edge index, m1 = -1.
struct BoundaryEdgeDofs {
  int vA = -1, vB = -1; // bulk vertex dofs
  int vMid = -1;        // bulk edge dof (P2 only)
  int m0 = -1, m1 = -1;
  double arcA = 0.0, arcB = 0.0;
};

/// Dof numbering for the triple V_h x Q_h x M_h on one bulk/surface mesh pair.
class DofMap {
 public:
  DofMap(std::shared_ptr<const Mesh2D> bulk, std::shared_ptr<const GammaMesh> gamma,
         SchemeConfig scheme);

  int dimV() const { return dimV_; }
  int dimQ() const { return dimQ_; }
  int dimM() const { return dimM_; }
  int dim_total() const { return dimV_ + dimQ_ + dimM_; }

  const SchemeConfig& scheme() const { return scheme_; }
  const Mesh2D& bulk() const { return *bulk_; }
  const GammaMesh& gamma() const { return *gamma_; }
  std::shared_ptr<const Mesh2D> bulk_ptr() const { return bulk_; }
  std::shared_ptr<const GammaMesh> gamma_ptr() const { return gamma_; }

  int bulk_dofs_per_tri() const { return scheme_.bulkDegree == 1 ? 3 : 6; }
  /// Global V_h dofs of triangle t in local order v0,v1,v2[,e01,e12,e20].
  void bulk_tri_dofs(int t, int* out) const;

  const std::vector<SegmentDofs>& segment_dofs() const { return segDofs_; }
  const std::vector<BoundaryEdgeDofs>& boundary_edge_dofs() const { return bdDofs_; }
  /// Segment indices under each bulk boundary edge, ascending arc.
  const std::vector<std::vector<int>>& segments_of_edge() const { return segsOfEdge_; }

 private:
  std::shared_ptr<const Mesh2D> bulk_;
  std::shared_ptr<const GammaMesh> gamma_;
  SchemeConfig scheme_;
  int dimV_ = 0, dimQ_ = 0, dimM_ = 0;
  std::vector<SegmentDofs> segDofs_;
  std::vector<BoundaryEdgeDofs> bdDofs_;
  std::vector<std::vector<int>> segsOfEdge_;
};

std::shared_ptr<const DofMap> build_spaces(std::shared_ptr<const Mesh2D> bulk,
                                           std::shared_ptr<const GammaMesh> gamma,
                                           SchemeConfig scheme);

/// Barycentric gradients and area of a triangle.
struct TriGeom {
  Vec2 gradLambda[3];
  double area = 0.0;
};
TriGeom tri_geom(const Mesh2D& mesh, int t);

/// Lagrange basis on the reference triangle at a barycentric point.
/// P2 local order: vertices then edge bubbles e01,e12,e20.
void eval_bulk_basis(int degree, double l0, double l1, double l2, double* N);
void eval_bulk_basis_grad(int degree, const TriGeom& g, double l0, double l1, double l2, Vec2* G);
/// Laplacian of a local basis function (constant on the element).
double bulk_basis_laplacian(int degree, const TriGeom& g, int localDof);

/// 1D Lagrange basis on [0,1].  P1 order: left,right.  P2: left,right,mid.
void eval_line_basis(int degree, double t, double* N);
void eval_line_basis_deriv(int degree, double t, double* dN);

/// Uniform-grid point locator over a mesh; returns barycentric coordinates.
class PointLocator {
 public:
  explicit PointLocator(const Mesh2D& mesh);
  /// Triangle containing x (ties -> smallest index).  Throws SpacesError if
  /// x lies outside the mesh beyond tolerance.
  int locate(Vec2 x, double& l0, double& l1, double& l2) const;

 private:
  const Mesh2D& mesh_;
  Vec2 lo_{}, hi_{};
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

double evaluate_bulk(const DofMap& dofs, std::span<const double> u, Vec2 x);
Vec2 evaluate_bulk_grad(const DofMap& dofs, std::span<const double> u, Vec2 x);
double evaluate_bulk_local(const DofMap& dofs, std::span<const double> u, int t, double l0,
                           double l1, double l2);
Vec2 evaluate_bulk_grad_local(const DofMap& dofs, std::span<const double> u, int t, double l0,
                              double l1, double l2);

double evaluate_gamma(const DofMap& dofs, std::span<const double> p, double s);
double evaluate_gamma_local(const DofMap& dofs, std::span<const double> p, int seg, double t);
/// d/ds along the curve.
double evaluate_gamma_deriv_local(const DofMap& dofs, std::span<const double> p, int seg, double t);

double evaluate_multiplier(const DofMap& dofs, std::span<const double> lam, double s);
/// Multiplier restricted to segment seg at local coordinate t in [0,1].
double evaluate_multiplier_on_segment(const DofMap& dofs, std::span<const double> lam, int seg,
                                      double t);

/// Trace of a bulk function restricted to segment seg at local coordinate t.
double evaluate_trace_on_segment(const DofMap& dofs, std::span<const double> u, int seg, double t);

/// Per-segment quadratic representation of the bulk trace: values at the
/// segment endpoints and midpoint.
std::vector<std::array<double, 3>> trace_values(const DofMap& dofs, std::span<const double> u);

} // namespace dynbc
