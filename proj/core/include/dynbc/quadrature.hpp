#pragma once

#include <array>
#include <vector>

#include "dynbc/geometry.hpp"

namespace dynbc {

/// Quadrature point on the reference triangle, barycentric coordinates plus
/// a weight that sums to 1 over the rule (scale by the physical area).
struct TriQuadPoint {
  double l0, l1, l2;
  double w;
};

/// Symmetric 7 point rule, exact for polynomials up to degree 5.
const std::vector<TriQuadPoint>& tri_rule_deg5();

/// Tensor rule on the collapsed square, exact up to degree 7.  Used where a
/// higher-order cross-check or data resolution is wanted.
const std::vector<TriQuadPoint>& tri_rule_deg7();

/// Gauss-Legendre point on [0,1].
struct LineQuadPoint {
  double t;
  double w;
};

/// 5 point Gauss-Legendre on [0,1], exact up to degree 9.
const std::vector<LineQuadPoint>& line_rule_deg9();

/// 8 point Gauss-Legendre on [0,1], exact up to degree 15.
const std::vector<LineQuadPoint>& line_rule_deg15();

} // namespace dynbc
