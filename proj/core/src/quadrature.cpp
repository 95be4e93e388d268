#include "dynbc/quadrature.hpp"

#include <cmath>

namespace dynbc {

const std::vector<TriQuadPoint>& tri_rule_deg5() {
  static const std::vector<TriQuadPoint> rule = [] {
    std::vector<TriQuadPoint> r;
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 + s15) / 21.0;
    const double b = (6.0 - s15) / 21.0;
    const double wa = (155.0 + s15) / 1200.0;
    const double wb = (155.0 - s15) / 1200.0;
    r.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0});
    r.push_back({a, a, 1.0 - 2.0 * a, wa});
    r.push_back({a, 1.0 - 2.0 * a, a, wa});
    r.push_back({1.0 - 2.0 * a, a, a, wa});
    r.push_back({b, b, 1.0 - 2.0 * b, wb});
    r.push_back({b, 1.0 - 2.0 * b, b, wb});
    r.push_back({1.0 - 2.0 * b, b, b, wb});
    return r;
  }();
  return rule;
}

namespace {

// Nodes/weights for n-point Gauss-Legendre on [-1,1] by Newton iteration on
// the Legendre polynomial; plenty accurate for the small n used here.
std::vector<LineQuadPoint> gauss_legendre_unit(int n) {
  std::vector<LineQuadPoint> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    pts[i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return pts;
}

} // namespace

const std::vector<LineQuadPoint>& line_rule_deg9() {
  static const std::vector<LineQuadPoint> rule = gauss_legendre_unit(5);
  return rule;
}

const std::vector<LineQuadPoint>& line_rule_deg15() {
  static const std::vector<LineQuadPoint> rule = gauss_legendre_unit(8);
  return rule;
}

const std::vector<TriQuadPoint>& tri_rule_deg7() {
  // Duffy collapse of an 8x8 Gauss-Legendre grid: with u,v in [0,1], the map
  // (l1,l2) = (u(1-v), uv) has Jacobian u, so integrating f*u over the square
  // integrates f over the reference triangle.  Polynomials of degree d stay
  // exact while d+1 <= 15; "deg7" is the guaranteed floor advertised here.
  static const std::vector<TriQuadPoint> rule = [] {
    std::vector<TriQuadPoint> r;
    const auto& g = line_rule_deg15();
    for (const auto& pu : g)
      for (const auto& pv : g) {
        double l1 = pu.t * (1.0 - pv.t);
        double l2 = pu.t * pv.t;
        double w = 2.0 * pu.w * pv.w * pu.t;
        r.push_back({1.0 - l1 - l2, l1, l2, w});
      }
    double s = 0.0;
    for (auto& p : r) s += p.w;
    for (auto& p : r) p.w /= s;
    return r;
  }();
  return rule;
}

} // namespace dynbc
