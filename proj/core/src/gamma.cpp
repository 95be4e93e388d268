#include "dynbc/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace dynbc {

namespace {
constexpr double kRelTol = 1e-9;
}

GammaMesh::GammaMesh(std::vector<GammaSegment> segments, double totalLength,
                     std::vector<double> cornerArcs, double rho)
    : segs_(std::move(segments)), cornerArcs_(std::move(cornerArcs)), length_(totalLength),
      rho_(rho) {
  if (segs_.empty()) throw GammaError("gamma mesh needs at least one segment");
  if (!(rho_ >= 1.0)) throw GammaError("rho must be at least 1");
  std::sort(segs_.begin(), segs_.end(),
            [](const GammaSegment& a, const GammaSegment& b) { return a.s0 < b.s0; });
  const double tol = kRelTol * length_;
  if (std::abs(segs_.front().s0) > tol ||
      std::abs(segs_.back().s1 - length_) > tol)
    throw GammaError("segments do not cover the boundary");
  for (int i = 0; i < num_segments(); ++i) {
    if (!(segs_[i].s1 > segs_[i].s0)) throw GammaError("empty or reversed segment");
    if (i + 1 < num_segments() && std::abs(segs_[i].s1 - segs_[i + 1].s0) > tol)
      throw GammaError("segments overlap or leave a gap");
  }
}

GammaMesh GammaMesh::trace_of(const Mesh2D& bulk, double rho) {
  std::vector<GammaSegment> segs;
  segs.reserve(bulk.num_boundary_edges());
  for (int k = 0; k < bulk.num_boundary_edges(); ++k)
    segs.push_back({bulk.boundary_arc(k), bulk.boundary_arc(k + 1), k});
  return GammaMesh(std::move(segs), bulk.perimeter(), bulk.corner_arcs(), rho);
}

int GammaMesh::segment_at_arc(double s) const {
  s -= length_ * std::floor(s / length_);
  auto it = std::upper_bound(segs_.begin(), segs_.end(), s,
                             [](double v, const GammaSegment& seg) { return v < seg.s0; });
  int i = static_cast<int>(it - segs_.begin()) - 1;
  if (i < 0) i = 0;
  if (i >= num_segments()) i = num_segments() - 1;
  return i;
}

void GammaMesh::check_against(const Mesh2D& bulk) const {
  const double tol = kRelTol * length_;
  if (std::abs(bulk.perimeter() - length_) > tol)
    throw GammaError("bulk perimeter does not match gamma length");
  for (int i = 0; i < num_segments(); ++i) {
    const auto& seg = segs_[i];
    if (seg.parentEdge < 0 || seg.parentEdge >= bulk.num_boundary_edges())
      throw GammaError("segment parent edge out of range");
    double a = bulk.boundary_arc(seg.parentEdge);
    double b = bulk.boundary_arc(seg.parentEdge + 1);
    if (seg.s0 < a - tol || seg.s1 > b + tol)
      throw GammaError("segment not contained in its parent boundary edge");
    double hE = b - a;
    double hI = seg.s1 - seg.s0;
    if (hE > rho_ * hI * (1.0 + kRelTol))
      throw GammaError("segment undercuts the rho ratio against its parent edge");
    for (double c : cornerArcs_)
      if (c > seg.s0 + tol && c < seg.s1 - tol)
        throw GammaError("segment crosses a polygon corner");
  }
}

void GammaMesh::dump(std::ostream& os) const {
  os << std::setprecision(17);
  os << num_segments() << '\n';
  for (const auto& s : segs_) os << s.s0 << ' ' << s.s1 << ' ' << s.parentEdge << '\n';
}

GammaMesh refine_gamma(const GammaMesh& gamma, std::span<const int> marked, const Mesh2D& bulk) {
  std::vector<char> doSplit(gamma.num_segments(), 0);
  for (int i : marked) {
    if (i < 0 || i >= gamma.num_segments()) throw GammaError("marked segment out of range");
    doSplit[i] = 1;
  }
  std::vector<GammaSegment> out;
  out.reserve(gamma.num_segments() + marked.size());
  for (int i = 0; i < gamma.num_segments(); ++i) {
    const auto& seg = gamma.segments()[i];
    bool split = doSplit[i];
    if (split) {
      double hE = bulk.boundary_arc(seg.parentEdge + 1) - bulk.boundary_arc(seg.parentEdge);
      double half = 0.5 * (seg.s1 - seg.s0);
      if (hE > gamma.rho() * half * (1.0 + kRelTol)) split = false; // deferred
    }
    if (split) {
      double mid = 0.5 * (seg.s0 + seg.s1);
      out.push_back({seg.s0, mid, seg.parentEdge});
      out.push_back({mid, seg.s1, seg.parentEdge});
    } else {
      out.push_back(seg);
    }
  }
  return GammaMesh(std::move(out), gamma.total_length(), gamma.corner_arcs(), gamma.rho());
}

GammaMesh sync_gamma_to_bulk(const GammaMesh& gamma, const Mesh2D& bulk) {
  const double L = gamma.total_length();
  const double tol = kRelTol * L;
  if (std::abs(bulk.perimeter() - L) > tol)
    throw GammaError("gamma endpoints cannot be reconciled with the bulk boundary");
  // arc coordinates of all bulk boundary vertices, ascending
  std::vector<double> cuts(bulk.num_boundary_edges());
  for (int k = 0; k < bulk.num_boundary_edges(); ++k) cuts[k] = bulk.boundary_arc(k);
  std::vector<GammaSegment> out;
  out.reserve(gamma.num_segments() + cuts.size());
  for (const auto& seg : gamma.segments()) {
    std::vector<double> pts{seg.s0};
    auto lo = std::upper_bound(cuts.begin(), cuts.end(), seg.s0 + tol);
    for (auto it = lo; it != cuts.end() && *it < seg.s1 - tol; ++it) pts.push_back(*it);
    pts.push_back(seg.s1);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
      double a = pts[j], b = pts[j + 1];
      int k = bulk.boundary_edge_at_arc(0.5 * (a + b));
      if (a < bulk.boundary_arc(k) - tol || b > bulk.boundary_arc(k + 1) + tol)
        throw GammaError("gamma endpoints cannot be reconciled with the bulk boundary");
      out.push_back({a, b, k});
    }
  }
  return GammaMesh(std::move(out), L, bulk.corner_arcs(), gamma.rho());
}

} // namespace dynbc
