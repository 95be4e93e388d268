#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dynbc/mesh.hpp"

namespace dynbc {

class GammaError : public MeshError {
 public:
  using MeshError::MeshError;
};

/// Segment of the surface mesh in the arc-length parametrization of Gamma.
/// parentEdge is the bulk boundary edge (chain position) containing it.
struct GammaSegment {
  double s0 = 0.0;
  double s1 = 0.0;
  int parentEdge = -1;
};

/// Partition of the closed boundary curve into arc-length segments.  Always a
/// refinement of the bulk boundary trace: every segment lies inside exactly
/// one bulk boundary edge and never crosses a polygon corner.  Segment sizes
/// obey h_E <= rho * h_I against the parent edge.
class GammaMesh {
 public:
  GammaMesh(std::vector<GammaSegment> segments, double totalLength,
            std::vector<double> cornerArcs, double rho = 8.0);

  /// The trace mesh itself: one segment per bulk boundary edge.
  static GammaMesh trace_of(const Mesh2D& bulk, double rho = 8.0);

  int num_segments() const { return static_cast<int>(segs_.size()); }
  const std::vector<GammaSegment>& segments() const { return segs_; }
  double total_length() const { return length_; }
  double rho() const { return rho_; }
  double segment_length(int i) const { return segs_[i].s1 - segs_[i].s0; }
  /// Segment whose arc interval contains s (wrapped mod total length).
  int segment_at_arc(double s) const;
  const std::vector<double>& corner_arcs() const { return cornerArcs_; }

  /// Throws GammaError unless the refinement relation, the rho ratio and the
  /// corner condition all hold against the given bulk mesh.
  void check_against(const Mesh2D& bulk) const;

  void dump(std::ostream& os) const;

 private:
  std::vector<GammaSegment> segs_; // sorted by s0, covering [0, length]
  std::vector<double> cornerArcs_;
  double length_ = 0.0;
  double rho_ = 8.0;
};

/// Split each marked segment at its arc midpoint.  A split whose children
/// would undercut h_E <= rho*h_I against this bulk mesh is deferred (the
/// segment stays); callers refine the bulk edge first to unlock it.
GammaMesh refine_gamma(const GammaMesh& gamma, std::span<const int> marked, const Mesh2D& bulk);

/// Re-establish the refinement relation after the bulk was refined: segments
/// are split at every bulk boundary vertex in their interior and parent edges
/// are resolved against the new chain.
GammaMesh sync_gamma_to_bulk(const GammaMesh& gamma, const Mesh2D& bulk);

} // namespace dynbc
