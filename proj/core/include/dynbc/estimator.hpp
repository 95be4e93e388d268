#pragma once

#include <iosfwd>

#include "dynbc/solver.hpp"

namespace dynbc {

/// Squared local error indicators.  Interior edge terms are indexed by mesh
/// edge id (zero on boundary edges); boundary edge terms by chain position;
/// segment terms by gamma segment index.
struct EstimatorReport {
  std::vector<double> etaT2;
  std::vector<double> etaEint2;
  std::vector<double> etaEbd2;
  std::vector<double> etaI2;
  double total2 = 0.0;
  double total() const;
};

/// Element residual, flux jump, boundary flux mismatch, constraint mismatch
/// and surface residual terms for a solved triple.  Data shifts are honored
/// the same way assemble does.
EstimatorReport estimate(const SolutionTriple& sol, const ProblemData& data);

/// Edge contributions redistributed onto refinable entities: interior edge
/// halves to its two triangles, boundary edge split evenly among the owning
/// triangle and the segments inside it.  Sums are preserved exactly.
struct AttributedIndicators {
  std::vector<double> tildeT2;
  std::vector<double> tildeI2;
};
AttributedIndicators attribute(const EstimatorReport& report, const DofMap& dofs);

/// One "kind index value" line per entity, kinds T, Ein, Ebd, I; squared values.
void dump_estimator(std::ostream& os, const EstimatorReport& report);

/// Error of a solution against an overkill reference computed on refined
/// meshes.  The coarse triple is prolonged into the reference spaces first.
/// errL is the h-weighted L2 surrogate of the multiplier norm.
struct ErrorNorms {
  double errU = 0.0, errP = 0.0, errL = 0.0;
  double total() const;
};
ErrorNorms error_norms(const SolutionTriple& sol, const SolutionTriple& ref);

} // namespace dynbc
