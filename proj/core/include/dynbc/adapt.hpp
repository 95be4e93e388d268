#pragma once

#include <functional>
#include <limits>
#include <map>
#include <string>

#include "dynbc/estimator.hpp"

namespace dynbc {

struct AdaptConfig {
  double theta = 0.75;
  int maxDofs = 10000;       // stop once the recorded total dofs reach this
  double estimatorTol = 0.0; // stop when the estimator drops to this (0 = off)
  int maxSteps = 500;
  bool uniform = false;
  bool withError = false;    // record errors against the overkill reference
};

struct MarkResult {
  std::vector<int> markedTris;
  std::vector<int> markedSegs;
  bool converged = false; // all indicators were zero
};

/// Pooled Doerfler marking over bulk and surface indicators: the smallest
/// prefix of the values sorted descending whose sum reaches (1-theta) times
/// the grand total.  Ties break by value, then triangles before segments,
/// then smaller index.
MarkResult doerfler_mark(const std::vector<double>& tildeT2,
                         const std::vector<double>& tildeI2, double theta);

/// Problem posed on a mesh pair; refinement replaces the meshes.
struct AdaptState {
  std::shared_ptr<const Mesh2D> bulk;
  std::shared_ptr<const GammaMesh> gamma;
  SchemeConfig scheme;
  ProblemData data;
};

/// Refine per marking: bulk bisection (plus boundary edges forced by the rho
/// ratio), gamma sync, then segment bisection of marked segments that the
/// sync did not already split.
AdaptState refine_state(const AdaptState& state, const MarkResult& marks);

/// Uniform step: bulk quadrisection and one bisection of every segment (via
/// the sync where possible).
AdaptState uniform_refine_state(const AdaptState& state);

struct AdaptStepResult {
  AdaptState next;
  SolutionTriple sol;
  EstimatorReport report;
  bool refined = false;
};

/// One solve -> estimate -> mark -> refine cycle (marking skipped in uniform
/// mode).  refined is false when every indicator vanished.
AdaptStepResult adapt_step(const AdaptState& state, const AdaptConfig& cfg);

/// Same scheme and data solved after two uniform refinements of both meshes.
SolutionTriple solve_reference(const AdaptState& state);

struct ConvergenceRecord {
  int step = 0;
  int dofsU = 0, dofsP = 0, dofsL = 0;
  double error = std::numeric_limits<double>::quiet_NaN(); // NaN = not computed
  double estimator = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRecord> rows;
  std::map<std::string, std::string> meta; // leading "# k=v ..." comment line
  void write_csv(std::ostream& os) const;
};

/// onStep (optional) sees every adapt_step result before the stop rules run,
/// last call = final solution.
ConvergenceTable adaptive_loop(const AdaptState& state, const AdaptConfig& cfg,
                               const std::function<void(const AdaptStepResult&)>& onStep = {});

/// Least squares slope of log(error) vs log(total dofs) over the last n rows
/// with finite error.
double fitted_slope(const ConvergenceTable& table, int lastN, bool useEstimator = false);

} // namespace dynbc
