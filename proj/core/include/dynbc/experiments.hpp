#pragma once

#include <iosfwd>

#include "dynbc/timestep.hpp"

namespace dynbc {

/// Shared knobs of the benchmark runs.  Stationary runs use theta, sigma,
/// maxDofs, estimatorTol, withError; the parabolic run uses tau, tol, t0, t1.
struct ExperimentConfig {
  SchemeConfig scheme = scheme_p1();
  bool uniform = false;
  double theta = 0.75;
  double sigma = 1.0;
  int maxDofs = 10000;
  double estimatorTol = 0.0;
  int maxSteps = 500;
  bool withError = false;
  double tau = 1.5e-2;
  double tol = 1e-6;
  double t0 = 1.0;
  double t1 = 10.0;
  unsigned seed = 0; // reserved for randomized diagnostics
};

/// "p1", "p2p0" or "p2p1".
std::string scheme_name(const SchemeConfig& scheme);

/// Metadata comment fields written into every CSV.
std::map<std::string, std::string> experiment_meta(const ExperimentConfig& cfg,
                                                   const std::string& problem);

/// Unit square, constant bulk load 0.04 and the oscillating boundary load
/// x*y*cos(10 pi x)*cos(10 pi y).
AdaptState square_state(const ExperimentConfig& cfg);
/// L-shape, f constant 4 and g = 4(x^2 - x + y^2 - y) on the boundary.
AdaptState lshape_state(const ExperimentConfig& cfg);

/// onSolve (optional) sees the solution of every recorded step, last call =
/// finest level.
ConvergenceTable run_square(const ExperimentConfig& cfg,
                            const std::function<void(const SolutionTriple&)>& onSolve = {});
ConvergenceTable run_lshape(const ExperimentConfig& cfg,
                            const std::function<void(const SolutionTriple&)>& onSolve = {});

/// Uniform refinement study against the closed-form solution
/// u = cos(pi x)cos(pi y), p its trace, lambda = 0; data chosen so the
/// continuous problem is solved exactly by that triple.
ConvergenceTable run_manufactured(const ExperimentConfig& cfg,
                                  const std::function<void(const SolutionTriple&)>& onSolve = {});

/// Errors of a discrete triple against the closed-form solution above,
/// integrated with rules one notch above production.
ErrorNorms manufactured_error(const SolutionTriple& sol);

struct InfsupRow {
  int level = 0;
  int dofs = 0;
  double beta = 0.0;
  double betaFinerGamma = 0.0; // surface mesh refined once more, same bulk
};

/// beta per uniform refinement level on the unit square while the total
/// dimension stays within maxTotalDofs.
std::vector<InfsupRow> run_infsup(const ExperimentConfig& cfg, int maxTotalDofs = 3000);

/// Time-dependent benchmark loads: f constant 0.1 and
/// g = x*y*cos(pi t x)*cos(pi t y) on the boundary, zero initial data.
TimeData parabolic_data();
TimeState parabolic_initial_state(const ExperimentConfig& cfg);
TimeSeries run_parabolic_experiment(TimeState& state, const ExperimentConfig& cfg,
                                    const std::function<void(const TimeState&)>& onStep = {});

/// Snapshot dump: bulk mesh dump, gamma dump, then one "field index value"
/// line per dof with field in {u,p,lambda}.
void dump_solution(std::ostream& os, const SolutionTriple& sol);

} // namespace dynbc
