#pragma once

#include <map>
#include <string>

#include "dynbc/adapt.hpp"

namespace dynbc {

/// Time dependent loads: f(x,t) in the bulk, g(s,t) on the boundary arc.
/// Empty means 0.
struct TimeData {
  std::function<double(Vec2, double)> f;
  std::function<double(double, double)> g;
};

struct StepRecord {
  int n = 0;
  double t = 0.0;
  int dofsU = 0, dofsP = 0, dofsL = 0;
  double estimator = 0.0;
  int refineRounds = 0; // refinements spent inside the step
};

/// One time level of the implicit Euler march.  sol carries u^n, p^n on the
/// current spaces; refinement only ever moves forward, so transfer to later
/// meshes stays exact.
struct TimeState {
  double t = 0.0;
  SolutionTriple sol;
  double tau = 1.5e-2;
  std::vector<StepRecord> history;
};

struct TimeStepConfig {
  double tol = 1e-6; // per-step bound on the sum of the squared indicators
  double theta = 0.75;
  int maxRoundsPerStep = 30;
};

/// Nodal interpolation of consistent initial data.  p0 empty means the trace
/// of u0; both empty gives the zero state.
TimeState make_initial_state(std::shared_ptr<const Mesh2D> bulk,
                             std::shared_ptr<const GammaMesh> gamma, const SchemeConfig& scheme,
                             double tau, double t0 = 0.0,
                             const std::function<double(Vec2)>& u0 = {},
                             const std::function<double(double)>& p0 = {});

/// One implicit Euler step.  Assembles the stationary problem with
/// sigma = 1/tau and the previous level folded into the loads, then refines
/// (prolonging the previous level each time) until the squared estimator
/// total drops to cfg.tol.  Appends a StepRecord to the history.  Throws
/// NumericalError when maxRoundsPerStep refinements do not get there.
TimeState euler_step(const TimeState& state, const TimeData& data, const TimeStepConfig& cfg);

struct TimeSeries {
  std::vector<StepRecord> rows;
  std::map<std::string, std::string> meta; // leading "# k=v ..." comment line
  void write_csv(std::ostream& os) const;
};

/// March from state.t to t1, ceil((t1 - t)/tau) steps; t overshoots t1 when
/// the horizon is not a multiple of tau.  state advances in place; onStep
/// runs after every accepted step (snapshots hook in here).
TimeSeries run_parabolic(TimeState& state, const TimeData& data, const TimeStepConfig& cfg,
                         double t1, const std::function<void(const TimeState&)>& onStep = {});

} // namespace dynbc
