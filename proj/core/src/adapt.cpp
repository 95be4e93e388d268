#include "dynbc/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dynbc {

MarkResult doerfler_mark(const std::vector<double>& tildeT2, const std::vector<double>& tildeI2,
                         double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must be in (0,1]");
  struct Item {
    double v;
    int kind; // 0 = triangle, 1 = segment
    int idx;
  };
  std::vector<Item> items;
  items.reserve(tildeT2.size() + tildeI2.size());
  double total = 0.0;
  for (std::size_t i = 0; i < tildeT2.size(); ++i) {
    items.push_back({tildeT2[i], 0, static_cast<int>(i)});
    total += tildeT2[i];
  }
  for (std::size_t i = 0; i < tildeI2.size(); ++i) {
    items.push_back({tildeI2[i], 1, static_cast<int>(i)});
    total += tildeI2[i];
  }
  MarkResult out;
  if (total <= 0.0) {
    out.converged = true;
    return out;
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.v != b.v) return a.v > b.v;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.idx < b.idx;
  });
  const double target = (1.0 - theta) * total;
  double acc = 0.0;
  for (const auto& it : items) {
    acc += it.v;
    (it.kind == 0 ? out.markedTris : out.markedSegs).push_back(it.idx);
    if (acc >= target) break;
  }
  std::sort(out.markedTris.begin(), out.markedTris.end());
  std::sort(out.markedSegs.begin(), out.markedSegs.end());
  return out;
}

namespace {

// for each old segment, the index of its first covering piece in the new
// gamma and the number of pieces
std::vector<std::pair<int, int>> map_segments(const GammaMesh& oldG, const GammaMesh& newG) {
  const double tol = 1e-9 * oldG.total_length();
  std::vector<std::pair<int, int>> out(oldG.num_segments(), {-1, 0});
  int j = 0;
  for (int i = 0; i < oldG.num_segments(); ++i) {
    const auto& seg = oldG.segments()[i];
    while (j < newG.num_segments() && newG.segments()[j].s1 <= seg.s0 + tol) ++j;
    int first = j, count = 0;
    while (j < newG.num_segments() && newG.segments()[j].s1 <= seg.s1 + tol) {
      ++count;
      ++j;
    }
    out[i] = {first, count};
  }
  return out;
}

} // namespace

AdaptState refine_state(const AdaptState& state, const MarkResult& marks) {
  // segments whose bisection the rho ratio would block force their parent
  // boundary edge into the bulk marking first
  std::vector<int> forcedBd;
  for (int s : marks.markedSegs) {
    const auto& seg = state.gamma->segments()[s];
    double hE = state.bulk->boundary_arc(seg.parentEdge + 1) -
                state.bulk->boundary_arc(seg.parentEdge);
    double half = 0.5 * (seg.s1 - seg.s0);
    if (hE > state.gamma->rho() * half * (1.0 + 1e-9)) forcedBd.push_back(seg.parentEdge);
  }
  auto bulkNext = std::make_shared<const Mesh2D>(bisect(*state.bulk, marks.markedTris, forcedBd));
  GammaMesh synced = sync_gamma_to_bulk(*state.gamma, *bulkNext);
  auto pieces = map_segments(*state.gamma, synced);
  std::vector<int> refineSegs;
  for (int s : marks.markedSegs)
    if (pieces[s].second == 1) refineSegs.push_back(pieces[s].first);
  auto gammaNext =
      std::make_shared<const GammaMesh>(refine_gamma(synced, refineSegs, *bulkNext));
  return {bulkNext, gammaNext, state.scheme, state.data};
}

AdaptState uniform_refine_state(const AdaptState& state) {
  auto bulkNext = std::make_shared<const Mesh2D>(uniform_refine(*state.bulk));
  GammaMesh synced = sync_gamma_to_bulk(*state.gamma, *bulkNext);
  auto pieces = map_segments(*state.gamma, synced);
  std::vector<int> refineSegs;
  for (int s = 0; s < state.gamma->num_segments(); ++s)
    if (pieces[s].second == 1) refineSegs.push_back(pieces[s].first);
  auto gammaNext =
      std::make_shared<const GammaMesh>(refine_gamma(synced, refineSegs, *bulkNext));
  return {bulkNext, gammaNext, state.scheme, state.data};
}

AdaptStepResult adapt_step(const AdaptState& state, const AdaptConfig& cfg) {
  auto dofs = build_spaces(state.bulk, state.gamma, state.scheme);
  SaddleSystem sys = assemble(*dofs, state.data);
  AdaptStepResult res{state, solve(sys, dofs), {}, false};
  res.report = estimate(res.sol, state.data);
  if (cfg.uniform) {
    res.next = uniform_refine_state(state);
    res.refined = true;
    return res;
  }
  // exactness cases (constant solutions) land at the roundoff floor of the
  // residual arithmetic, never at a float zero; treat that as converged
  double scale = 1.0;
  for (const auto* vec : {&res.sol.u, &res.sol.p, &res.sol.lambda})
    for (double v : *vec) scale = std::max(scale, std::abs(v));
  scale *= 1.0 + std::abs(state.data.sigma);
  if (res.report.total2 <= 1e-26 * scale * scale) return res;
  AttributedIndicators ind = attribute(res.report, *dofs);
  MarkResult marks = doerfler_mark(ind.tildeT2, ind.tildeI2, cfg.theta);
  if (marks.converged) return res;
  res.next = refine_state(state, marks);
  res.refined = true;
  return res;
}

SolutionTriple solve_reference(const AdaptState& state) {
  AdaptState fine = uniform_refine_state(uniform_refine_state(state));
  auto dofs = build_spaces(fine.bulk, fine.gamma, fine.scheme);
  SaddleSystem sys = assemble(*dofs, fine.data);
  return solve(sys, dofs);
}

ConvergenceTable adaptive_loop(const AdaptState& state, const AdaptConfig& cfg,
                               const std::function<void(const AdaptStepResult&)>& onStep) {
  ConvergenceTable table;
  AdaptState cur = state;
  for (int step = 0; step <= cfg.maxSteps; ++step) {
    AdaptStepResult res = adapt_step(cur, cfg);
    if (onStep) onStep(res);
    ConvergenceRecord rec;
    rec.step = step;
    rec.dofsU = res.sol.dofs->dimV();
    rec.dofsP = res.sol.dofs->dimQ();
    rec.dofsL = res.sol.dofs->dimM();
    rec.estimator = res.report.total();
    if (cfg.withError) {
      SolutionTriple ref = solve_reference(cur);
      rec.error = error_norms(res.sol, ref).total();
    }
    table.rows.push_back(rec);
    int total = rec.dofsU + rec.dofsP + rec.dofsL;
    if (!res.refined) break;
    if (cfg.estimatorTol > 0.0 && rec.estimator <= cfg.estimatorTol) break;
    if (total >= cfg.maxDofs) break;
    cur = res.next;
  }
  return table;
}

void ConvergenceTable::write_csv(std::ostream& os) const {
  if (!meta.empty()) {
    os << "#";
    for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
    os << '\n';
  }
  os << "step,dofs_u,dofs_p,dofs_lambda,error,estimator\n";
  std::ostringstream num;
  num.precision(17);
  for (const auto& r : rows) {
    os << r.step << ',' << r.dofsU << ',' << r.dofsP << ',' << r.dofsL << ',';
    if (std::isfinite(r.error)) {
      num.str("");
      num << r.error;
      os << num.str();
    }
    num.str("");
    num << r.estimator;
    os << ',' << num.str() << '\n';
  }
}

double fitted_slope(const ConvergenceTable& table, int lastN, bool useEstimator) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table.rows) {
    double y = useEstimator ? r.estimator : r.error;
    if (std::isfinite(y) && y > 0.0)
      pts.emplace_back(std::log(double(r.dofsU + r.dofsP + r.dofsL)), std::log(y));
  }
  if (static_cast<int>(pts.size()) > lastN)
    pts.erase(pts.begin(), pts.end() - lastN);
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

} // namespace dynbc
