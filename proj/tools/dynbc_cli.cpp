// Command line driver for the benchmark problems: the stationary runs on the
// square and the L-shape, the time-dependent run, manufactured-solution
// verification and the inf-sup diagnostic.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dynbc/experiments.hpp"
#include "dynbc/solver.hpp"

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string scheme;          // empty = subcommand default
  std::string mode = "adaptive";
  double theta = 0.75;
  double sigma = 1.0;
  int maxDofs = 10000;
  double tol = -1.0;           // negative = subcommand default
  double tau = 1.5e-2;
  double t0 = 1.0;
  double t1 = 10.0;
  unsigned seed = 0;
  bool withError = false;
  bool maxDofsSet = false; // explicit flag or config key, not the default
  std::string out;
  std::string configPath;
  std::string dumpPath;
};

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

/// Flat key=value file, '#' starts a comment, the last occurrence of a key
/// wins.  Unknown keys are rejected.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = trimmed(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    std::string key = eq == std::string::npos ? std::string() : trimmed(t.substr(0, eq));
    if (key.empty())
      throw CliError(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[key] = trimmed(t.substr(eq + 1));
  }
  return kv;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw CliError("config key " + key + ": not a number: " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw CliError("config key " + key + ": not an integer: " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw CliError("config key " + key + ": not a boolean: " + value);
}

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--scheme", o.scheme,
                 "p1 or p2p0 (p2p1 keeps the quadratic pair and swaps the "
                 "multiplier to piecewise linears)")
      ->check(CLI::IsMember({"p1", "p2p0", "p2p1"}));
  sub.add_option("--mode", o.mode, "adaptive or uniform refinement")
      ->check(CLI::IsMember({"adaptive", "uniform"}));
  sub.add_option("--theta", o.theta, "bulk fraction of the marking rule");
  sub.add_option("--sigma", o.sigma, "zero-order coefficient of the stationary problem");
  sub.add_option("--max-dofs", o.maxDofs, "stop once the recorded total dofs reach this");
  sub.add_option("--tol", o.tol,
                 "stationary: stop when the estimator drops below this; "
                 "parabolic: per-step estimator tolerance");
  sub.add_option("--tau", o.tau, "time step size");
  sub.add_option("--t0", o.t0, "initial time");
  sub.add_option("--t1", o.t1, "final time");
  sub.add_option("--seed", o.seed, "seed for randomized diagnostics");
  sub.add_option("--out", o.out, "output path for the CSV (default stdout)");
  sub.add_option("--config", o.configPath, "key=value config file, flags override it");
  sub.add_option("--dump-meshes", o.dumpPath, "write mesh and solution dumps to this path");
  sub.add_flag("--with-error", o.withError, "record errors against a reference solution");
}

/// Applies config-file values for every option that was not given on the
/// command line.
void merge_config(const CLI::App& sub, Options& o, const std::string& problem) {
  if (o.configPath.empty()) return;
  auto kv = read_config(o.configPath);
  static const std::set<std::string> known = {
      "problem", "scheme", "mode",  "theta", "sigma",       "max-dofs",   "tol",
      "tau",     "t0",     "t1",    "seed",  "out",         "dump-meshes", "with-error"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw CliError("unknown config key: " + k);
  if (auto it = kv.find("problem"); it != kv.end() && it->second != problem)
    throw CliError("config sets problem=" + it->second + " but the subcommand is " + problem);

  auto unset = [&sub](const char* flag) { return sub.count(flag) == 0; };
  auto value = [&kv](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = value("scheme"); v && unset("--scheme")) {
    if (*v != "p1" && *v != "p2p0" && *v != "p2p1")
      throw CliError("config key scheme: unknown value " + *v);
    o.scheme = *v;
  }
  if (auto* v = value("mode"); v && unset("--mode")) {
    if (*v != "adaptive" && *v != "uniform")
      throw CliError("config key mode: unknown value " + *v);
    o.mode = *v;
  }
  if (auto* v = value("theta"); v && unset("--theta")) o.theta = parse_double("theta", *v);
  if (auto* v = value("sigma"); v && unset("--sigma")) o.sigma = parse_double("sigma", *v);
  if (auto* v = value("max-dofs"); v && unset("--max-dofs")) {
    o.maxDofs = parse_int("max-dofs", *v);
    o.maxDofsSet = true;
  }
  if (auto* v = value("tol"); v && unset("--tol")) o.tol = parse_double("tol", *v);
  if (auto* v = value("tau"); v && unset("--tau")) o.tau = parse_double("tau", *v);
  if (auto* v = value("t0"); v && unset("--t0")) o.t0 = parse_double("t0", *v);
  if (auto* v = value("t1"); v && unset("--t1")) o.t1 = parse_double("t1", *v);
  if (auto* v = value("seed"); v && unset("--seed"))
    o.seed = static_cast<unsigned>(parse_int("seed", *v));
  if (auto* v = value("out"); v && unset("--out")) o.out = *v;
  if (auto* v = value("dump-meshes"); v && unset("--dump-meshes")) o.dumpPath = *v;
  if (auto* v = value("with-error"); v && unset("--with-error"))
    o.withError = parse_bool("with-error", *v);
}

std::string effective_scheme(const Options& o, const std::string& problem) {
  if (!o.scheme.empty()) return o.scheme;
  return problem == "parabolic" ? "p2p0" : "p1";
}

dynbc::ExperimentConfig make_config(const Options& o, const std::string& problem) {
  dynbc::ExperimentConfig cfg;
  std::string scheme = effective_scheme(o, problem);
  cfg.scheme = scheme == "p1"     ? dynbc::scheme_p1()
               : scheme == "p2p0" ? dynbc::scheme_p2p0()
                                  : dynbc::scheme_p2p1();
  cfg.uniform = o.mode == "uniform";
  cfg.theta = o.theta;
  cfg.sigma = o.sigma;
  cfg.maxDofs = o.maxDofs;
  cfg.estimatorTol = problem != "parabolic" && o.tol > 0.0 ? o.tol : 0.0;
  cfg.withError = o.withError;
  cfg.tau = o.tau;
  cfg.tol = o.tol < 0.0 ? 1e-6 : o.tol;
  cfg.t0 = o.t0;
  cfg.t1 = o.t1;
  cfg.seed = o.seed;
  return cfg;
}

void write_out(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    if (!std::cout) throw CliError("write to stdout failed");
    return;
  }
  std::ofstream out(path);
  if (!out) throw CliError("cannot open output file: " + path);
  writer(out);
  out.flush();
  if (!out) throw CliError("write failed: " + path);
}

void dump_to(const std::string& path, const dynbc::SolutionTriple& sol) {
  write_out(path, [&](std::ostream& os) { dynbc::dump_solution(os, sol); });
}

int run_stationary(const Options& o, const std::string& problem) {
  dynbc::ExperimentConfig cfg = make_config(o, problem);
  std::optional<dynbc::SolutionTriple> last;
  std::function<void(const dynbc::SolutionTriple&)> keep;
  if (!o.dumpPath.empty()) keep = [&last](const dynbc::SolutionTriple& s) { last = s; };
  dynbc::ConvergenceTable table = problem == "square"     ? dynbc::run_square(cfg, keep)
                                  : problem == "lshape"   ? dynbc::run_lshape(cfg, keep)
                                                          : dynbc::run_manufactured(cfg, keep);
  write_out(o.out, [&](std::ostream& os) { table.write_csv(os); });
  if (last) dump_to(o.dumpPath, *last);
  return 0;
}

int run_parabolic_cmd(const Options& o) {
  dynbc::ExperimentConfig cfg = make_config(o, "parabolic");
  dynbc::TimeState state = dynbc::parabolic_initial_state(cfg);
  int lastWhole = static_cast<int>(std::floor(state.t + 1e-9));
  auto onStep = [&](const dynbc::TimeState& st) {
    const dynbc::StepRecord& rec = st.history.back();
    if (rec.n % 50 == 0)
      std::fprintf(stderr, "step %d t=%.4f dofs=%d/%d/%d\n", rec.n, rec.t, rec.dofsU,
                   rec.dofsP, rec.dofsL);
    if (!o.dumpPath.empty()) {
      int whole = static_cast<int>(std::floor(st.t + 1e-9));
      if (whole > lastWhole) {
        dump_to(o.dumpPath + ".t" + std::to_string(whole), st.sol);
        lastWhole = whole;
      }
    }
  };
  dynbc::TimeSeries series = dynbc::run_parabolic_experiment(state, cfg, onStep);
  write_out(o.out, [&](std::ostream& os) { series.write_csv(os); });
  if (!o.dumpPath.empty()) dump_to(o.dumpPath, state.sol);
  return 0;
}

int run_infsup_cmd(const Options& o) {
  std::vector<std::string> schemes;
  if (o.scheme.empty())
    schemes = {"p1", "p2p0"};
  else
    schemes = {o.scheme};
  write_out(o.out, [&](std::ostream& os) {
    std::ostringstream num;
    num.precision(17);
    for (const auto& name : schemes) {
      Options so = o;
      so.scheme = name;
      dynbc::ExperimentConfig cfg = make_config(so, "infsup");
      os << "# problem=infsup scheme=" << name << " theta=" << o.theta
         << " sigma=" << o.sigma << " lambda_norm=h-weighted-L2\n";
      os << "level,dofs,beta,beta_gamma_refined\n";
      // the eigensolver is dense, so the level cap stays small unless the
      // user asks for more
      int cap = o.maxDofsSet ? o.maxDofs : 3000;
      for (const auto& row : dynbc::run_infsup(cfg, cap)) {
        os << row.level << ',' << row.dofs << ',';
        num.str("");
        num << row.beta;
        os << num.str() << ',';
        num.str("");
        num << row.betaFinerGamma;
        os << num.str() << '\n';
      }
    }
  });
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive solver benchmarks for the coupled bulk-surface model problem"};
  app.require_subcommand(1);
  Options o;
  add_common(*app.add_subcommand("square", "oscillating boundary load on the unit square"), o);
  add_common(*app.add_subcommand("lshape", "corner singularity on the L-shaped domain"), o);
  add_common(*app.add_subcommand("parabolic", "time-dependent run with per-step adaptivity"), o);
  add_common(*app.add_subcommand("manufactured", "uniform study against a closed-form solution"), o);
  add_common(*app.add_subcommand("infsup", "discrete inf-sup constants per refinement level"), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string problem = sub->get_name();
  if (sub->count("--max-dofs") > 0) o.maxDofsSet = true;
  try {
    merge_config(*sub, o, problem);
    if (problem == "parabolic") return run_parabolic_cmd(o);
    if (problem == "infsup") return run_infsup_cmd(o);
    return run_stationary(o, problem);
  } catch (const dynbc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
