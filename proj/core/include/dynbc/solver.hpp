#pragma once

#include <memory>

#include "dynbc/assembly.hpp"

namespace dynbc {

/// Thrown when a numerical contract is violated (solver residual, indefinite
/// norm matrix, NaN in an estimator).  The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolutionTriple {
  std::vector<double> u, p, lambda;
  std::shared_ptr<const DofMap> dofs;
};

/// Sparse direct solve of the saddle system.  The relative residual
/// ||Ax-b|| / max(1, ||b||) of the returned triple is checked against 1e-10;
/// violation throws NumericalError.  Deterministic for fixed input.
SolutionTriple solve(const SaddleSystem& sys, std::shared_ptr<const DofMap> dofs);

/// Embed a solution into spaces on refined meshes.  Exact for nested meshes
/// (refinement outputs); throws NumericalError when the meshes are not nested.
SolutionTriple prolong(const SolutionTriple& sol, std::shared_ptr<const DofMap> fine);

/// Discrete inf-sup constant beta of the coupling form: smallest generalized
/// eigenvalue of (C N_X^{-1} C^T, N_M) with C = [C_u, -C_p], N_X the full
/// H1(Omega) x H1(Gamma) norm and N_M the multiplier norm surrogate.  Dense;
/// meant for diagnostic-size spaces.
double infsup_constant(const DofMap& dofs);

} // namespace dynbc
