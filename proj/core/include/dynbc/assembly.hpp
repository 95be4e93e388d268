#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>

#include "dynbc/spaces.hpp"

namespace dynbc {

/// Loads of the stationary model problem.  f is evaluated at bulk points,
/// g at boundary arc coordinates; empty means 0.  The optional shift vectors
/// add shiftFactor * (discrete function) to the respective load, which is how
/// time stepping folds sigma*u^n into the effective right-hand side exactly.
struct ProblemData {
  std::function<double(Vec2)> f;
  std::function<double(double)> g;
  double sigma = 1.0;
  const std::vector<double>* uShift = nullptr;
  const std::vector<double>* pShift = nullptr;
  double shiftFactor = 0.0;
};

/// Assembled saddle-point system
///   [ A_u   0   -C_u^T ] [u]   [F]
///   [  0   A_p  +C_p^T ] [p] = [G]
///   [ C_u -C_p     0   ] [l]   [0]
/// A_u = sigma*M_u + K_u and A_p = sigma*M_p + K_p are SPD.  The applied /
/// solved operator negates the constraint row, which yields the same solution
/// and a symmetric matrix.
struct SaddleSystem {
  Eigen::SparseMatrix<double> Au, Ap, Cu, Cp;
  Eigen::VectorXd F, G;
  int dimV = 0, dimQ = 0, dimM = 0;

  int dim_total() const { return dimV + dimQ + dimM; }
  /// Symmetric global matrix (constraint row negated).
  Eigen::SparseMatrix<double> global() const;
};

SaddleSystem assemble(const DofMap& dofs, const ProblemData& data);

/// y = A x for the symmetric global operator, applied blockwise.
Eigen::VectorXd apply_saddle(const SaddleSystem& sys, const Eigen::VectorXd& x);

/// Full H1 norm matrix (unit coefficients) on V_h.
Eigen::SparseMatrix<double> h1_norm_matrix_bulk(const DofMap& dofs);
/// Full H1(Gamma) norm matrix on Q_h.
Eigen::SparseMatrix<double> h1_norm_matrix_gamma(const DofMap& dofs);
/// Discrete H^{-1/2}(Gamma) surrogate on M_h: sum over trace edges of
/// h_E * (psi_m, psi_n)_{L2(E)}, invariant under surface-only refinement.
Eigen::SparseMatrix<double> multiplier_norm_matrix(const DofMap& dofs);

/// Debug dump: one "row col value" line per stored entry, 0-based indices.
void dump_matrix(std::ostream& os, const Eigen::SparseMatrix<double>& m);

} // namespace dynbc
