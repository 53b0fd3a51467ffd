// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "ccs/grid.hpp"
#include "ccs/quadrature.hpp"

namespace ccs {

enum class GammaMode { diagonal_dvr, exact_sinc };

/// Per-node single-component factors of a pair interaction
/// exp(-beta_l^2 (x_a - x_b)^2) between two coordinates sharing one
/// Cartesian component.
///
/// diagonal_dvr: tables(l) is L_a x L_b with entry (k_a, k_b) equal to the
///   Gaussian evaluated at the grid point pair; the operator acts as a
///   multiplication on the product grid.
/// exact_sinc: mats(l) is (L_a L_b) x (L_a L_b) with row index
///   n_a * L_b + n_b; entries are the exact two-coordinate integrals of the
///   Gaussian against sinc basis products, symmetric and PSD.
struct PairGammaSet {
  GammaMode mode = GammaMode::diagonal_dvr;
  GridSpec grid_a, grid_b;
  Eigen::VectorXd weights;  ///< copied from the decomposition
  std::vector<Eigen::MatrixXd> tables;
  std::vector<Eigen::MatrixXd> mats;
  int size() const { return int(weights.size()); }
};

/// Per-node single-component factors of a nuclear attraction Gaussian
/// exp(-beta_l^2 (x - X)^2) for one coordinate and a fixed center X.
struct NuclearGammaSet {
  GammaMode mode = GammaMode::diagonal_dvr;
  GridSpec grid;
  double center = 0.0;
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> diags;   ///< diagonal_dvr: length L
  std::vector<Eigen::MatrixXd> mats;    ///< exact_sinc: L x L
  int size() const { return int(weights.size()); }
};

PairGammaSet gamma_diagonal_dvr(const GaussQuadDecomposition& decomp,
                                const GridSpec& grid_a, const GridSpec& grid_b);

/// Exact sinc-basis pair matrices.  Sinc products are box functions in
/// momentum space, so each matrix element reduces to a one-dimensional
/// Gaussian-times-trigonometric integral evaluated by Gauss-Legendre
/// quadrature to better than 1e-12 absolute.  Throws if the per-node
/// matrices would exceed memory_budget_bytes.
PairGammaSet gamma_exact_sinc(const GaussQuadDecomposition& decomp,
                              const GridSpec& grid_a, const GridSpec& grid_b,
                              std::size_t memory_budget_bytes = std::size_t(2) << 30);

NuclearGammaSet nuclear_gamma_diagonal_dvr(const GaussQuadDecomposition& decomp,
                                           const GridSpec& grid, double center);
NuclearGammaSet nuclear_gamma_exact_sinc(const GaussQuadDecomposition& decomp,
                                         const GridSpec& grid, double center);

/// Exact integral  int phi_n(x_a) phi_n'(x_b) G phi_m(x_a) phi_m'(x_b)
/// for a single Gaussian width; exposed for oracle tests.
double exact_pair_element(double beta, const GridSpec& grid_a, const GridSpec& grid_b,
                          int n, int np, int m, int mp);
double exact_nuclear_element(double beta, const GridSpec& grid, double center,
                             int n, int m);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace ccs
