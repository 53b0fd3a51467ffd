// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

namespace ccs {

/// Uniform one-dimensional sinc-DVR grid, shared by all coordinates of one
/// Cartesian component.  Points x_k = x0 + (k - (L-1)/2) * delta are
/// symmetric about x0.  All quantities are in Hartree atomic units.
struct GridSpec {
  int L = 0;           ///< number of grid points, L >= 2
  double delta = 0.0;  ///< grid spacing in bohr, > 0
  double x0 = 0.0;     ///< grid center in bohr

  double point(int k) const { return x0 + (k - 0.5 * (L - 1)) * delta; }
  Eigen::VectorXd points() const;

  double extent_lo() const { return point(0); }
  double extent_hi() const { return point(L - 1); }

  /// Momentum lattice p_j = 2*pi*j/(L*delta) for j in {-floor(L/2), ...,
  /// ceil(L/2)-1}, returned in increasing j order.  This is the band-limited
  /// dual of the grid; momentum index 0 below maps to the most negative j.
  Eigen::VectorXd momenta() const;
  int momentum_index_lo() const { return -(L / 2); }

  bool operator==(const GridSpec&) const = default;
};

/// Validated construction.  Throws std::invalid_argument for L < 2 or
/// delta <= 0.
GridSpec build_grid(int L, double delta, double x0 = 0.0);

/// Sinc-DVR kinetic energy matrix -(1/2m) d^2/dx^2 in the infinite-grid
/// (Colbert-Miller) form: exact second-derivative matrix elements between
/// sinc basis functions on the real line.
///   T_kk  = pi^2 / (6 m delta^2)
///   T_kk' = (-1)^(k-k') / (m delta^2 (k-k')^2),  k != k'
Eigen::MatrixXd kinetic_sinc(const GridSpec& grid, double mass = 1.0);

/// Periodic (plane-wave) kinetic energy matrix: conjugation of
/// diag(p_j^2/2m) by the unitary DFT on the momentum lattice of `grid`.
/// This is the operator the quantum Fourier transform diagonalizes exactly;
/// it differs from kinetic_sinc at O(1/L^2) per entry.
Eigen::MatrixXd kinetic_fourier(const GridSpec& grid, double mass = 1.0);

/// Unitary DFT matrix F with F(j,k) = exp(-i p_j (x_k - x0)) / sqrt(L),
/// rows ordered like GridSpec::momenta().
Eigen::MatrixXcd dft_matrix(const GridSpec& grid);

/// Transform a length-L coefficient vector from the sinc (grid) to the
/// plane-wave (momentum) representation and back.  Unitary; composing the
/// two is the identity.  Throws on length mismatch.
Eigen::VectorXcd to_momentum(const Eigen::VectorXcd& state_axis, const GridSpec& grid);
Eigen::VectorXcd from_momentum(const Eigen::VectorXcd& momentum_axis, const GridSpec& grid);

}  // namespace ccs
