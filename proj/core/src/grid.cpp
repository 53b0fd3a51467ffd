// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ccs {

namespace {
constexpr double kPi = std::numbers::pi;
}

Eigen::VectorXd GridSpec::points() const {
  Eigen::VectorXd x(L);
  for (int k = 0; k < L; ++k) x[k] = point(k);
  return x;
}

Eigen::VectorXd GridSpec::momenta() const {
  Eigen::VectorXd p(L);
  const double unit = 2.0 * kPi / (L * delta);
  const int j0 = momentum_index_lo();
  for (int i = 0; i < L; ++i) p[i] = unit * (j0 + i);
  return p;
}

GridSpec build_grid(int L, double delta, double x0) {
  if (L < 2) throw std::invalid_argument("build_grid: L must be >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("build_grid: delta must be > 0");
  return GridSpec{L, delta, x0};
}

Eigen::MatrixXd kinetic_sinc(const GridSpec& grid, double mass) {
  const int L = grid.L;
  const double pref = 1.0 / (mass * grid.delta * grid.delta);
  Eigen::MatrixXd t(L, L);
  for (int i = 0; i < L; ++i) {
    t(i, i) = pref * kPi * kPi / 6.0;
    for (int j = 0; j < i; ++j) {
      const int d = i - j;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      t(i, j) = pref * sign / double(d) / double(d);
      t(j, i) = t(i, j);
    }
  }
  return t;
}

Eigen::MatrixXd kinetic_fourier(const GridSpec& grid, double mass) {
  const int L = grid.L;
  const Eigen::VectorXd p = grid.momenta();
  // (F^H diag(p^2/2m) F)_{kl} = (1/L) sum_j (p_j^2/2m) cos(p_j (x_k - x_l)).
  // Real by symmetry of the momentum weights under j -> -j for odd L; the
  // even-L unpaired mode contributes a real cosine as well.
  Eigen::MatrixXd t(L, L);
  for (int k = 0; k < L; ++k) {
    for (int l = 0; l <= k; ++l) {
      const double dx = (k - l) * grid.delta;
      double acc = 0.0;
      for (int j = 0; j < L; ++j) acc += p[j] * p[j] * std::cos(p[j] * dx);
      t(k, l) = acc / (2.0 * mass * L);
      t(l, k) = t(k, l);
    }
  }
  return t;
}

Eigen::MatrixXcd dft_matrix(const GridSpec& grid) {
  const int L = grid.L;
  const Eigen::VectorXd p = grid.momenta();
  const double norm = 1.0 / std::sqrt(double(L));
  Eigen::MatrixXcd f(L, L);
  for (int j = 0; j < L; ++j) {
    for (int k = 0; k < L; ++k) {
      const double phase = -p[j] * (grid.point(k) - grid.x0);
      f(j, k) = std::polar(norm, phase);
    }
  }
  return f;
}

Eigen::VectorXcd to_momentum(const Eigen::VectorXcd& state_axis, const GridSpec& grid) {
  if (state_axis.size() != grid.L)
    throw std::invalid_argument("to_momentum: vector length does not match grid");
  return dft_matrix(grid) * state_axis;
}

Eigen::VectorXcd from_momentum(const Eigen::VectorXcd& momentum_axis, const GridSpec& grid) {
  if (momentum_axis.size() != grid.L)
    throw std::invalid_argument("from_momentum: vector length does not match grid");
  return dft_matrix(grid).adjoint() * momentum_axis;
}

}  // namespace ccs
