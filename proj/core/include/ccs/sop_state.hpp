// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace ccs {

/// Rank-Lambda canonical (sum-of-products) tensor over the three Cartesian
/// component indices.  Row lambda of factor d holds the component-d
/// amplitude vector of term lambda; the represented vector is
///   Psi[(mx, my, mz)] = sum_l X(l, mx) Y(l, my) Z(l, mz).
/// Storage is Lambda * (Mx + My + Mz), never the dense product.
/// Components not used by a reduced-dimensional problem carry M_d = 1.
struct SopState {
  using Factor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::array<Factor, 3> f;

  long rank() const { return f[0].rows(); }
  std::array<long, 3> dims() const { return {f[0].cols(), f[1].cols(), f[2].cols()}; }

  static SopState zeros(const std::array<long, 3>& dims, long rank);
  static SopState random(const std::array<long, 3>& dims, long rank, std::mt19937_64& rng);

  /// Euclidean norm of each term (product of its factor row norms).
  Eigen::VectorXd term_norms() const;
  /// Rescale every factor row of each term to the geometric mean of the
  /// three row norms; guards long products against overflow/underflow.
  void balance_terms();
};

/// <a|b> via per-component Gram matrices; O(rank_a rank_b (Mx+My+Mz)).
/// Throws on dimension mismatch.
double sop_inner(const SopState& a, const SopState& b);
double sop_norm(const SopState& a);

/// alpha * a + b as a rank-(ra+rb) concatenation; no reduction.
SopState axpy(double alpha, const SopState& a, const SopState& b);
SopState scaled(double alpha, const SopState& a);

/// Dense expansion with index (mx * My + my) * Mz + mz.  Throws when the
/// dense size exceeds max_elems.
Eigen::VectorXd densify(const SopState& a, long max_elems = 10'000'000);

struct AlsOptions {
  double tol = 1e-8;        ///< stop when the per-sweep relative residual
                            ///< improvement falls below tol
  int max_sweeps = 200;
  std::uint64_t seed = 0;   ///< used only by the degenerate-input fallback
};

struct AlsResult {
  SopState state;
  double residual = 0.0;            ///< final relative residual |a - b|/|a|
  int sweeps = 0;
  std::vector<double> residual_log; ///< exact residual after each sweep
};

/// Alternating-least-squares reduction of `a` to rank <= target_rank.
/// Initial guess: the target_rank largest-norm terms of `a` (seeded random
/// on degenerate input).  Normal equations carry a relative Tikhonov shift,
/// so collinear factor Grams never abort a run.  The reported residual is
/// exact, computed through inner-product identities.
AlsResult als_reduce(const SopState& a, long target_rank, const AlsOptions& opts = {});

/// Binary factor dump (header: rank, Mx, My, Mz as int64; row-major factor
/// data as float64).  Layout is independent of Eigen versions.
void save_sop(std::ostream& os, const SopState& a);
SopState load_sop(std::istream& is);

}  // namespace ccs
