// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccs/sop_operator.hpp"
#include "ccs/symmetry.hpp"

namespace ccs {

struct SolverConfig {
  int n_states = 1;
  int block_size = 0;  ///< 0 -> n_states + 2
  int max_iters = 40;
  long rank_cap = 64;
  double als_tol = 1e-9;
  int als_max_sweeps = 60;
  std::optional<std::string> irrep;  ///< symmetry-restricted run when set
  int projection_period = 1;         ///< re-project every k iterations
  std::uint64_t seed = 1;
  double conv_tol = 1e-3;  ///< hartree; Krylov delta declaring convergence
  double breakdown_tol = 1e-8;

  int block() const { return block_size > 0 ? std::max(block_size, n_states) : n_states + 2; }
};

/// Probability mass on the extreme grid and momentum-lattice points, per
/// coordinate.  Row i*dims+d holds (lo, hi) for particle i, component d.
struct EdgeDiagnostics {
  Eigen::MatrixXd position;  ///< (N*dims) x 2
  Eigen::MatrixXd momentum;  ///< (N*dims) x 2
  double max_position() const { return position.size() ? position.maxCoeff() : 0.0; }
  double max_momentum() const { return momentum.size() ? momentum.maxCoeff() : 0.0; }
};

/// SOP-contracted marginals at the first/last grid point and at the extreme
/// momentum-lattice indices of every coordinate; psi must be normalized to
/// 1e-6 (throws otherwise).  No densification.
EdgeDiagnostics edge_probabilities(const SopState& psi, const GridSpec& grid, int N,
                                   int dims);

struct StateResult {
  double energy = 0.0;
  double delta = 0.0;  ///< change relative to the previous Krylov iteration
  bool converged = false;
  long rank = 0;
  double contamination = 0.0;  ///< 0 when the run is not symmetry-restricted
  std::string irrep;
};

struct IterationRow {
  int iter = 0;
  int subspace = 0;
  double max_reduction_residual = 0.0;
  std::vector<double> ritz;  ///< lowest block of Ritz values
};

struct EigenReport {
  std::vector<StateResult> states;
  std::vector<IterationRow> iterations;
  int breakdown_restarts = 0;
  bool all_converged = false;
};

struct KrylovOutput {
  EigenReport report;
  std::vector<SopState> eigenstates;
  std::vector<SopState> basis;  ///< final orthonormal Krylov basis
};

/// Block Krylov eigensolver in SOP arithmetic.  Every Hamiltonian
/// application is ALS-reduced to rank_cap; new vectors are re-orthogonalized
/// against the whole stored basis (twice) before joining it.  A zero-norm
/// candidate is replaced by a fresh seeded random vector and counted in
/// breakdown_restarts.  With cfg.irrep set, the initial block is projected
/// and new blocks re-projected every projection_period iterations.
KrylovOutput solve(const SopOperator& op, const SolverConfig& cfg,
                   const std::vector<SopState>* guess = nullptr);

/// 1 - <psi|P|psi>/<psi|psi> for the projector of `irrep`.
double purity_defect(const SopState& psi, const std::string& irrep,
                     const IrrepTable& table, const SopOperator& op);

}  // namespace ccs
