// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace ccs {

/// Radial kernels admitting an inverse-Laplace sum-of-Gaussians form
///   K(s) ~ sum_l w_l exp(-beta_l^2 s),   s = squared distance in bohr^2.
enum class KernelKind { coulomb_repulsion, coulomb_attraction, yukawa };

struct KernelSpec {
  KernelKind kind = KernelKind::coulomb_repulsion;
  double yukawa_gamma = 1.0;  ///< screening constant (1/bohr), yukawa only
  double Z = 1.0;             ///< nuclear charge, coulomb_attraction only

  static KernelSpec coulomb() { return {KernelKind::coulomb_repulsion, 1.0, 1.0}; }
  static KernelSpec attraction(double Z) { return {KernelKind::coulomb_attraction, 1.0, Z}; }
  static KernelSpec yukawa(double gamma) { return {KernelKind::yukawa, gamma, 1.0}; }
};

/// Pointwise kernel value: 1/sqrt(s), -Z/sqrt(s) or exp(-gamma sqrt(s))/sqrt(s).
/// Throws for s <= 0.
double kernel_value(const KernelSpec& kernel, double s);

/// Gaussian quadrature decomposition of a radial kernel magnitude.
///
/// nodes/weights satisfy  sum_l w_l exp(-beta_l^2 s) ~ |K(s)|  on
/// [s_min, s_max] with max relative error `achieved_error` (measured on a
/// dense log-spaced sample).  Weights are strictly positive and absorb the
/// 2/sqrt(pi) prefactor of the beta integral; the -Z sign of an attractive
/// kernel is applied at operator assembly, not here.
struct GaussQuadDecomposition {
  KernelSpec kernel;
  Eigen::VectorXd nodes;    ///< beta_l, strictly positive, strictly increasing
  Eigen::VectorXd weights;  ///< w_l, strictly positive
  double s_min = 0.0;
  double s_max = 0.0;
  double achieved_error = 0.0;

  int size() const { return int(nodes.size()); }
  /// sum_l w_l exp(-beta_l^2 s); valid for any s >= 0, including s = 0
  /// where it regularizes the singular kernel to the finite value sum_l w_l.
  double evaluate(double s) const;
};

/// Build a lambda_count-term decomposition on [s_min, s_max].
///
/// A log-beta trapezoid discretization of the inverse Laplace integral is
/// generated first and then compressed to the requested term count by
/// node elimination with minimax (Lawson-weighted Gauss-Newton)
/// re-optimization of all nodes and weights.  The achieved max relative
/// error is recorded on the result.  Throws for lambda_count < 1 or
/// s_min <= 0 or s_min >= s_max.
GaussQuadDecomposition decompose_kernel(const KernelSpec& kernel, int lambda_count,
                                        double s_min, double s_max);

/// Memoized variant of decompose_kernel.  Decompositions depend only on
/// (kind, gamma, lambda, s-range) and are reused heavily across operator
/// assemblies; the cache is process-wide and thread-safe.
const GaussQuadDecomposition& decompose_kernel_cached(const KernelSpec& kernel,
                                                      int lambda_count, double s_min,
                                                      double s_max);

/// Default validity window for a grid with spacing delta and L points:
/// smallest nonzero and largest attainable squared separations, padded.
///   s_min = (delta/2)^2,  s_max = (3 (L-1) delta)^2
std::pair<double, double> default_s_range(int L, double delta);

/// Plain-text table round trip (header records kind, term count, s-range
/// and achieved error; body is one "beta w" row per node).
void write_decomposition(std::ostream& os, const GaussQuadDecomposition& d);
GaussQuadDecomposition read_decomposition(std::istream& is);

}  // namespace ccs
