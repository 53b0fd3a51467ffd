// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "ccs/gamma.hpp"
#include "ccs/grid.hpp"
#include "ccs/quadrature.hpp"
#include "ccs/sop_state.hpp"

namespace ccs {

/// Action of one operator term on a single Cartesian component.  Particle
/// sub-indices within a component factor are ordered most-significant
/// first: column index m decodes to (m_1 ... m_N) base L.
struct CompOp {
  enum class Kind { identity, diag1, dense1, diag2, dense2 };
  Kind kind = Kind::identity;
  int p1 = -1, p2 = -1;  ///< touched particles (p1 < p2 for pair kinds)
  std::shared_ptr<const Eigen::VectorXd> diag;   ///< diag1: length L
  std::shared_ptr<const Eigen::MatrixXd> mat;    ///< dense1: LxL; diag2: LxL
                                                 ///< table; dense2: L^2 x L^2
  static CompOp identity_op() { return {}; }
  static CompOp one_diag(int p, std::shared_ptr<const Eigen::VectorXd> v);
  static CompOp one_dense(int p, std::shared_ptr<const Eigen::MatrixXd> m);
  static CompOp pair_diag(int p, int q, std::shared_ptr<const Eigen::MatrixXd> table);
  static CompOp pair_dense(int p, int q, std::shared_ptr<const Eigen::MatrixXd> m);
};

struct SopTerm {
  double weight = 1.0;
  std::array<CompOp, 3> comp;
};

/// Sum of tensor-product operator terms over the three components.
struct SopOperator {
  int n_particles = 1;
  int dims = 3;  ///< active Cartesian components (reduced-dim toy modes)
  GridSpec grid;
  std::vector<SopTerm> terms;

  long axis_size(int d) const { return d < dims ? grid.L : 1; }
  std::array<long, 3> state_dims() const;
  SopState random_state(long rank, std::mt19937_64& rng) const;
};

struct ProblemSpec {
  int n_electrons = 1;
  int dims = 3;
  GridSpec grid{2, 1.0, 0.0};

  enum class Ext { none, harmonic, coulomb_nuclei };
  Ext ext = Ext::none;
  double omega = 0.5;
  struct Nucleus {
    double Z = 1.0;
    std::array<double, 3> pos{0.0, 0.0, 0.0};
  };
  std::vector<Nucleus> nuclei;

  enum class Vee { none, coulomb, yukawa };
  Vee vee = Vee::none;
  double yukawa_gamma = 1.0;

  GammaMode gamma_mode = GammaMode::exact_sinc;
  int lambda_ee = 22;
  int lambda_ze = 0;  ///< 0 -> same as lambda_ee

  enum class Kinetic { sinc, fourier };
  Kinetic kinetic = Kinetic::sinc;

  double s_min = 0.0, s_max = 0.0;  ///< 0 -> default_s_range(L, delta)

  std::pair<double, double> s_range() const;
  int lambda_ze_effective() const { return lambda_ze > 0 ? lambda_ze : lambda_ee; }
};

/// Assemble the N-electron Hamiltonian: 3N kinetic terms, component-
/// separable external terms (harmonic exactly, nuclear attraction as a
/// -Z-weighted gamma sum) and lambda_ee gamma-product terms per electron
/// pair.  Throws on invalid specs.
SopOperator assemble(const ProblemSpec& spec);

/// H psi as an unreduced SOP of rank terms * rank(psi), exact.
SopState apply(const SopOperator& op, const SopState& psi);

/// Dense counterpart sharing the operator's component matrices exactly.
class DenseHamiltonian {
 public:
  explicit DenseHamiltonian(const SopOperator& op);
  long dim() const { return dim_; }
  Eigen::VectorXd matvec(const Eigen::VectorXd& x) const;
  /// Materialized symmetric matrix; throws if dim exceeds max_dim.
  Eigen::MatrixXd materialize(long max_dim = 10000) const;

 private:
  const SopOperator op_;
  long dim_ = 0;
};

DenseHamiltonian build_dense(const ProblemSpec& spec);

}  // namespace ccs
