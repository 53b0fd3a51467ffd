// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "ccs/sop_state.hpp"

namespace ccs {

/// Conjugacy class of S_N, identified by cycle type (partition of N,
/// descending).
struct ConjClass {
  std::vector<int> cycle_type;
  long long size = 0;
  int n_cycles() const { return int(cycle_type.size()); }
};

/// Irreducible representation with exact integer characters, one per class.
/// Labels follow the degeneracy-letter scheme A, E, T, G, H, I for
/// dimensions 1..6 and L, M, S for 9, 10, 16 (the dimensions occurring up
/// to S_6).  Equal-dimension irreps get subscripts ordered by descending
/// character on the transposition class (ties broken on the 3-cycle class);
/// a letter used once carries no subscript, except A whose two members are
/// always A1 (trivial) and A2 (sign).
struct Irrep {
  std::string label;
  std::vector<int> partition;
  long long dim = 0;
  std::vector<long long> chars;  ///< indexed like IrrepTable::classes
};

struct IrrepTable {
  int N = 0;
  std::vector<ConjClass> classes;
  std::vector<Irrep> irreps;

  int class_index(const std::vector<int>& cycle_type) const;
  int irrep_index(const std::string& label) const;  ///< throws on unknown label
  int transposition_class() const;                  ///< cycle type (2,1,...)
  long long group_order() const;
};

/// Full character table of S_N computed by the Murnaghan-Nakayama rule in
/// exact integer arithmetic.  Accepts 2 <= N <= 6 (the label scheme covers
/// exactly the dimensions occurring there).
IrrepTable character_table(int N);

struct SpinDecomposition {
  int N = 0;
  std::map<std::string, int> multiplicities;  ///< label -> multiplicity (> 0 only)
};

/// Decomposition of the 2^N-dimensional spin permutation representation
/// into S_N irreps, via exact character inner products.
SpinDecomposition decompose_spin_rep(int N);

/// Spatial irreps that combine with an available spin irrep to a totally
/// antisymmetric total wavefunction, and their complement.
std::pair<std::vector<std::string>, std::vector<std::string>> allowed_spatial_irreps(int N);

struct Fraction {
  long long num = 0, den = 1;
  double value() const { return double(num) / double(den); }
};

/// sum over allowed irreps of dim^2 / N!; the asymptotic fraction of
/// spatial product states carrying allowed symmetry.
Fraction allowed_fraction(int N);

/// Particle-permutation equivalence class of one component's product basis
/// labels: all distinct arrangements of a multiset of per-particle indices.
struct EquivalenceClass {
  std::vector<int> multiset;                ///< sorted representative
  std::vector<std::vector<int>> members;    ///< distinct arrangements
};

EquivalenceClass equivalence_class(std::vector<int> multiset);

/// Orthonormal spanning set of the irrep's isotypic component within the
/// span of an equivalence class; may be empty.
std::vector<Eigen::VectorXd> project_class(const EquivalenceClass& cls,
                                           const std::string& irrep,
                                           const IrrepTable& table);

/// Isotypic projector acting on SopStates over particle-separated grids.
/// Permutations act by reordering the per-particle sub-indices of every
/// component factor; the projection is the character-weighted group sum,
/// multiplying the rank by the number of group elements with nonzero
/// character.
class SymmetryProjector {
 public:
  /// axis_sizes[d] = per-particle basis size L of component d (1 for
  /// components unused in reduced-dimensional problems).
  SymmetryProjector(const IrrepTable& table, const std::string& irrep,
                    std::array<long, 3> axis_sizes);

  /// Projected state of rank <= (group support) * rank(psi); no reduction.
  SopState apply(const SopState& psi) const;

  const std::string& irrep() const { return irrep_; }
  int particle_count() const { return N_; }

 private:
  int N_;
  std::string irrep_;
  std::array<long, 3> axis_sizes_;
  std::vector<double> coeff_;                    ///< d/|G| * chi(g), nonzero only
  std::vector<std::array<std::vector<long>, 3>> index_maps_;
};

SopState project_state(const SopState& psi, const std::string& irrep,
                       const IrrepTable& table, std::array<long, 3> axis_sizes);

/// 1 - <psi|P|psi>/<psi|psi>; zero for a symmetry-pure state.
double contamination(const SopState& psi, const SymmetryProjector& projector);

}  // namespace ccs
