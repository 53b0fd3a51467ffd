// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ccs {

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void enumerate_partitions(int n, int max_part, std::vector<int>& cur,
                          std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    enumerate_partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  enumerate_partitions(n, n, cur, out);
  return out;
}

long long class_size(int n, const std::vector<int>& cycle_type) {
  // N! / prod_k k^{m_k} m_k!
  std::map<int, int> mult;
  for (int k : cycle_type) ++mult[k];
  long long denom = 1;
  for (auto [k, m] : mult) {
    for (int i = 0; i < m; ++i) denom *= k;
    denom *= factorial(m);
  }
  return factorial(n) / denom;
}

/// Murnaghan-Nakayama on beta numbers (abacus): removing a rim hook of
/// length t moves one bead down by t; the sign is (-1)^{beads passed}.
long long mn_char(std::vector<int> beta, const std::vector<int>& cycle_type,
                  std::size_t idx) {
  if (idx == cycle_type.size()) return 1;
  const int t = cycle_type[idx];
  long long acc = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const int target = beta[i] - t;
    if (target < 0) continue;
    if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    int passed = 0;
    for (int b : beta)
      if (b > target && b < beta[i]) ++passed;
    std::vector<int> next = beta;
    next[i] = target;
    const long long sub = mn_char(next, cycle_type, idx + 1);
    acc += (passed % 2 == 0 ? 1 : -1) * sub;
  }
  return acc;
}

std::vector<int> beta_numbers(const std::vector<int>& partition, int n_rows) {
  std::vector<int> beta(n_rows, 0);
  for (int i = 0; i < n_rows; ++i) {
    const int part = i < int(partition.size()) ? partition[i] : 0;
    beta[i] = part + (n_rows - 1 - i);
  }
  return beta;
}

std::string letter_for_dimension(long long dim) {
  switch (dim) {
    case 1: return "A";
    case 2: return "E";
    case 3: return "T";
    case 4: return "G";
    case 5: return "H";
    case 6: return "I";
    case 9: return "L";
    case 10: return "M";
    case 16: return "S";
    default:
      throw std::runtime_error("character_table: no label letter for dimension " +
                               std::to_string(dim));
  }
}

/// All permutations of {0..N-1} with their cycle types.
struct GroupElement {
  std::vector<int> perm;
  std::vector<int> cycle_type;
};

std::vector<GroupElement> group_elements(int N) {
  std::vector<int> p(N);
  std::iota(p.begin(), p.end(), 0);
  std::vector<GroupElement> out;
  do {
    GroupElement g;
    g.perm = p;
    std::vector<bool> seen(N, false);
    for (int i = 0; i < N; ++i) {
      if (seen[i]) continue;
      int len = 0, j = i;
      while (!seen[j]) {
        seen[j] = true;
        j = p[j];
        ++len;
      }
      g.cycle_type.push_back(len);
    }
    std::sort(g.cycle_type.rbegin(), g.cycle_type.rend());
    out.push_back(std::move(g));
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

int IrrepTable::class_index(const std::vector<int>& cycle_type) const {
  for (int i = 0; i < int(classes.size()); ++i)
    if (classes[i].cycle_type == cycle_type) return i;
  throw std::invalid_argument("IrrepTable: unknown cycle type");
}

int IrrepTable::irrep_index(const std::string& label) const {
  for (int i = 0; i < int(irreps.size()); ++i)
    if (irreps[i].label == label) return i;
  throw std::invalid_argument("IrrepTable: unknown irrep label " + label);
}

int IrrepTable::transposition_class() const {
  std::vector<int> t{2};
  for (int i = 0; i < N - 2; ++i) t.push_back(1);
  return class_index(t);
}

long long IrrepTable::group_order() const { return factorial(N); }

IrrepTable character_table(int N) {
  if (N < 2 || N > 6)
    throw std::invalid_argument("character_table: N must be between 2 and 6");
  IrrepTable table;
  table.N = N;

  const auto parts = partitions(N);
  for (const auto& ct : parts) table.classes.push_back({ct, class_size(N, ct)});

  const int identity = [&] {
    std::vector<int> ones(N, 1);
    return table.class_index(ones);
  }();

  for (const auto& shape : parts) {
    Irrep ir;
    ir.partition = shape;
    ir.chars.resize(table.classes.size());
    const auto beta = beta_numbers(shape, N);
    for (std::size_t c = 0; c < table.classes.size(); ++c)
      ir.chars[c] = mn_char(beta, table.classes[c].cycle_type, 0);
    ir.dim = ir.chars[identity];
    table.irreps.push_back(std::move(ir));
  }

  // Label assignment: group by dimension letter, order by transposition
  // character (descending), break remaining ties on the 3-cycle class.
  const int tc = table.transposition_class();
  int c3 = -1;
  if (N >= 3) {
    std::vector<int> t{3};
    for (int i = 0; i < N - 3; ++i) t.push_back(1);
    c3 = table.class_index(t);
  }
  std::map<std::string, std::vector<int>> by_letter;
  for (int i = 0; i < int(table.irreps.size()); ++i)
    by_letter[letter_for_dimension(table.irreps[i].dim)].push_back(i);
  for (auto& [letter, idx] : by_letter) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const auto& A = table.irreps[a];
      const auto& B = table.irreps[b];
      if (A.chars[tc] != B.chars[tc]) return A.chars[tc] > B.chars[tc];
      if (c3 >= 0 && A.chars[c3] != B.chars[c3]) return A.chars[c3] > B.chars[c3];
      return A.partition > B.partition;
    });
    const bool subscript = idx.size() > 1 || letter == "A";
    for (int k = 0; k < int(idx.size()); ++k)
      table.irreps[idx[k]].label = subscript ? letter + std::to_string(k + 1) : letter;
  }
  return table;
}

SpinDecomposition decompose_spin_rep(int N) {
  const IrrepTable table = character_table(N);
  SpinDecomposition out;
  out.N = N;
  const long long order = table.group_order();
  for (const auto& ir : table.irreps) {
    long long acc = 0;
    for (std::size_t c = 0; c < table.classes.size(); ++c) {
      const long long spin_char = 1LL << table.classes[c].n_cycles();
      acc += table.classes[c].size * ir.chars[c] * spin_char;
    }
    if (acc % order != 0)
      throw std::runtime_error("decompose_spin_rep: non-integer multiplicity");
    const long long m = acc / order;
    if (m > 0) out.multiplicities[ir.label] = int(m);
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> allowed_spatial_irreps(
    int N) {
  const IrrepTable table = character_table(N);
  const SpinDecomposition spin = decompose_spin_rep(N);
  const long long order = table.group_order();
  const int a2 = table.irrep_index("A2");

  std::vector<std::string> allowed, forbidden;
  for (const auto& spatial : table.irreps) {
    bool ok = false;
    for (const auto& [spin_label, mult] : spin.multiplicities) {
      (void)mult;
      const auto& s = table.irreps[table.irrep_index(spin_label)];
      long long acc = 0;  // multiplicity of A2 inside spatial (x) spin
      for (std::size_t c = 0; c < table.classes.size(); ++c)
        acc += table.classes[c].size * spatial.chars[c] * s.chars[c] *
               table.irreps[a2].chars[c];
      if (acc % order != 0)
        throw std::runtime_error("allowed_spatial_irreps: non-integer multiplicity");
      if (acc / order > 0) {
        ok = true;
        break;
      }
    }
    (ok ? allowed : forbidden).push_back(spatial.label);
  }
  auto by_label = [](std::vector<std::string>& v) { std::sort(v.begin(), v.end()); };
  by_label(allowed);
  by_label(forbidden);
  return {allowed, forbidden};
}

Fraction allowed_fraction(int N) {
  const IrrepTable table = character_table(N);
  const auto [allowed, forbidden] = allowed_spatial_irreps(N);
  (void)forbidden;
  long long num = 0;
  for (const auto& label : allowed) {
    const auto& ir = table.irreps[table.irrep_index(label)];
    num += ir.dim * ir.dim;
  }
  long long den = table.group_order();
  const long long g = std::gcd(num, den);
  return {num / g, den / g};
}

EquivalenceClass equivalence_class(std::vector<int> multiset) {
  std::sort(multiset.begin(), multiset.end());
  EquivalenceClass cls;
  cls.multiset = multiset;
  do {
    cls.members.push_back(multiset);
  } while (std::next_permutation(multiset.begin(), multiset.end()));
  return cls;
}

std::vector<Eigen::VectorXd> project_class(const EquivalenceClass& cls,
                                           const std::string& irrep,
                                           const IrrepTable& table) {
  const int N = table.N;
  const auto& ir = table.irreps[table.irrep_index(irrep)];
  const int n = int(cls.members.size());
  std::map<std::vector<int>, int> lookup;
  for (int i = 0; i < n; ++i) lookup[cls.members[i]] = i;
  auto member_index = [&](const std::vector<int>& tuple) {
    const auto it = lookup.find(tuple);
    if (it == lookup.end()) throw std::logic_error("project_class: tuple escaped its class");
    return it->second;
  };

  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(n, n);
  for (const auto& g : group_elements(N)) {
    const long long chi = ir.chars[table.class_index(g.cycle_type)];
    if (chi == 0) continue;
    for (int j = 0; j < n; ++j) {
      std::vector<int> moved(N);
      for (int p = 0; p < N; ++p) moved[g.perm[p]] = cls.members[j][p];
      proj(member_index(moved), j) += double(chi);
    }
  }
  proj *= double(ir.dim) / double(table.group_order());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
  std::vector<Eigen::VectorXd> basis;
  for (int i = 0; i < n; ++i)
    if (es.eigenvalues()[i] > 0.5) basis.push_back(es.eigenvectors().col(i));
  return basis;
}

SymmetryProjector::SymmetryProjector(const IrrepTable& table, const std::string& irrep,
                                     std::array<long, 3> axis_sizes)
    : N_(table.N), irrep_(irrep), axis_sizes_(axis_sizes) {
  const auto& ir = table.irreps[table.irrep_index(irrep)];
  for (const auto& g : group_elements(N_)) {
    const long long chi = ir.chars[table.class_index(g.cycle_type)];
    if (chi == 0) continue;
    coeff_.push_back(double(ir.dim) * double(chi) / double(table.group_order()));
    std::array<std::vector<long>, 3> maps;
    for (int d = 0; d < 3; ++d) {
      const long L = axis_sizes_[d];
      long M = 1;
      for (int p = 0; p < N_; ++p) M *= L;
      maps[d].resize(M);
      std::vector<long> digits(N_), moved(N_);
      for (long m = 0; m < M; ++m) {
        long rest = m;
        for (int p = N_ - 1; p >= 0; --p) {
          digits[p] = rest % L;
          rest /= L;
        }
        for (int p = 0; p < N_; ++p) moved[g.perm[p]] = digits[p];
        long idx = 0;
        for (int p = 0; p < N_; ++p) idx = idx * L + moved[p];
        maps[d][m] = idx;
      }
    }
    index_maps_.push_back(std::move(maps));
  }
}

SopState SymmetryProjector::apply(const SopState& psi) const {
  const long rank = psi.rank();
  const auto dims = psi.dims();
  SopState out;
  const long total = rank * long(coeff_.size());
  for (int d = 0; d < 3; ++d) out.f[d].resize(total, dims[d]);

  for (std::size_t e = 0; e < coeff_.size(); ++e) {
    for (int d = 0; d < 3; ++d) {
      const auto& map = index_maps_[e][d];
      if (long(map.size()) != dims[d])
        throw std::invalid_argument("SymmetryProjector: state layout does not match");
      auto dst = out.f[d].middleRows(long(e) * rank, rank);
      for (long m = 0; m < dims[d]; ++m) dst.col(map[m]) = psi.f[d].col(m);
      if (d == 0) dst *= coeff_[e];
    }
  }
  return out;
}

SopState project_state(const SopState& psi, const std::string& irrep,
                       const IrrepTable& table, std::array<long, 3> axis_sizes) {
  return SymmetryProjector(table, irrep, axis_sizes).apply(psi);
}

double contamination(const SopState& psi, const SymmetryProjector& projector) {
  const double n2 = sop_inner(psi, psi);
  if (n2 == 0.0) return 0.0;
  const SopState proj = projector.apply(psi);
  return 1.0 - sop_inner(psi, proj) / n2;
}

}  // namespace ccs
