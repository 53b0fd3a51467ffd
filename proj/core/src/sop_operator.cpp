// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/sop_operator.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ccs {

namespace {

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Multiplier vector over a component's index space for diagonal kinds.
Eigen::VectorXd diag_multiplier(const CompOp& op, long L, int N) {
  const long M = ipow(L, N);
  Eigen::VectorXd w(M);
  if (op.kind == CompOp::Kind::diag1) {
    const long s = ipow(L, N - 1 - op.p1);
    for (long m = 0; m < M; ++m) w[m] = (*op.diag)[(m / s) % L];
  } else {
    const long sp = ipow(L, N - 1 - op.p1);
    const long sq = ipow(L, N - 1 - op.p2);
    for (long m = 0; m < M; ++m) w[m] = (*op.mat)((m / sp) % L, (m / sq) % L);
  }
  return w;
}

/// Grouped-index map for pair-dense kinds: m -> ((a L + b) M_rest + r)
/// where a, b are the digits of particles p1, p2 and r ranks the others.
std::vector<long> pair_gather_map(long L, int N, int p, int q) {
  const long M = ipow(L, N);
  const long m_rest = ipow(L, N - 2);
  std::vector<long> map(M);
  std::vector<long> digits(N);
  for (long m = 0; m < M; ++m) {
    long rest = m;
    for (int i = N - 1; i >= 0; --i) {
      digits[i] = rest % L;
      rest /= L;
    }
    long r = 0;
    for (int i = 0; i < N; ++i) {
      if (i == p || i == q) continue;
      r = r * L + digits[i];
    }
    map[m] = (digits[p] * L + digits[q]) * m_rest + r;
  }
  return map;
}

using RowMat = SopState::Factor;

/// Apply a CompOp to every row of a factor matrix (rows are component
/// vectors of individual SOP terms).
RowMat apply_comp_rows(const CompOp& op, const RowMat& src, long L, int N) {
  switch (op.kind) {
    case CompOp::Kind::identity:
      return src;
    case CompOp::Kind::diag1:
    case CompOp::Kind::diag2: {
      const Eigen::VectorXd w = diag_multiplier(op, L, N);
      RowMat dst = src;
      dst.array().rowwise() *= w.transpose().array();
      return dst;
    }
    case CompOp::Kind::dense1: {
      const long s = ipow(L, N - 1 - op.p1);
      const long n_outer = ipow(L, op.p1);
      RowMat dst(src.rows(), src.cols());
      using Block = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>;
      using MBlock =
          Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
      for (long r = 0; r < src.rows(); ++r) {
        const double* in = src.row(r).data();
        double* out = dst.row(r).data();
        for (long o = 0; o < n_outer; ++o) {
          Block b(in + o * L * s, L, s);
          MBlock m(out + o * L * s, L, s);
          m.noalias() = (*op.mat) * b;
        }
      }
      return dst;
    }
    case CompOp::Kind::dense2: {
      const std::vector<long> map = pair_gather_map(L, N, op.p1, op.p2);
      const long m_rest = ipow(L, N - 2);
      RowMat dst(src.rows(), src.cols());
      Eigen::MatrixXd scratch(L * L, m_rest), prod(L * L, m_rest);
      for (long r = 0; r < src.rows(); ++r) {
        for (long m = 0; m < src.cols(); ++m)
          scratch(map[m] / m_rest, map[m] % m_rest) = src(r, m);
        prod.noalias() = (*op.mat) * scratch;
        for (long m = 0; m < src.cols(); ++m)
          dst(r, m) = prod(map[m] / m_rest, map[m] % m_rest);
      }
      return dst;
    }
  }
  throw std::logic_error("apply_comp_rows: unreachable");
}

}  // namespace

CompOp CompOp::one_diag(int p, std::shared_ptr<const Eigen::VectorXd> v) {
  CompOp op;
  op.kind = Kind::diag1;
  op.p1 = p;
  op.diag = std::move(v);
  return op;
}
CompOp CompOp::one_dense(int p, std::shared_ptr<const Eigen::MatrixXd> m) {
  CompOp op;
  op.kind = Kind::dense1;
  op.p1 = p;
  op.mat = std::move(m);
  return op;
}
CompOp CompOp::pair_diag(int p, int q, std::shared_ptr<const Eigen::MatrixXd> table) {
  CompOp op;
  op.kind = Kind::diag2;
  op.p1 = p;
  op.p2 = q;
  op.mat = std::move(table);
  return op;
}
CompOp CompOp::pair_dense(int p, int q, std::shared_ptr<const Eigen::MatrixXd> m) {
  CompOp op;
  op.kind = Kind::dense2;
  op.p1 = p;
  op.p2 = q;
  op.mat = std::move(m);
  return op;
}

std::array<long, 3> SopOperator::state_dims() const {
  std::array<long, 3> d;
  for (int c = 0; c < 3; ++c) d[c] = ipow(axis_size(c), n_particles);
  return d;
}

SopState SopOperator::random_state(long rank, std::mt19937_64& rng) const {
  return SopState::random(state_dims(), rank, rng);
}

std::pair<double, double> ProblemSpec::s_range() const {
  if (s_min > 0.0 && s_max > s_min) return {s_min, s_max};
  return default_s_range(grid.L, grid.delta);
}

SopOperator assemble(const ProblemSpec& spec) {
  if (spec.n_electrons < 1) throw std::invalid_argument("assemble: need n_electrons >= 1");
  if (spec.dims < 1 || spec.dims > 3) throw std::invalid_argument("assemble: dims in 1..3");
  if (spec.ext == ProblemSpec::Ext::harmonic && !(spec.omega > 0))
    throw std::invalid_argument("assemble: harmonic omega must be > 0");
  if (spec.ext == ProblemSpec::Ext::coulomb_nuclei && spec.nuclei.empty())
    throw std::invalid_argument("assemble: coulomb_nuclei needs at least one nucleus");

  SopOperator op;
  op.n_particles = spec.n_electrons;
  op.dims = spec.dims;
  op.grid = spec.grid;
  const int N = spec.n_electrons;
  const auto [smin, smax] = spec.s_range();

  // Kinetic: one dense single-coordinate term per particle per component.
  auto kin = std::make_shared<Eigen::MatrixXd>(
      spec.kinetic == ProblemSpec::Kinetic::sinc ? kinetic_sinc(spec.grid)
                                                 : kinetic_fourier(spec.grid));
  for (int i = 0; i < N; ++i)
    for (int d = 0; d < spec.dims; ++d) {
      SopTerm t;
      t.comp[d] = CompOp::one_dense(i, kin);
      op.terms.push_back(std::move(t));
    }

  // External potential.
  if (spec.ext == ProblemSpec::Ext::harmonic) {
    auto x2 = std::make_shared<Eigen::VectorXd>(spec.grid.L);
    for (int k = 0; k < spec.grid.L; ++k) {
      const double x = spec.grid.point(k);
      (*x2)[k] = 0.5 * spec.omega * spec.omega * x * x;
    }
    for (int i = 0; i < N; ++i)
      for (int d = 0; d < spec.dims; ++d) {
        SopTerm t;
        t.comp[d] = CompOp::one_diag(i, x2);
        op.terms.push_back(std::move(t));
      }
  } else if (spec.ext == ProblemSpec::Ext::coulomb_nuclei) {
    const auto& dec = decompose_kernel_cached(KernelSpec::coulomb(),
                                              spec.lambda_ze_effective(), smin, smax);
    // Per-component gamma factors are cached by nuclear center coordinate.
    std::map<double, NuclearGammaSet> cache;
    auto factors_for = [&](double center) -> const NuclearGammaSet& {
      auto it = cache.find(center);
      if (it == cache.end()) {
        NuclearGammaSet set = spec.gamma_mode == GammaMode::diagonal_dvr
                                  ? nuclear_gamma_diagonal_dvr(dec, spec.grid, center)
                                  : nuclear_gamma_exact_sinc(dec, spec.grid, center);
        it = cache.emplace(center, std::move(set)).first;
      }
      return it->second;
    };
    for (const auto& nuc : spec.nuclei) {
      for (int i = 0; i < N; ++i) {
        for (int l = 0; l < dec.size(); ++l) {
          SopTerm t;
          t.weight = -nuc.Z * dec.weights[l];
          for (int d = 0; d < spec.dims; ++d) {
            const auto& set = factors_for(nuc.pos[d]);
            if (set.mode == GammaMode::diagonal_dvr)
              t.comp[d] = CompOp::one_diag(
                  i, std::make_shared<Eigen::VectorXd>(set.diags[l]));
            else
              t.comp[d] = CompOp::one_dense(
                  i, std::make_shared<Eigen::MatrixXd>(set.mats[l]));
          }
          op.terms.push_back(std::move(t));
        }
      }
    }
  }

  // Pair repulsion as the gamma-product sum; factors are shared across
  // pairs and components.
  if (spec.vee != ProblemSpec::Vee::none && N >= 2) {
    const KernelSpec kern = spec.vee == ProblemSpec::Vee::coulomb
                                ? KernelSpec::coulomb()
                                : KernelSpec::yukawa(spec.yukawa_gamma);
    const auto& dec = decompose_kernel_cached(kern, spec.lambda_ee, smin, smax);
    std::vector<std::shared_ptr<const Eigen::MatrixXd>> gam(dec.size());
    if (spec.gamma_mode == GammaMode::diagonal_dvr) {
      PairGammaSet set = gamma_diagonal_dvr(dec, spec.grid, spec.grid);
      for (int l = 0; l < dec.size(); ++l)
        gam[l] = std::make_shared<Eigen::MatrixXd>(std::move(set.tables[l]));
    } else {
      PairGammaSet set = gamma_exact_sinc(dec, spec.grid, spec.grid);
      for (int l = 0; l < dec.size(); ++l)
        gam[l] = std::make_shared<Eigen::MatrixXd>(std::move(set.mats[l]));
    }
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j)
        for (int l = 0; l < dec.size(); ++l) {
          SopTerm t;
          t.weight = dec.weights[l];
          for (int d = 0; d < spec.dims; ++d)
            t.comp[d] = spec.gamma_mode == GammaMode::diagonal_dvr
                            ? CompOp::pair_diag(i, j, gam[l])
                            : CompOp::pair_dense(i, j, gam[l]);
          op.terms.push_back(std::move(t));
        }
  }
  return op;
}

SopState apply(const SopOperator& op, const SopState& psi) {
  if (psi.dims() != op.state_dims())
    throw std::invalid_argument("apply: state dimensions do not match the operator");
  const long rank = psi.rank();
  const long n_terms = long(op.terms.size());
  SopState out = SopState::zeros(op.state_dims(), n_terms * rank);
  for (long t = 0; t < n_terms; ++t) {
    const SopTerm& term = op.terms[t];
    for (int d = 0; d < 3; ++d) {
      RowMat rows = apply_comp_rows(term.comp[d], psi.f[d], op.axis_size(d),
                                    op.n_particles);
      if (d == 0) rows *= term.weight;
      out.f[d].middleRows(t * rank, rank) = rows;
    }
  }
  return out;
}

DenseHamiltonian::DenseHamiltonian(const SopOperator& op) : op_(op) {
  const auto d = op.state_dims();
  dim_ = d[0] * d[1] * d[2];
}

Eigen::VectorXd DenseHamiltonian::matvec(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("DenseHamiltonian: length mismatch");
  const auto dims = op_.state_dims();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
  Eigen::VectorXd buf;
  for (const auto& term : op_.terms) {
    buf = x;
    for (int d = 0; d < 3; ++d) {
      const CompOp& c = term.comp[d];
      if (c.kind == CompOp::Kind::identity) continue;
      const long L = op_.axis_size(d);
      const long pre = d == 0 ? 1 : (d == 1 ? dims[0] : dims[0] * dims[1]);
      const long post = d == 2 ? 1 : (d == 1 ? dims[2] : dims[1] * dims[2]);
      // View buf as (pre, M_d, post); the transposed slabs have rows in
      // exactly the factor-row layout, so the SOP kernels apply directly.
      Eigen::VectorXd next(buf.size());
      for (long p = 0; p < pre; ++p) {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> slab(
            dims[d], post);
        for (long m = 0; m < dims[d]; ++m)
          slab.row(m) = buf.segment((p * dims[d] + m) * post, post);
        RowMat tmp = slab.transpose();
        tmp = apply_comp_rows(c, tmp, L, op_.n_particles);
        slab = tmp.transpose();
        for (long m = 0; m < dims[d]; ++m)
          next.segment((p * dims[d] + m) * post, post) = slab.row(m);
      }
      buf.swap(next);
    }
    out += term.weight * buf;
  }
  return out;
}

Eigen::MatrixXd DenseHamiltonian::materialize(long max_dim) const {
  if (dim_ > max_dim)
    throw std::runtime_error("DenseHamiltonian: dimension exceeds the dense budget");
  Eigen::MatrixXd h(dim_, dim_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
  for (long j = 0; j < dim_; ++j) {
    e[j] = 1.0;
    h.col(j) = matvec(e);
    e[j] = 0.0;
  }
  return 0.5 * (h + h.transpose());
}

DenseHamiltonian build_dense(const ProblemSpec& spec) {
  return DenseHamiltonian(assemble(spec));
}

}  // namespace ccs
