// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "ccs/grid.hpp"

namespace ccs {

namespace {

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Masked Gram of component d: sums only columns whose digit of particle i
/// equals `sel`.
Eigen::MatrixXd masked_gram(const SopState::Factor& f, long L, int N, int particle,
                            long sel) {
  const long s = ipow(L, N - 1 - particle);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(f.rows(), f.rows());
  for (long m = 0; m < f.cols(); ++m) {
    if ((m / s) % L != sel) continue;
    g.noalias() += f.col(m) * f.col(m).transpose();
  }
  return g;
}

/// Complex factor with the DFT applied along particle i's digit.
Eigen::MatrixXcd momentum_factor(const SopState::Factor& f, const GridSpec& grid, int N,
                                 int particle) {
  const long L = grid.L;
  const long s = ipow(L, N - 1 - particle);
  const long outer = f.cols() / (L * s);
  const Eigen::MatrixXcd F = dft_matrix(grid);
  Eigen::MatrixXcd out(f.rows(), f.cols());
  Eigen::MatrixXcd block(L, s);
  for (long r = 0; r < f.rows(); ++r)
    for (long o = 0; o < outer; ++o) {
      for (long k = 0; k < L; ++k)
        block.row(k) = f.row(r).segment(o * L * s + k * s, s).cast<std::complex<double>>();
      block = (F * block).eval();
      for (long k = 0; k < L; ++k)
        out.row(r).segment(o * L * s + k * s, s) = block.row(k);
    }
  return out;
}

Eigen::MatrixXd masked_gram_c(const Eigen::MatrixXcd& f, long L, int N, int particle,
                              long sel) {
  const long s = ipow(L, N - 1 - particle);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(f.rows(), f.rows());
  for (long m = 0; m < f.cols(); ++m) {
    if ((m / s) % L != sel) continue;
    g.noalias() += f.col(m) * f.col(m).adjoint();
  }
  return g.real();
}

}  // namespace

EdgeDiagnostics edge_probabilities(const SopState& psi, const GridSpec& grid, int N,
                                   int dims) {
  const double norm = sop_norm(psi);
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument("edge_probabilities: state must be normalized");

  EdgeDiagnostics out;
  out.position = Eigen::MatrixXd::Zero(N * dims, 2);
  out.momentum = Eigen::MatrixXd::Zero(N * dims, 2);

  std::array<Eigen::MatrixXd, 3> gram;
  for (int d = 0; d < 3; ++d) gram[d] = psi.f[d] * psi.f[d].transpose();

  const long L = grid.L;
  // Extreme momentum-lattice rows in dft_matrix ordering: j runs from
  // -floor(L/2) (row 0) upward, so the extremes are rows 0 and L-1.
  for (int i = 0; i < N; ++i) {
    for (int d = 0; d < dims; ++d) {
      for (int side = 0; side < 2; ++side) {
        const long sel = side == 0 ? 0 : L - 1;
        Eigen::MatrixXd gsel = masked_gram(psi.f[d], L, N, i, sel);
        double p = 1.0;
        {
          Eigen::MatrixXd acc = gsel;
          for (int e = 0; e < 3; ++e)
            if (e != d) acc = acc.cwiseProduct(gram[e]).eval();
          p = acc.sum();
        }
        out.position(i * dims + d, side) = p;
      }
      const Eigen::MatrixXcd fmom = momentum_factor(psi.f[d], grid, N, i);
      for (int side = 0; side < 2; ++side) {
        const long sel = side == 0 ? 0 : L - 1;
        Eigen::MatrixXd gsel = masked_gram_c(fmom, L, N, i, sel);
        Eigen::MatrixXd acc = gsel;
        for (int e = 0; e < 3; ++e)
          if (e != d) acc = acc.cwiseProduct(gram[e]).eval();
        out.momentum(i * dims + d, side) = acc.sum();
      }
    }
  }
  return out;
}

double purity_defect(const SopState& psi, const std::string& irrep,
                     const IrrepTable& table, const SopOperator& op) {
  std::array<long, 3> axes{op.axis_size(0), op.axis_size(1), op.axis_size(2)};
  SymmetryProjector proj(table, irrep, axes);
  return contamination(psi, proj);
}

namespace {

struct Workspace {
  const SopOperator& op;
  const SolverConfig& cfg;
  std::unique_ptr<SymmetryProjector> projector;
  std::mt19937_64 rng;
  double max_reduction_residual = 0.0;

  explicit Workspace(const SopOperator& o, const SolverConfig& c)
      : op(o), cfg(c), rng(c.seed) {
    if (cfg.irrep) {
      const IrrepTable table = character_table(op.n_particles);
      std::array<long, 3> axes{op.axis_size(0), op.axis_size(1), op.axis_size(2)};
      projector = std::make_unique<SymmetryProjector>(table, *cfg.irrep, axes);
    }
  }

  SopState reduce(const SopState& s, double tol_scale = 1.0) {
    AlsOptions opts;
    opts.tol = cfg.als_tol * tol_scale;
    opts.max_sweeps = cfg.als_max_sweeps;
    opts.seed = rng();
    AlsResult r = als_reduce(s, cfg.rank_cap, opts);
    max_reduction_residual = std::max(max_reduction_residual, r.residual);
    return std::move(r.state);
  }

  SopState project_reduce(const SopState& s) {
    if (!projector) return s;
    return reduce(projector->apply(s));
  }

  SopState random_vector() {
    SopState s = op.random_state(std::min<long>(cfg.rank_cap, 6), rng);
    s = project_reduce(s);
    const double n = sop_norm(s);
    if (n > 0) s = scaled(1.0 / n, s);
    return s;
  }
};

/// Orthogonalize `w` against basis (twice), normalize; empty result on
/// breakdown.
std::optional<SopState> orthonormalize(Workspace& ws, SopState w,
                                       const std::vector<SopState>& basis) {
  const double pre_norm = sop_norm(w);
  if (pre_norm == 0.0) return std::nullopt;
  for (int pass = 0; pass < 2; ++pass) {
    if (!basis.empty()) {
      SopState acc = w;
      for (const auto& b : basis) {
        const double c = sop_inner(b, w);
        if (c != 0.0) acc = axpy(-c, b, acc);
      }
      w = ws.reduce(acc, 0.1);
    }
  }
  const double post = sop_norm(w);
  if (post < ws.cfg.breakdown_tol * std::max(pre_norm, 1.0)) return std::nullopt;
  return scaled(1.0 / post, w);
}

}  // namespace

KrylovOutput solve(const SopOperator& op, const SolverConfig& cfg,
                   const std::vector<SopState>* guess) {
  if (cfg.n_states < 1) throw std::invalid_argument("solve: n_states must be >= 1");
  Workspace ws(op, cfg);
  const int block = cfg.block();

  std::vector<SopState> basis, h_basis;
  Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(0, 0);

  // Initial block.
  std::vector<SopState> current;
  if (guess) {
    for (const auto& g : *guess) {
      SopState v = ws.project_reduce(g);
      if (auto q = orthonormalize(ws, std::move(v), basis)) {
        basis.push_back(std::move(*q));
        current.push_back(basis.back());
      }
    }
  }
  KrylovOutput out;
  while (int(current.size()) < block) {
    SopState v = ws.random_vector();
    if (auto q = orthonormalize(ws, std::move(v), basis)) {
      basis.push_back(std::move(*q));
      current.push_back(basis.back());
    } else {
      ++out.report.breakdown_restarts;
    }
  }

  Eigen::VectorXd prev_ritz;
  const int n_track = cfg.n_states;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const bool project_now =
        ws.projector && cfg.projection_period > 0 && iter % cfg.projection_period == 0;

    // Apply H to the newest block; record projected-matrix columns.
    std::vector<SopState> h_new;
    for (const auto& v : current) h_new.push_back(ws.reduce(apply(op, v)));

    const long old_size = t_mat.rows();
    const long new_size = long(basis.size());
    h_basis.resize(basis.size() - current.size());
    for (auto& h : h_new) h_basis.push_back(std::move(h));

    t_mat.conservativeResize(new_size, new_size);
    for (long j = old_size; j < new_size; ++j)
      for (long i = 0; i < new_size; ++i) {
        const double v = sop_inner(basis[i], h_basis[j]);
        t_mat(i, j) = v;
        if (i < old_size) t_mat(j, i) = v;  // keep symmetric shape
      }
    Eigen::MatrixXd t_sym = 0.5 * (t_mat + t_mat.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_sym);
    const int avail = int(std::min<long>(n_track, es.eigenvalues().size()));
    IterationRow row;
    row.iter = iter;
    row.subspace = int(new_size);
    row.max_reduction_residual = ws.max_reduction_residual;
    for (int i = 0; i < avail; ++i) row.ritz.push_back(es.eigenvalues()[i]);
    out.report.iterations.push_back(row);

    bool all_conv = false;
    if (prev_ritz.size() >= avail && avail == n_track) {
      all_conv = true;
      for (int i = 0; i < avail; ++i)
        if (std::abs(es.eigenvalues()[i] - prev_ritz[i]) >= cfg.conv_tol) all_conv = false;
    }
    prev_ritz = es.eigenvalues().head(avail);
    if (all_conv) {
      out.report.all_converged = true;
      break;
    }
    if (iter + 1 == cfg.max_iters) break;

    // Next block from the H-images of the current one.
    std::vector<SopState> next;
    for (auto it = h_basis.end() - current.size(); it != h_basis.end(); ++it) {
      SopState cand = *it;
      if (project_now && ws.projector) cand = ws.project_reduce(cand);
      if (auto q = orthonormalize(ws, std::move(cand), basis)) {
        basis.push_back(std::move(*q));
        next.push_back(basis.back());
      } else {
        ++out.report.breakdown_restarts;
        SopState r = ws.random_vector();
        if (auto q2 = orthonormalize(ws, std::move(r), basis)) {
          basis.push_back(std::move(*q2));
          next.push_back(basis.back());
        }
      }
      if (int(next.size()) == block) break;
    }
    while (int(next.size()) < block) {
      SopState r = ws.random_vector();
      if (auto q = orthonormalize(ws, std::move(r), basis)) {
        basis.push_back(std::move(*q));
        next.push_back(basis.back());
      } else {
        ++out.report.breakdown_restarts;
        break;
      }
    }
    current = std::move(next);
  }

  // Ritz extraction on the final subspace.
  Eigen::MatrixXd t_sym = 0.5 * (t_mat + t_mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t_sym);
  const int n_out = int(std::min<long>(cfg.n_states, es.eigenvalues().size()));

  const auto& log = out.report.iterations;
  for (int i = 0; i < n_out; ++i) {
    StateResult sr;
    sr.energy = es.eigenvalues()[i];
    if (log.size() >= 2 && int(log[log.size() - 2].ritz.size()) > i)
      sr.delta = sr.energy - log[log.size() - 2].ritz[i];
    sr.converged = std::abs(sr.delta) < cfg.conv_tol && log.size() >= 2;
    sr.irrep = cfg.irrep.value_or("");

    SopState y = scaled(es.eigenvectors()(0, i), basis[0]);
    for (long j = 1; j < long(basis.size()); ++j) {
      y = axpy(es.eigenvectors()(j, i), basis[j], y);
      if (y.rank() > 4 * cfg.rank_cap) y = ws.reduce(y, 0.1);
    }
    y = ws.reduce(y, 0.1);
    const double n = sop_norm(y);
    if (n > 0) y = scaled(1.0 / n, y);
    sr.rank = y.rank();
    if (ws.projector) sr.contamination = contamination(y, *ws.projector);
    out.report.states.push_back(sr);
    out.eigenstates.push_back(std::move(y));
  }
  out.basis = std::move(basis);
  return out;
}

}  // namespace ccs
