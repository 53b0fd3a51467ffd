// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/sop_state.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ccs {

namespace {

void check_dims(const SopState& a, const SopState& b, const char* who) {
  if (a.dims() != b.dims()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

/// Hadamard product of the Gram matrices of all components except `skip`
/// (skip = -1 keeps all three).
Eigen::MatrixXd gram_hadamard(const SopState& a, const SopState& b, int skip) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(a.rank(), b.rank());
  for (int d = 0; d < 3; ++d) {
    if (d == skip) continue;
    g = g.cwiseProduct((a.f[d] * b.f[d].transpose()).eval());
  }
  return g;
}

}  // namespace

SopState SopState::zeros(const std::array<long, 3>& dims, long rank) {
  SopState s;
  for (int d = 0; d < 3; ++d) s.f[d] = Factor::Zero(rank, dims[d]);
  return s;
}

SopState SopState::random(const std::array<long, 3>& dims, long rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  SopState s;
  for (int d = 0; d < 3; ++d) {
    s.f[d].resize(rank, dims[d]);
    for (long i = 0; i < rank; ++i)
      for (long j = 0; j < dims[d]; ++j) s.f[d](i, j) = gauss(rng);
  }
  return s;
}

Eigen::VectorXd SopState::term_norms() const {
  Eigen::VectorXd n = Eigen::VectorXd::Ones(rank());
  for (int d = 0; d < 3; ++d) n = n.cwiseProduct(f[d].rowwise().norm());
  return n;
}

void SopState::balance_terms() {
  for (long l = 0; l < rank(); ++l) {
    double norms[3], prod = 1.0;
    for (int d = 0; d < 3; ++d) {
      norms[d] = f[d].row(l).norm();
      prod *= norms[d];
    }
    if (prod == 0.0) continue;
    const double target = std::cbrt(prod);
    for (int d = 0; d < 3; ++d) f[d].row(l) *= target / norms[d];
  }
}

double sop_inner(const SopState& a, const SopState& b) {
  check_dims(a, b, "sop_inner");
  return gram_hadamard(a, b, -1).sum();
}

double sop_norm(const SopState& a) { return std::sqrt(std::max(0.0, sop_inner(a, a))); }

SopState axpy(double alpha, const SopState& a, const SopState& b) {
  check_dims(a, b, "axpy");
  SopState out;
  for (int d = 0; d < 3; ++d) {
    out.f[d].resize(a.rank() + b.rank(), a.f[d].cols());
    out.f[d].topRows(a.rank()) = d == 0 ? (alpha * a.f[d]).eval() : a.f[d];
    out.f[d].bottomRows(b.rank()) = b.f[d];
  }
  return out;
}

SopState scaled(double alpha, const SopState& a) {
  SopState out = a;
  out.f[0] *= alpha;
  return out;
}

Eigen::VectorXd densify(const SopState& a, long max_elems) {
  const auto d = a.dims();
  const long n = d[0] * d[1] * d[2];
  if (n > max_elems) throw std::runtime_error("densify: dense size exceeds the budget");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (long l = 0; l < a.rank(); ++l)
    for (long ix = 0; ix < d[0]; ++ix) {
      const double vx = a.f[0](l, ix);
      if (vx == 0.0) continue;
      for (long iy = 0; iy < d[1]; ++iy) {
        const double vxy = vx * a.f[1](l, iy);
        const long base = (ix * d[1] + iy) * d[2];
        for (long iz = 0; iz < d[2]; ++iz) out[base + iz] += vxy * a.f[2](l, iz);
      }
    }
  return out;
}

AlsResult als_reduce(const SopState& a, long target_rank, const AlsOptions& opts) {
  if (target_rank < 1) throw std::invalid_argument("als_reduce: target rank must be >= 1");
  const double norm_a = sop_norm(a);
  AlsResult res;
  if (a.rank() <= target_rank || norm_a == 0.0) {
    res.state = a;
    return res;
  }

  // Initial guess: the target_rank largest-norm terms of `a`.
  Eigen::VectorXd tn = a.term_norms();
  std::vector<long> idx(a.rank());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](long i, long j) { return tn[i] > tn[j]; });
  SopState b;
  const auto dims = a.dims();
  for (int d = 0; d < 3; ++d) {
    b.f[d].resize(target_rank, dims[d]);
    for (long r = 0; r < target_rank; ++r) b.f[d].row(r) = a.f[d].row(idx[r]);
  }
  if (b.term_norms().minCoeff() == 0.0) {
    std::mt19937_64 rng(opts.seed + 0x9e3779b97f4a7c15ull);
    b = SopState::random(dims, target_rank, rng);
  }
  b.balance_terms();

  const double a2 = norm_a * norm_a;
  auto exact_residual = [&]() {
    const double cross = sop_inner(a, b);
    const double b2 = sop_inner(b, b);
    return std::sqrt(std::max(0.0, a2 - 2.0 * cross + b2)) / norm_a;
  };

  double prev = exact_residual();
  res.residual = prev;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (int d = 0; d < 3; ++d) {
      // Normal equations  (had. Gram of others) B_d = (had. cross-Gram) A_d.
      Eigen::MatrixXd g = gram_hadamard(b, b, d);
      Eigen::MatrixXd c = gram_hadamard(b, a, d);
      const double shift = 1e-12 * std::max(g.trace() / double(g.rows()), 1e-300);
      g.diagonal().array() += shift;
      b.f[d] = g.ldlt().solve(c * a.f[d]);
    }
    b.balance_terms();
    ++res.sweeps;
    const double cur = exact_residual();
    res.residual_log.push_back(cur);
    res.residual = cur;
    if (prev - cur < opts.tol * std::max(prev, 1e-300)) break;
    prev = cur;
  }
  res.state = std::move(b);
  return res;
}

void save_sop(std::ostream& os, const SopState& a) {
  std::int64_t hdr[4] = {a.rank(), a.f[0].cols(), a.f[1].cols(), a.f[2].cols()};
  os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  for (int d = 0; d < 3; ++d)
    os.write(reinterpret_cast<const char*>(a.f[d].data()),
             std::streamsize(sizeof(double) * a.f[d].size()));
}

SopState load_sop(std::istream& is) {
  std::int64_t hdr[4];
  is.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  if (!is) throw std::runtime_error("load_sop: truncated header");
  SopState a;
  for (int d = 0; d < 3; ++d) {
    a.f[d].resize(hdr[0], hdr[1 + d]);
    is.read(reinterpret_cast<char*>(a.f[d].data()),
            std::streamsize(sizeof(double) * a.f[d].size()));
  }
  if (!is) throw std::runtime_error("load_sop: truncated factor data");
  return a;
}

}  // namespace ccs
