// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/gamma.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace ccs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
using cd = std::complex<double>;

/// Box-overlap integral J_d(k) = int_{I(k)} exp(i p delta d) dp over
/// I(k) = [-pi/delta, pi/delta - k], for k in [0, 2 pi / delta].
cd box_overlap(double delta, int d, double k) {
  const double p_hi = kPi / delta - k;
  const double p_lo = -kPi / delta;
  if (p_hi <= p_lo) return 0.0;
  if (d == 0) return p_hi - p_lo;
  const double a = delta * d;
  return (std::polar(1.0, p_hi * a) - std::polar(1.0, p_lo * a)) / cd(0.0, a);
}

int gl_nodes_for(double cycles) { return 48 + int(std::ceil(2.5 * cycles)); }

struct GlRule {
  Eigen::VectorXd x, w;
};

GlRule gl_on(double a, double b, int n) {
  GlRule r;
  gauss_legendre(n, r.x, r.w);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  r.x = (r.x.array() * half + mid).matrix();
  r.w *= half;
  return r;
}

}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess, Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

PairGammaSet gamma_diagonal_dvr(const GaussQuadDecomposition& decomp,
                                const GridSpec& grid_a, const GridSpec& grid_b) {
  PairGammaSet out;
  out.mode = GammaMode::diagonal_dvr;
  out.grid_a = grid_a;
  out.grid_b = grid_b;
  out.weights = decomp.weights;
  out.tables.reserve(decomp.size());
  for (int l = 0; l < decomp.size(); ++l) {
    const double b2 = decomp.nodes[l] * decomp.nodes[l];
    Eigen::MatrixXd t(grid_a.L, grid_b.L);
    for (int ka = 0; ka < grid_a.L; ++ka)
      for (int kb = 0; kb < grid_b.L; ++kb) {
        const double d = grid_a.point(ka) - grid_b.point(kb);
        t(ka, kb) = std::exp(-b2 * d * d);
      }
    out.tables.push_back(std::move(t));
  }
  return out;
}

double exact_pair_element(double beta, const GridSpec& grid_a, const GridSpec& grid_b,
                          int n, int np, int m, int mp) {
  if (beta == 0.0) return (n == m && np == mp) ? 1.0 : 0.0;
  const double k_cap = std::min(2.0 * kPi / grid_a.delta, 2.0 * kPi / grid_b.delta);
  const double k_max = std::min(k_cap, 13.0 * beta);
  const double xoff = grid_a.point(m) - grid_b.point(mp);
  const double osc = std::abs(xoff) + grid_a.delta * std::abs(m - n) +
                     grid_b.delta * std::abs(mp - np);
  const GlRule gl = gl_on(0.0, k_max, gl_nodes_for(osc * k_max / (2.0 * kPi)));
  double acc = 0.0;
  for (int q = 0; q < gl.x.size(); ++q) {
    const double k = gl.x[q];
    const cd f = std::polar(1.0, k * xoff) * box_overlap(grid_a.delta, m - n, k) *
                 std::conj(box_overlap(grid_b.delta, mp - np, k));
    acc += gl.w[q] * std::exp(-k * k / (4.0 * beta * beta)) * f.real();
  }
  return acc * grid_a.delta * grid_b.delta / (4.0 * kPi * kPi * beta * kSqrtPi);
}

double exact_nuclear_element(double beta, const GridSpec& grid, double center, int n,
                             int m) {
  if (beta == 0.0) return n == m ? 1.0 : 0.0;
  const double k_cap = 2.0 * kPi / grid.delta;
  const double k_max = std::min(k_cap, 13.0 * beta);
  const double xoff = grid.point(m) - center;
  const double osc = std::abs(xoff) + grid.delta * std::abs(m - n);
  const GlRule gl = gl_on(0.0, k_max, gl_nodes_for(osc * k_max / (2.0 * kPi)));
  double acc = 0.0;
  for (int q = 0; q < gl.x.size(); ++q) {
    const double k = gl.x[q];
    const cd f = std::polar(1.0, k * xoff) * box_overlap(grid.delta, m - n, k);
    acc += gl.w[q] * std::exp(-k * k / (4.0 * beta * beta)) * f.real();
  }
  return acc * grid.delta / (2.0 * kPi * beta * kSqrtPi);
}

PairGammaSet gamma_exact_sinc(const GaussQuadDecomposition& decomp,
                              const GridSpec& grid_a, const GridSpec& grid_b,
                              std::size_t memory_budget_bytes) {
  const long dim = long(grid_a.L) * grid_b.L;
  const std::size_t need = std::size_t(decomp.size()) * dim * dim * sizeof(double);
  if (need > memory_budget_bytes)
    throw std::runtime_error("gamma_exact_sinc: matrices exceed the memory budget");

  PairGammaSet out;
  out.mode = GammaMode::exact_sinc;
  out.grid_a = grid_a;
  out.grid_b = grid_b;
  out.weights = decomp.weights;
  out.mats.reserve(decomp.size());

  const bool same = grid_a == grid_b;
  const int L = grid_a.L;

  for (int l = 0; l < decomp.size(); ++l) {
    const double beta = decomp.nodes[l];
    Eigen::MatrixXd g(dim, dim);
    if (same) {
      // Entries depend only on (m-n, mp-np, m-mp): build the difference
      // table once and scatter.  Shared per-k box integrals J_d carry the
      // quadrature cost.
      const double k_max = std::min(2.0 * kPi / grid_a.delta, 13.0 * beta);
      const double osc_max = 3.0 * (L - 1) * grid_a.delta;
      const GlRule gl = gl_on(0.0, k_max, gl_nodes_for(osc_max * k_max / (2.0 * kPi)));
      const int nq = int(gl.x.size());
      Eigen::MatrixXcd J(2 * L - 1, nq);  // J(d + L - 1, q)
      Eigen::VectorXd gw(nq);
      for (int q = 0; q < nq; ++q) {
        const double k = gl.x[q];
        gw[q] = gl.w[q] * std::exp(-k * k / (4.0 * beta * beta));
        for (int d = -(L - 1); d <= L - 1; ++d)
          J(d + L - 1, q) = box_overlap(grid_a.delta, d, k);
      }
      const double pref =
          grid_a.delta * grid_a.delta / (4.0 * kPi * kPi * beta * kSqrtPi);
      std::vector<double> table(std::size_t(2 * L - 1) * (2 * L - 1) * (2 * L - 1));
      auto tref = [&](int da, int db, int dm) -> double& {
        return table[(std::size_t(da + L - 1) * (2 * L - 1) + (db + L - 1)) *
                         (2 * L - 1) +
                     (dm + L - 1)];
      };
      for (int da = -(L - 1); da <= L - 1; ++da) {
        for (int db = -(L - 1); db <= L - 1; ++db) {
          for (int dm = -(L - 1); dm <= L - 1; ++dm) {
            double acc = 0.0;
            const double xoff = grid_a.delta * dm;
            for (int q = 0; q < nq; ++q) {
              const cd f = std::polar(1.0, gl.x[q] * xoff) * J(da + L - 1, q) *
                           std::conj(J(db + L - 1, q));
              acc += gw[q] * f.real();
            }
            tref(da, db, dm) = pref * acc;
          }
        }
      }
      for (int n = 0; n < L; ++n)
        for (int np = 0; np < L; ++np)
          for (int m = 0; m < L; ++m)
            for (int mp = 0; mp < L; ++mp)
              g(n * L + np, m * L + mp) = tref(m - n, mp - np, m - mp);
    } else {
      for (int n = 0; n < grid_a.L; ++n)
        for (int np = 0; np < grid_b.L; ++np)
          for (int m = 0; m < grid_a.L; ++m)
            for (int mp = 0; mp < grid_b.L; ++mp)
              g(n * grid_b.L + np, m * grid_b.L + mp) =
                  exact_pair_element(beta, grid_a, grid_b, n, np, m, mp);
    }
    // Symmetrize; quadrature noise breaks exact symmetry at ~1e-15.
    g = 0.5 * (g + g.transpose()).eval();
    out.mats.push_back(std::move(g));
  }
  return out;
}

NuclearGammaSet nuclear_gamma_diagonal_dvr(const GaussQuadDecomposition& decomp,
                                           const GridSpec& grid, double center) {
  NuclearGammaSet out;
  out.mode = GammaMode::diagonal_dvr;
  out.grid = grid;
  out.center = center;
  out.weights = decomp.weights;
  for (int l = 0; l < decomp.size(); ++l) {
    const double b2 = decomp.nodes[l] * decomp.nodes[l];
    Eigen::VectorXd v(grid.L);
    for (int k = 0; k < grid.L; ++k) {
      const double d = grid.point(k) - center;
      v[k] = std::exp(-b2 * d * d);
    }
    out.diags.push_back(std::move(v));
  }
  return out;
}

NuclearGammaSet nuclear_gamma_exact_sinc(const GaussQuadDecomposition& decomp,
                                         const GridSpec& grid, double center) {
  NuclearGammaSet out;
  out.mode = GammaMode::exact_sinc;
  out.grid = grid;
  out.center = center;
  out.weights = decomp.weights;
  for (int l = 0; l < decomp.size(); ++l) {
    const double beta = decomp.nodes[l];
    Eigen::MatrixXd g(grid.L, grid.L);
    for (int n = 0; n < grid.L; ++n)
      for (int m = n; m < grid.L; ++m) {
        g(n, m) = exact_nuclear_element(beta, grid, center, n, m);
        g(m, n) = g(n, m);
      }
    out.mats.push_back(std::move(g));
  }
  return out;
}

}  // namespace ccs
