// Copyright 2026 The CCS Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ccs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ccs {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;

double kernel_magnitude(const KernelSpec& k, double s) {
  const double r = std::sqrt(s);
  switch (k.kind) {
    case KernelKind::coulomb_repulsion:
      return 1.0 / r;
    case KernelKind::coulomb_attraction:
      return 1.0 / r;  // |K|; the -Z factor lives in operator assembly
    case KernelKind::yukawa:
      return std::exp(-k.yukawa_gamma * r) / r;
  }
  return 0.0;
}

/// Integrand weight of the beta integral at beta = exp(u), substitution
/// Jacobian and 2/sqrt(pi) prefactor folded in:
///   K(s) = int du  g(u) exp(-e^{2u} s),
///   g(u) = (2/sqrt(pi)) e^u        (Coulomb)
///   g(u) = (2/sqrt(pi)) e^u exp(-gamma^2 e^{-2u}/4)   (Yukawa)
double log_trapezoid_weight(const KernelSpec& k, double u) {
  double g = kTwoOverSqrtPi * std::exp(u);
  if (k.kind == KernelKind::yukawa) {
    const double b = std::exp(u);
    g *= std::exp(-k.yukawa_gamma * k.yukawa_gamma / (4.0 * b * b));
  }
  return g;
}

struct Model {
  Eigen::VectorXd log_beta;
  Eigen::VectorXd log_w;
  int size() const { return int(log_beta.size()); }
};

/// Columns T(i,l) = exp(-beta_l^2 s_i) / K(s_i); shared by residual and
/// Jacobian assembly.  Eigen's vectorized exp carries most of the cost.
Eigen::MatrixXd term_matrix(const Model& m, const Eigen::VectorXd& s,
                            const Eigen::VectorXd& kinv) {
  const int n = int(s.size());
  const int L = m.size();
  Eigen::MatrixXd T(n, L);
  for (int l = 0; l < L; ++l) {
    const double b2 = std::exp(2.0 * m.log_beta[l]);
    T.col(l) = ((-b2) * s.array()).exp() * kinv.array();
  }
  return T;
}

/// Relative residuals r_i = model(s_i)/K(s_i) - 1 on a sample grid.
/// kinv holds 1/K(s_i).
Eigen::VectorXd residuals(const Model& m, const Eigen::VectorXd& s,
                          const Eigen::VectorXd& kinv) {
  Eigen::VectorXd w = m.log_w.array().exp().matrix();
  return term_matrix(m, s, kinv) * w - Eigen::VectorXd::Ones(s.size());
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

/// Minimax polish: Lawson-reweighted Levenberg-Marquardt on
/// (log w, log beta).  Steps are accepted on weighted 2-norm decrease;
/// the best iterate by max relative error is tracked and returned.
double minimax_polish(Model& m, const Eigen::VectorXd& s, const Eigen::VectorXd& kinv,
                      int iters) {
  const int n = int(s.size());
  const int L = m.size();
  Eigen::VectorXd lawson = Eigen::VectorXd::Constant(n, 1.0 / n);
  Model best = m;
  double best_err = max_abs(residuals(m, s, kinv));
  double mu = 1e-8;

  Eigen::MatrixXd J(n, 2 * L);
  for (int it = 0; it < iters; ++it) {
    Eigen::MatrixXd T = term_matrix(m, s, kinv);
    Eigen::VectorXd w = m.log_w.array().exp().matrix();
    Eigen::VectorXd r = T * w - Eigen::VectorXd::Ones(n);
    const double err = max_abs(r);
    if (err < best_err) {
      best_err = err;
      best = m;
    }
    lawson = (lawson.array() * (r.cwiseAbs().array() + 1e-3 * err)).matrix();
    lawson /= lawson.sum();

    for (int l = 0; l < L; ++l) {
      const double b2 = std::exp(2.0 * m.log_beta[l]);
      J.col(l) = w[l] * T.col(l);                                    // d r / d log w
      J.col(L + l) = (-2.0 * b2) * s.cwiseProduct(J.col(l));         // d r / d log beta
    }
    Eigen::VectorXd sw = lawson.cwiseSqrt();
    Eigen::MatrixXd Jw = sw.asDiagonal() * J;
    Eigen::VectorXd rw = sw.asDiagonal() * r;
    Eigen::MatrixXd JtJ = Jw.transpose() * Jw;
    Eigen::VectorXd Jtr = Jw.transpose() * rw;
    const double obj = rw.squaredNorm();
    const double diag_scale = JtJ.trace() / (2 * L);

    bool accepted = false;
    for (int tries = 0; tries < 4; ++tries) {
      Eigen::MatrixXd A = JtJ + mu * diag_scale * Eigen::MatrixXd::Identity(2 * L, 2 * L);
      Eigen::VectorXd step = A.ldlt().solve(-Jtr);
      Model trial = m;
      trial.log_w += step.head(L);
      trial.log_beta += step.tail(L);
      const double trial_obj = (sw.asDiagonal() * residuals(trial, s, kinv)).squaredNorm();
      if (trial_obj < obj) {
        m = trial;
        mu = std::max(mu * 0.3, 1e-14);
        accepted = true;
        break;
      }
      mu *= 8.0;
    }
    if (!accepted) {
      // LM stalled; restart the Lawson weights and keep going.
      lawson = Eigen::VectorXd::Constant(n, 1.0 / n);
      mu = 1e-6;
    }
  }

  // Weights-only refinement: exact weighted LS solves with Lawson updates.
  {
    Eigen::MatrixXd B = term_matrix(best, s, kinv);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd lw = Eigen::VectorXd::Constant(n, 1.0 / n);
    Model cur = best;
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd sw = lw.cwiseSqrt();
      Eigen::VectorXd w =
          (sw.asDiagonal() * B).colPivHouseholderQr().solve(sw.asDiagonal() * ones);
      if ((w.array() <= 0.0).any()) break;  // weights must stay positive
      cur.log_w = w.array().log().matrix();
      Eigen::VectorXd r = B * w - ones;
      const double err = max_abs(r);
      if (err < best_err) {
        best_err = err;
        best = cur;
      }
      lw = (lw.array() * (r.cwiseAbs().array() + 1e-3 * err)).matrix();
      lw /= lw.sum();
    }
  }

  m = best;
  return best_err;
}

/// Locate alternating extrema of the residual on the sample grid.
/// Returns indices into `r`, signs alternating, endpoints included.
std::vector<int> alternation_set(const Eigen::VectorXd& r) {
  const int n = int(r.size());
  std::vector<int> ext;
  // local extrema of r (sign carried by the value itself)
  auto push_best = [&](int i) {
    if (!ext.empty() && ((r[ext.back()] > 0) == (r[i] > 0))) {
      if (std::abs(r[i]) > std::abs(r[ext.back()])) ext.back() = i;
    } else {
      ext.push_back(i);
    }
  };
  push_best(0);
  for (int i = 1; i + 1 < n; ++i) {
    const bool is_max = r[i] >= r[i - 1] && r[i] >= r[i + 1];
    const bool is_min = r[i] <= r[i - 1] && r[i] <= r[i + 1];
    if (is_max && r[i] > 0) push_best(i);
    if (is_min && r[i] < 0) push_best(i);
  }
  push_best(n - 1);
  return ext;
}

/// Remez-style Newton iteration on the equioscillation system
///   r(t_k) = sign_k * E,  k = 1..2L+1,
/// with the extrema t_k re-located on the sample grid each round.  The
/// positive-weight Gaussian family is a Chebyshev system on log s, so the
/// minimax solution equioscillates with full alternation; Newton converges
/// quadratically once Lawson has produced a near-alternating start.
double remez_refine(Model& m, const Eigen::VectorXd& s, const Eigen::VectorXd& kinv,
                    int rounds) {
  const int L = m.size();
  const int want = 2 * L + 1;
  Model best = m;
  double best_err = max_abs(residuals(m, s, kinv));

  for (int round = 0; round < rounds; ++round) {
    Eigen::VectorXd r = residuals(m, s, kinv);
    const double err = max_abs(r);
    if (err < best_err) {
      best_err = err;
      best = m;
    }
    std::vector<int> ext = alternation_set(r);
    if (int(ext.size()) > want) {
      // drop smallest-amplitude extrema pairwise to preserve alternation
      while (int(ext.size()) > want) {
        int worst = 0;
        double lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k < int(ext.size()); ++k) {
          if (std::abs(r[ext[k]]) < lo) {
            lo = std::abs(r[ext[k]]);
            worst = k;
          }
        }
        ext.erase(ext.begin() + worst);
        if (worst > 0 && worst < int(ext.size()) &&
            (r[ext[worst - 1]] > 0) == (r[ext[worst]] > 0)) {
          if (std::abs(r[ext[worst - 1]]) < std::abs(r[ext[worst]]))
            ext.erase(ext.begin() + (worst - 1));
          else
            ext.erase(ext.begin() + worst);
        }
      }
    }
    if (int(ext.size()) != want) return best_err;  // defective; caller keeps best

    Eigen::MatrixXd A(want, 2 * L + 1);
    Eigen::VectorXd rhs(want);
    for (int k = 0; k < want; ++k) {
      const int i = ext[k];
      const double sign = r[i] >= 0 ? 1.0 : -1.0;
      for (int l = 0; l < L; ++l) {
        const double b2 = std::exp(2.0 * m.log_beta[l]);
        const double w = std::exp(m.log_w[l]);
        const double t = w * std::exp(-b2 * s[i]) * kinv[i];
        A(k, l) = t;
        A(k, L + l) = -2.0 * b2 * s[i] * t;
      }
      A(k, 2 * L) = -sign;
      rhs(k) = -r[i];  // drive r(t_k) -> sign_k * E with E absorbed in col 2L
    }
    Eigen::VectorXd step = A.colPivHouseholderQr().solve(rhs);

    double alpha = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 6; ++ls) {
      Model trial = m;
      trial.log_w += alpha * step.head(L);
      trial.log_beta += alpha * step.segment(L, L);
      const double trial_err = max_abs(residuals(trial, s, kinv));
      if (trial_err < err) {
        m = trial;
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) break;
  }
  const double err = max_abs(residuals(m, s, kinv));
  if (err < best_err) {
    best_err = err;
    best = m;
  }
  m = best;
  return best_err;
}

void sort_model(Model& m) {
  const int L = m.size();
  std::vector<int> idx(L);
  for (int i = 0; i < L; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return m.log_beta[a] < m.log_beta[b]; });
  Model out;
  out.log_beta.resize(L);
  out.log_w.resize(L);
  for (int i = 0; i < L; ++i) {
    out.log_beta[i] = m.log_beta[idx[i]];
    out.log_w[i] = m.log_w[idx[i]];
  }
  m = out;
}

Model trapezoid_window(const KernelSpec& kern, int lambda, double u_lo, double u_hi) {
  Model m;
  m.log_beta.resize(lambda);
  m.log_w.resize(lambda);
  const double h = lambda > 1 ? (u_hi - u_lo) / (lambda - 1) : 1.0;
  for (int i = 0; i < lambda; ++i) {
    const double u = u_lo + i * h;
    m.log_beta[i] = u;
    m.log_w[i] = std::log(log_trapezoid_weight(kern, u) * h);
  }
  return m;
}

Model insert_node(const Model& m, double u_new, double w_new) {
  Model g;
  const int L = m.size();
  g.log_beta.resize(L + 1);
  g.log_w.resize(L + 1);
  g.log_beta.head(L) = m.log_beta;
  g.log_w.head(L) = m.log_w;
  g.log_beta[L] = u_new;
  g.log_w[L] = std::log(w_new);
  sort_model(g);
  return g;
}

/// Alternating Lawson/Remez rounds with a stall detector.
double adaptive_polish(Model& m, const Eigen::VectorXd& s, const Eigen::VectorXd& kinv,
                       int max_rounds) {
  double err = max_abs(residuals(m, s, kinv));
  int stalls = 0;
  for (int round = 0; round < max_rounds && stalls < 2; ++round) {
    minimax_polish(m, s, kinv, 22);
    const double e2 = remez_refine(m, s, kinv, 40);
    if (e2 > err * 0.98) ++stalls;
    else stalls = 0;
    err = std::min(err, e2);
  }
  return err;
}

Eigen::VectorXd log_space(double lo, double hi, int n) {
  Eigen::VectorXd v(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * i / double(n - 1));
  return v;
}

}  // namespace

double kernel_value(const KernelSpec& kernel, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("kernel_value: s must be > 0");
  const double mag = kernel_magnitude(kernel, s);
  return kernel.kind == KernelKind::coulomb_attraction ? -kernel.Z * mag : mag;
}

double GaussQuadDecomposition::evaluate(double s) const {
  double acc = 0.0;
  for (int l = 0; l < size(); ++l)
    acc += weights[l] * std::exp(-nodes[l] * nodes[l] * s);
  return acc;
}

std::pair<double, double> default_s_range(int L, double delta) {
  const double lo = 0.25 * delta * delta;
  const double hi = 9.0 * double(L - 1) * (L - 1) * delta * delta;
  return {lo, hi};
}

GaussQuadDecomposition decompose_kernel(const KernelSpec& kernel, int lambda_count,
                                        double s_min, double s_max) {
  if (lambda_count < 1)
    throw std::invalid_argument("decompose_kernel: lambda_count must be >= 1");
  if (!(s_min > 0.0) || !(s_min < s_max))
    throw std::invalid_argument("decompose_kernel: need 0 < s_min < s_max");

  const int n_fit = 800;
  Eigen::VectorXd s = log_space(s_min, s_max, n_fit);
  Eigen::VectorXd kinv(n_fit);
  for (int i = 0; i < n_fit; ++i) kinv[i] = 1.0 / kernel_magnitude(kernel, s[i]);

  // Right window end: resolve exp(-beta^2 s_min) down to machine scale.
  const double u_hi_base = 0.5 * std::log(40.0 / s_min);
  // Left end lower bound: Coulomb needs the residual small-beta mass at
  // s_max to vanish; Yukawa is cut off by the exp(-gamma^2/4 beta^2) factor
  // but must still cover the saddle point of the s_max integrand.
  double u_lo_floor;
  if (kernel.kind == KernelKind::yukawa) {
    const double saddle = 0.25 * std::log(kernel.yukawa_gamma * kernel.yukawa_gamma /
                                          (4.0 * s_max));
    u_lo_floor = saddle - 1.5;
  } else {
    u_lo_floor = std::log(1e-16) - 0.5 * std::log(s_max);
  }

  // Seed: scan the truncated uniform-window trapezoid family at a small
  // term count for the best starting window, then polish to the minimax
  // shape.  Nodes are added one at a time afterwards; growing an
  // equioscillating solution tracks the optimal error decay far better
  // than optimizing all lambda nodes from a cold start.  Yukawa integrands
  // decay double-exponentially in both tails, so their trapezoid seeds are
  // already close to optimal and need a larger seed count to put the
  // relative error below O(1) before the additions begin.
  const int lam0 =
      std::min(kernel.kind == KernelKind::yukawa ? 10 : 4, lambda_count);
  Model m;
  {
    double best_err = std::numeric_limits<double>::infinity();
    for (int ih = 0; ih < 10; ++ih) {
      const double u_hi = u_hi_base - 0.3 * ih;
      for (int il = 0; il < 60; ++il) {
        const double u_lo = u_lo_floor + (u_hi - 0.5 - u_lo_floor) * il / 59.0;
        if (u_lo >= u_hi - 0.25) continue;
        Model t = trapezoid_window(kernel, lam0, u_lo, u_hi);
        const double err = max_abs(residuals(t, s, kinv));
        if (err < best_err) {
          best_err = err;
          m = t;
        }
      }
    }
  }
  adaptive_polish(m, s, kinv, 8);

  while (m.size() < lambda_count) {
    const int L = m.size();
    const Model fallback = m;
    const double fb_err = max_abs(residuals(m, s, kinv));
    // Insert two nodes per round once the ladder is established; the polish
    // dominates the cost and handles a pair as easily as a single node.
    const int stride = std::min(L >= 10 ? 2 : 1, lambda_count - L);

    // Insertion candidates: midpoints of the largest log-beta gaps and
    // extensions beyond both ends of the ladder.
    std::vector<std::pair<double, double>> cand;  // (u, w)
    std::vector<std::pair<double, int>> gaps;
    for (int i = 0; i + 1 < L; ++i) gaps.push_back({m.log_beta[i + 1] - m.log_beta[i], i});
    std::sort(gaps.rbegin(), gaps.rend());
    for (int g = 0; g < std::min<int>(3, int(gaps.size())); ++g) {
      const int i = gaps[g].second;
      cand.push_back({0.5 * (m.log_beta[i + 1] + m.log_beta[i]),
                      0.5 * std::sqrt(std::exp(m.log_w[i + 1]) * std::exp(m.log_w[i]))});
    }
    const double h_hi = L > 1 ? m.log_beta[L - 1] - m.log_beta[L - 2] : 0.5;
    cand.push_back({m.log_beta[L - 1] + 0.7 * h_hi, std::exp(m.log_w[L - 1]) * 0.5});
    const double h_lo = L > 1 ? m.log_beta[1] - m.log_beta[0] : 0.5;
    cand.push_back({m.log_beta[0] - 0.7 * h_lo, std::exp(m.log_w[0]) * 0.3});

    // Pre-rank single insertions cheaply, then fully polish the best
    // stride-sized combination.
    std::vector<std::pair<double, int>> rank;
    for (int c = 0; c < int(cand.size()); ++c) {
      Model t = insert_node(m, cand[c].first, cand[c].second);
      rank.push_back({minimax_polish(t, s, kinv, 8), c});
    }
    std::sort(rank.begin(), rank.end());

    Model best = m;
    for (int k = 0; k < stride; ++k)
      best = insert_node(best, cand[rank[k].second].first, cand[rank[k].second].second);
    double best_err = adaptive_polish(best, s, kinv, 5);
    if (int(rank.size()) > stride && best_err > 0.66 * fb_err) {
      Model second = m;
      for (int k = 0; k < stride; ++k) {
        const int c = rank[std::min<int>(k + 1, int(rank.size()) - 1)].second;
        second = insert_node(second, cand[c].first, cand[c].second);
      }
      const double e2 = adaptive_polish(second, s, kinv, 5);
      if (e2 < best_err) {
        best_err = e2;
        best = second;
      }
    }

    if (best_err < fb_err) {
      m = best;
    } else {
      // No candidate improved; keep the previous solution and park the new
      // nodes with negligible weight so the error stays monotone in lambda.
      m = fallback;
      for (int k = 0; k < stride; ++k) {
        const int gi = gaps.empty() ? 0 : gaps[std::min<int>(k, int(gaps.size()) - 1)].second;
        const double u_mid = gaps.empty() ? m.log_beta[0] + 0.31 * (k + 1)
                                          : 0.5 * (m.log_beta[gi + 1] + m.log_beta[gi]);
        m = insert_node(m, u_mid, std::exp(fallback.log_w[0]) * 1e-10);
      }
    }
  }
  adaptive_polish(m, s, kinv, 10);
  sort_model(m);

  // Record the achieved error on a denser verification sample.
  Eigen::VectorXd sv = log_space(s_min, s_max, 4001);
  Eigen::VectorXd kv(sv.size());
  for (int i = 0; i < sv.size(); ++i) kv[i] = 1.0 / kernel_magnitude(kernel, sv[i]);
  const double err = max_abs(residuals(m, sv, kv));

  GaussQuadDecomposition out;
  out.kernel = kernel;
  out.nodes = m.log_beta.array().exp().matrix();
  out.weights = m.log_w.array().exp().matrix();
  out.s_min = s_min;
  out.s_max = s_max;
  out.achieved_error = err;
  return out;
}

const GaussQuadDecomposition& decompose_kernel_cached(const KernelSpec& kernel,
                                                      int lambda_count, double s_min,
                                                      double s_max) {
  struct Key {
    int kind;
    double gamma;
    int lambda;
    double s_min, s_max;
    bool operator<(const Key& o) const {
      return std::tie(kind, gamma, lambda, s_min, s_max) <
             std::tie(o.kind, o.gamma, o.lambda, o.s_min, o.s_max);
    }
  };
  static std::mutex mu;
  static std::map<Key, std::unique_ptr<GaussQuadDecomposition>> cache;
  const Key key{int(kernel.kind), kernel.kind == KernelKind::yukawa ? kernel.yukawa_gamma : 0.0,
                lambda_count, s_min, s_max};
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto fresh = std::make_unique<GaussQuadDecomposition>(
      decompose_kernel(kernel, lambda_count, s_min, s_max));
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(fresh));
  return *it->second;
}

void write_decomposition(std::ostream& os, const GaussQuadDecomposition& d) {
  const char* kind = d.kernel.kind == KernelKind::coulomb_repulsion ? "coulomb_repulsion"
                     : d.kernel.kind == KernelKind::coulomb_attraction
                         ? "coulomb_attraction"
                         : "yukawa";
  os.precision(17);
  os << "# kind " << kind << "\n";
  os << "# lambda " << d.size() << "\n";
  os << "# s_range " << d.s_min << " " << d.s_max << "\n";
  os << "# error " << d.achieved_error << "\n";
  os << "# yukawa_gamma " << d.kernel.yukawa_gamma << "\n";
  os << "# Z " << d.kernel.Z << "\n";
  for (int l = 0; l < d.size(); ++l) os << d.nodes[l] << " " << d.weights[l] << "\n";
}

GaussQuadDecomposition read_decomposition(std::istream& is) {
  GaussQuadDecomposition d;
  std::string line;
  std::vector<double> nodes, weights;
  int lambda = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    if (line[0] == '#') {
      std::string hash, key;
      ss >> hash >> key;
      if (key == "kind") {
        std::string v;
        ss >> v;
        if (v == "coulomb_repulsion") d.kernel.kind = KernelKind::coulomb_repulsion;
        else if (v == "coulomb_attraction") d.kernel.kind = KernelKind::coulomb_attraction;
        else if (v == "yukawa") d.kernel.kind = KernelKind::yukawa;
        else throw std::runtime_error("read_decomposition: unknown kind " + v);
      } else if (key == "lambda") ss >> lambda;
      else if (key == "s_range") ss >> d.s_min >> d.s_max;
      else if (key == "error") ss >> d.achieved_error;
      else if (key == "yukawa_gamma") ss >> d.kernel.yukawa_gamma;
      else if (key == "Z") ss >> d.kernel.Z;
    } else {
      double b, w;
      if (ss >> b >> w) {
        nodes.push_back(b);
        weights.push_back(w);
      }
    }
  }
  if (lambda >= 0 && lambda != int(nodes.size()))
    throw std::runtime_error("read_decomposition: node count does not match header");
  d.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), long(nodes.size()));
  d.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), long(weights.size()));
  return d;
}

}  // namespace ccs
