// Copyright 2026 The clusterprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clusterprep/errors.hpp"
#include "clusterprep/pauli.hpp"

namespace clusterprep {

/// Ascending eigenvalues with column-orthonormal eigenvectors.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;

  std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
};

namespace detail {

/// Implicit-shift QL on a real symmetric tridiagonal matrix with diagonal `d`
/// and subdiagonal `e` (e[i] couples i and i+1; e[n-1] is scratch). On return
/// `d` holds the eigenvalues in no particular order and, when `z` is given,
/// its columns are rotated by the accumulated transformation.
inline void tridiagonal_ql(Eigen::VectorXd &d, Eigen::VectorXd &e, Eigen::MatrixXd *z, int max_sweeps = 60) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return;
  e(n - 1) = 0.0;
  for (int l = 0; l < n; ++l) {
    int iterations = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iterations++ == max_sweeps) {
          throw NumericalError("tridiagonal QL did not converge after " + std::to_string(max_sweeps) + " sweeps");
        }
        double g = (d(l + 1) - d(l)) / (2.0 * e(l));
        double r = std::hypot(g, 1.0);
        g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e(i);
          const double b = c * e(i);
          r = std::hypot(f, g);
          e(i + 1) = r;
          if (r == 0.0) {
            d(i + 1) -= p;
            e(m) = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + 2.0 * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
          if (z != nullptr) {
            for (int k = 0; k < z->rows(); ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0.0;
      }
    } while (m != l);
  }
}

/// Reduces Hermitian `a` in place to tridiagonal form a = q t q^H with
/// Householder reflections; `q` receives the accumulated unitary.
inline void householder_tridiagonalize(Eigen::MatrixXcd &a, Eigen::MatrixXcd &q) {
  const Eigen::Index n = a.rows();
  q = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index m = n - k - 1;
    Eigen::VectorXcd x = a.col(k).tail(m);
    if (x.tail(m - 1).squaredNorm() == 0.0) continue;
    const double xnorm = x.norm();
    const cd phase = std::abs(x(0)) == 0.0 ? cd(1.0) : x(0) / std::abs(x(0));
    const cd alpha = -phase * xnorm;
    Eigen::VectorXcd v = x;
    v(0) -= alpha;
    const double tau = 2.0 / v.squaredNorm();

    auto block = a.bottomRightCorner(m, m);
    const Eigen::VectorXcd p = tau * (block * v);
    const cd half_k = 0.5 * tau * v.dot(p);
    const Eigen::VectorXcd w = p - half_k * v;
    block.noalias() -= v * w.adjoint();
    block.noalias() -= w * v.adjoint();

    a.col(k).tail(m).setZero();
    a(k + 1, k) = alpha;
    a.row(k).tail(m) = a.col(k).tail(m).adjoint();

    auto qr = q.rightCols(m);
    const Eigen::VectorXcd qv = qr * v;
    qr.noalias() -= tau * qv * v.adjoint();
  }
}

}  // namespace detail

/// Threshold for "first nonzero component" when fixing eigenvector phases.
inline constexpr double kPhaseComponentFloor = 1e-8;

/// Full eigendecomposition of a Hermitian matrix. Eigenvalues ascend; ties keep
/// the order produced by the QL sweep, and each eigenvector is rotated so its
/// first component above kPhaseComponentFloor is real and positive.
inline Spectrum eigh(const Eigen::MatrixXcd &h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eigh: matrix is not square");
  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, max_abs(h));
  if (hermiticity_residual(h) > 1e-10 * scale) throw std::invalid_argument("eigh: matrix is not Hermitian");
  Spectrum out;
  if (n == 0) return out;

  Eigen::MatrixXcd a = h;
  Eigen::MatrixXcd q;
  detail::householder_tridiagonalize(a, q);

  // Unitary diagonal similarity that makes the subdiagonal real and non-negative.
  Eigen::VectorXcd phases(n);
  Eigen::VectorXd diag(n), sub = Eigen::VectorXd::Zero(n);
  phases(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diag(i) = a(i, i).real();
    if (i + 1 < n) {
      const cd off = a(i + 1, i);
      const double r = std::abs(off);
      sub(i) = r;
      phases(i + 1) = r == 0.0 ? phases(i) : phases(i) * off / r;
    }
  }

  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
  detail::tridiagonal_ql(diag, sub, &z, 30 + 4 * static_cast<int>(n));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return diag(x) < diag(y); });

  const Eigen::MatrixXcd qd = q * phases.asDiagonal();
  const Eigen::MatrixXcd vectors = qd * z.cast<cd>();
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.eigenvalues(c) = diag(order[c]);
    Eigen::VectorXcd v = vectors.col(order[c]);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(v(r)) > kPhaseComponentFloor) {
        v *= std::conj(v(r)) / std::abs(v(r));
        break;
      }
    }
    out.eigenvectors.col(c) = v;
  }
  return out;
}

/// V diag(exp(s * lambda)) V^H for a precomputed spectrum.
inline Eigen::MatrixXcd expm_scaled(const Spectrum &spectrum, cd s) {
  Eigen::VectorXcd weights(spectrum.eigenvalues.size());
  for (Eigen::Index k = 0; k < weights.size(); ++k) weights(k) = std::exp(s * spectrum.eigenvalues(k));
  return spectrum.eigenvectors * weights.asDiagonal() * spectrum.eigenvectors.adjoint();
}

/// exp(s H) for Hermitian H and real or imaginary s.
inline Eigen::MatrixXcd expm_scaled(const Eigen::MatrixXcd &h, cd s) { return expm_scaled(eigh(h), s); }

/// Applies a Hermitian operator: out = H in.
using MatVec = std::function<void(std::span<const cd>, std::span<cd>)>;

struct LanczosOptions {
  int max_iterations = 600;
  /// Ritz residual target, relative to max(1, |largest Ritz value|).
  double residual_tol = 1e-10;
  int max_restarts = 8;
  int check_every = 4;
};

namespace detail {

inline Eigen::VectorXcd random_unit_vector(std::size_t dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  for (auto &x : v) x = cd(gauss(rng), gauss(rng));
  return v / v.norm();
}

inline void orthogonalize(Eigen::VectorXcd &w, const std::vector<Eigen::VectorXcd> &basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto &b : basis) w -= b.dot(w) * b;
  }
}

struct RitzPair {
  double value;
  Eigen::VectorXcd vector;
};

/// Lowest eigenpair of H restricted to the orthogonal complement of `locked`.
inline RitzPair lowest_in_complement(const MatVec &matvec, std::size_t dim, const std::vector<Eigen::VectorXcd> &locked,
                                     std::mt19937_64 &rng, const LanczosOptions &opt) {
  const std::size_t available = dim - locked.size();
  Eigen::VectorXcd start;
  for (int attempt = 0;; ++attempt) {
    if (attempt > opt.max_restarts) throw NumericalError("lanczos: could not draw a start vector");
    start = random_unit_vector(dim, rng);
    orthogonalize(start, locked);
    const double norm = start.norm();
    if (norm > 1e-8) {
      start /= norm;
      break;
    }
  }

  std::vector<Eigen::VectorXcd> basis{start};
  std::vector<double> alpha, beta;
  Eigen::VectorXcd w(static_cast<Eigen::Index>(dim));
  double scale = 1.0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Eigen::VectorXcd &qj = basis.back();
    matvec(std::span<const cd>(qj.data(), dim), std::span<cd>(w.data(), dim));
    alpha.push_back(qj.dot(w).real());
    orthogonalize(w, locked);
    orthogonalize(w, basis);
    const double b = w.norm();
    const std::size_t m = alpha.size();

    const bool exhausted = m == available;
    const bool invariant = b <= 1e-12 * scale;
    if (exhausted || invariant || static_cast<int>(m) % opt.check_every == 0 || it + 1 == opt.max_iterations) {
      Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(m));
      Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i + 1 < m; ++i) e(static_cast<Eigen::Index>(i)) = beta[i];
      Eigen::MatrixXd z = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      tridiagonal_ql(d, e, &z);
      Eigen::Index lowest;
      d.minCoeff(&lowest);
      scale = std::max(scale, d.cwiseAbs().maxCoeff());
      const double residual = b * std::abs(z(static_cast<Eigen::Index>(m) - 1, lowest));
      if (exhausted || invariant || residual <= opt.residual_tol * scale) {
        Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < m; ++i) ritz += z(static_cast<Eigen::Index>(i), lowest) * basis[i];
        orthogonalize(ritz, locked);
        ritz /= ritz.norm();
        return {d(lowest), std::move(ritz)};
      }
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw NumericalError("lanczos: no convergence within " + std::to_string(opt.max_iterations) + " iterations");
}

}  // namespace detail

/// Lowest `k` eigenvalues (ascending, with multiplicity) of the Hermitian
/// operator realized by `matvec`. Each eigenpair comes from a fully
/// reorthogonalized Lanczos run on the complement of the pairs already locked,
/// so degenerate levels are resolved.
inline std::vector<double> lanczos_lowest(const MatVec &matvec, std::size_t dim, std::size_t k, std::uint64_t seed,
                                          const LanczosOptions &options = {}) {
  if (k == 0 || k > dim) throw std::invalid_argument("lanczos: k must be in [1, dim]");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXcd> locked;
  std::vector<double> values;
  for (std::size_t i = 0; i < k; ++i) {
    auto pair = detail::lowest_in_complement(matvec, dim, locked, rng, options);
    values.push_back(pair.value);
    locked.push_back(std::move(pair.vector));
  }
  std::sort(values.begin(), values.end());
  return values;
}

/// Lanczos on a Pauli sum through the matrix-free state-vector path.
template <class S>
std::vector<double> lanczos_lowest(const PauliSum<S> &op, std::size_t k, std::uint64_t seed,
                                   const LanczosOptions &options = {}) {
  const std::size_t dim = std::size_t{1} << op.num_qubits();
  MatVec mv = [&op](std::span<const cd> in, std::span<cd> out) { apply(op, in, out); };
  return lanczos_lowest(mv, dim, k, seed, options);
}

}  // namespace clusterprep
