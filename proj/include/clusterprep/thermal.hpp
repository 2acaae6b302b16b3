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

// Density matrices on the computational basis and Gibbs states with the
// Boltzmann constant set to one.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterprep/linalg.hpp"
#include "clusterprep/pauli.hpp"

namespace clusterprep {

/// Tolerance for the Hermiticity, trace and positivity invariants.
inline constexpr double kDensityTolerance = 1e-10;

/// Relative energy tolerance that defines the ground eigenspace at T = 0.
inline constexpr double kDegeneracyTolerance = 1e-9;

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity to `tolerance`.
  static DensityMatrix from_matrix(Eigen::MatrixXcd matrix, double tolerance = kDensityTolerance) {
    const Eigen::Index dim = matrix.rows();
    if (dim == 0 || matrix.cols() != dim || (dim & (dim - 1)) != 0) {
      throw std::invalid_argument("density matrix must be square with power-of-two dimension");
    }
    if (!matrix.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    const double herm = hermiticity_residual(matrix);
    if (herm > tolerance) throw std::invalid_argument("density matrix is not Hermitian (residual " + std::to_string(herm) + ")");
    const double trace_error = std::abs(matrix.trace() - cd(1.0));
    if (trace_error > tolerance) throw std::invalid_argument("density matrix trace differs from 1 by " + std::to_string(trace_error));
    const Eigen::MatrixXcd symmetric = (matrix + matrix.adjoint()) / 2.0;
    const double smallest = eigh(symmetric).eigenvalues(0);
    if (smallest < -tolerance) throw std::invalid_argument("density matrix has negative eigenvalue " + std::to_string(smallest));
    return DensityMatrix(std::move(matrix));
  }

  /// |psi><psi| for a normalized state.
  static DensityMatrix pure(const Eigen::VectorXcd &psi) {
    if (std::abs(psi.norm() - 1.0) > kDensityTolerance) throw std::invalid_argument("pure state must be normalized");
    return from_matrix(psi * psi.adjoint());
  }

  const Eigen::MatrixXcd &matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t num_qubits() const noexcept {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim()) ++n;
    return n;
  }

  double trace() const { return matrix_.trace().real(); }
  double purity() const { return (matrix_ * matrix_).trace().real(); }

  /// tr(rho A) for a Hermitian A.
  double expectation(const Eigen::MatrixXcd &a) const { return (matrix_ * a).trace().real(); }

  /// <psi| rho |psi>.
  double fidelity(const Eigen::VectorXcd &psi) const { return psi.dot(matrix_ * psi).real(); }

 private:
  explicit DensityMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {}
  Eigen::MatrixXcd matrix_;
};

/// Normalized occupation weights for ascending `energies` at temperature T.
/// Energies are shifted by their minimum before exponentiation. At T = 0 the
/// ground eigenspace (relative tolerance kDegeneracyTolerance) is uniformly
/// populated.
inline std::vector<double> boltzmann_weights(const Eigen::VectorXd &energies, double T) {
  if (!(T >= 0) || !std::isfinite(T)) throw std::invalid_argument("temperature must be >= 0 and finite");
  const Eigen::Index n = energies.size();
  if (n == 0) throw std::invalid_argument("empty spectrum");
  const double e0 = energies.minCoeff();
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  double total = 0;
  if (T == 0) {
    const double window = kDegeneracyTolerance * std::max(1.0, std::abs(e0));
    for (Eigen::Index k = 0; k < n; ++k) {
      if (energies(k) - e0 <= window) w[static_cast<std::size_t>(k)] = 1.0;
    }
  } else {
    for (Eigen::Index k = 0; k < n; ++k) w[static_cast<std::size_t>(k)] = std::exp(-(energies(k) - e0) / T);
  }
  for (double x : w) total += x;
  for (double &x : w) x /= total;
  return w;
}

/// sum_k p_k |v_k><v_k| summed in index order.
inline Eigen::MatrixXcd mixture(const Eigen::MatrixXcd &vectors, const std::vector<double> &weights) {
  if (static_cast<std::size_t>(vectors.cols()) != weights.size()) throw std::invalid_argument("mixture: size mismatch");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(vectors.rows(), vectors.rows());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] == 0) continue;
    const auto v = vectors.col(static_cast<Eigen::Index>(k));
    rho.noalias() += weights[k] * (v * v.adjoint());
  }
  return rho;
}

inline DensityMatrix gibbs_state(const Spectrum &spectrum, double T) {
  return DensityMatrix::from_matrix(mixture(spectrum.eigenvectors, boltzmann_weights(spectrum.eigenvalues, T)));
}

/// exp(-H/T) / tr exp(-H/T); the ground-eigenspace mixture at T = 0.
inline DensityMatrix gibbs_state(const OperatorSum &h, double T, std::size_t dense_limit = kDefaultDenseLimit) {
  if (!(T >= 0)) throw std::invalid_argument("temperature must be >= 0");
  return gibbs_state(eigh(to_dense(h, dense_limit)), T);
}

}  // namespace clusterprep
