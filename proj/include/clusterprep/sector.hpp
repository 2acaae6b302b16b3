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

// Orthonormal bases of joint eigenspaces of commuting Pauli stabilizers, and
// operators restricted to them.
//
// The projector onto {g_i = s_i} is the group average (1/|G|) sum_g s(g) g.
// Applied to a computational basis state it only reaches the orbit b ^ x(g),
// so each orbit contributes at most one basis vector.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clusterprep/linalg.hpp"
#include "clusterprep/pauli.hpp"

namespace clusterprep {

/// The single Pauli string of a one-term stabilizer with coefficient +1.
inline PauliString stabilizer_string(const OperatorSum &stabilizer) {
  if (stabilizer.size() != 1 || stabilizer.terms()[0].coefficient != 1.0) {
    throw std::invalid_argument("stabilizer must be a single Pauli string with coefficient 1");
  }
  return stabilizer.terms()[0].string;
}

/// Columns span the joint eigenspace g_i = signs[i] of commuting Hermitian
/// Pauli strings. Zero columns when the constraints are inconsistent.
inline Eigen::MatrixXcd stabilizer_sector_basis(const std::vector<PauliString> &generators,
                                                const std::vector<int> &signs) {
  if (generators.empty()) throw std::invalid_argument("need at least one stabilizer generator");
  if (generators.size() != signs.size()) throw std::invalid_argument("one sign per generator is required");
  if (generators.size() > 20) throw std::invalid_argument("too many generators for group enumeration");
  const std::size_t n = generators.front().num_qubits();
  if (n > kSparseLimit) throw std::invalid_argument("register exceeds the state-vector limit");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].num_qubits() != n) throw std::invalid_argument("generator width mismatch");
    if (generators[i].phase() % 2 != 0) throw std::invalid_argument("generators must be Hermitian");
    if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
    for (std::size_t j = 0; j < i; ++j) {
      if (!commutes(generators[i], generators[j])) throw std::invalid_argument("generators must commute");
    }
  }

  struct Element {
    std::uint64_t x, z;
    cd factor;  // s(g) * phase(g) * i^{y count}
  };
  std::vector<Element> group;
  group.reserve(std::size_t{1} << generators.size());
  for (std::size_t subset = 0; subset < (std::size_t{1} << generators.size()); ++subset) {
    PauliString g(n);
    int sign = 1;
    for (std::size_t i = 0; i < generators.size(); ++i) {
      if (subset >> i & 1) {
        g = multiply(g, generators[i]);
        sign *= signs[i];
      }
    }
    group.push_back({g.x_mask(), g.z_mask(), double(sign) * phase_value(g.phase() + g.y_count())});
  }

  const std::size_t dim = std::size_t{1} << n;
  std::vector<bool> visited(dim, false);
  std::vector<Eigen::VectorXcd> columns;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    if (visited[b]) continue;
    std::vector<std::size_t> touched;
    for (const auto &g : group) {
      const std::size_t target = b ^ g.x;
      if (!visited[target]) {
        visited[target] = true;
        touched.push_back(target);
      }
      v(static_cast<Eigen::Index>(target)) += (std::popcount(g.z & b) & 1) ? -g.factor : g.factor;
    }
    double norm2 = 0;
    for (std::size_t t : touched) norm2 += std::norm(v(static_cast<Eigen::Index>(t)));
    if (norm2 > 1e-18) {
      Eigen::VectorXcd column = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
      const double scale = 1.0 / std::sqrt(norm2);
      for (std::size_t t : touched) column(static_cast<Eigen::Index>(t)) = v(static_cast<Eigen::Index>(t)) * scale;
      columns.push_back(std::move(column));
    }
    for (std::size_t t : touched) v(static_cast<Eigen::Index>(t)) = 0;
  }

  Eigen::MatrixXcd basis(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = columns[c];
  return basis;
}

/// Q^H op Q for an isometry Q.
template <class S>
Eigen::MatrixXcd restrict_operator(const PauliSum<S> &op, const Eigen::MatrixXcd &basis) {
  const std::size_t dim = std::size_t{1} << op.num_qubits();
  if (static_cast<std::size_t>(basis.rows()) != dim) throw std::invalid_argument("sector basis dimension mismatch");
  Eigen::MatrixXcd image(basis.rows(), basis.cols());
  Eigen::VectorXcd in(basis.rows()), out(basis.rows());
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    in = basis.col(c);
    apply(op, std::span<const cd>(in.data(), dim), std::span<cd>(out.data(), dim));
    image.col(c) = out;
  }
  Eigen::MatrixXcd restricted = basis.adjoint() * image;
  return (restricted + restricted.adjoint()) / 2.0;
}

/// Spectrum of `op` inside the joint eigenspace of the stabilizers.
inline Spectrum sector_spectrum(const OperatorSum &op, const std::vector<OperatorSum> &stabilizers,
                                const std::vector<int> &signs) {
  std::vector<PauliString> generators;
  for (const auto &s : stabilizers) generators.push_back(stabilizer_string(s));
  const Eigen::MatrixXcd basis = stabilizer_sector_basis(generators, signs);
  if (basis.cols() == 0) throw std::invalid_argument("stabilizer sector is empty");
  return eigh(restrict_operator(op, basis));
}

}  // namespace clusterprep
