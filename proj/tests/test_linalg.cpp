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

#include "clusterprep/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <random>

#include "clusterprep/models.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace clusterprep;

TEST(Eigh, matches_reference_solver) {
  std::mt19937_64 rng(21);
  for (int dim : {1, 2, 3, 7, 16, 40}) {
    const Eigen::MatrixXcd h = testutil::random_hermitian(dim, rng);
    const Spectrum s = eigh(h);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> oracle(h);
    EXPECT_LT((s.eigenvalues - oracle.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10) << "dim " << dim;
    EXPECT_LT(max_abs(h * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal()), 1e-10);
    EXPECT_LT(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - Eigen::MatrixXcd::Identity(dim, dim)), 1e-10);
  }
}

TEST(Eigh, ascending_and_phase_canonical) {
  std::mt19937_64 rng(22);
  const Spectrum s = eigh(testutil::random_hermitian(12, rng));
  for (Eigen::Index k = 1; k < s.eigenvalues.size(); ++k) EXPECT_LE(s.eigenvalues(k - 1), s.eigenvalues(k));
  for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
    for (Eigen::Index r = 0; r < s.eigenvectors.rows(); ++r) {
      const cd v = s.eigenvectors(r, c);
      if (std::abs(v) > kPhaseComponentFloor) {
        EXPECT_GT(v.real(), 0);
        EXPECT_NEAR(v.imag(), 0, 1e-14);
        break;
      }
    }
  }
}

TEST(Eigh, deterministic) {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXcd h = testutil::random_hermitian(16, rng);
  const Spectrum a = eigh(h), b = eigh(h);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(Eigh, degenerate_ising_ring) {
  const auto ring = models::build_plaquette_3d(1.0, 0.0).hamiltonian;
  const Spectrum s = eigh(to_dense(ring));
  EXPECT_NEAR(s.eigenvalues(0), -4, 1e-12);
  EXPECT_NEAR(s.eigenvalues(1), -4, 1e-12);
  EXPECT_NEAR(s.eigenvalues(2), 0, 1e-12);
  EXPECT_NEAR(s.eigenvalues(13), 0, 1e-12);
  EXPECT_NEAR(s.eigenvalues(15), 4, 1e-12);
}

TEST(Eigh, rejects_non_hermitian) {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 0, 0;
  EXPECT_THROW(eigh(m), std::invalid_argument);
  EXPECT_THROW(eigh(Eigen::MatrixXcd(2, 3)), std::invalid_argument);
}

TEST(Expm, pauli_rotation) {
  // exp(-i pi/2 X) = -i X
  const Eigen::MatrixXcd x = to_dense(PauliString::from_text("X"));
  EXPECT_LT(max_abs(expm_scaled(x, cd(0, -M_PI / 2)) - cd(0, -1) * x), 1e-14);
}

TEST(Expm, unitary_and_group_law) {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXcd h = testutil::random_hermitian(8, rng);
  const Eigen::MatrixXcd u1 = expm_scaled(h, cd(0, -0.3)), u2 = expm_scaled(h, cd(0, -0.7));
  EXPECT_LT(max_abs(u1.adjoint() * u1 - Eigen::MatrixXcd::Identity(8, 8)), 1e-12);
  EXPECT_LT(max_abs(u2 * u1 - expm_scaled(h, cd(0, -1.0))), 1e-12);
}

TEST(Expm, real_scaling_matches_series) {
  std::mt19937_64 rng(25);
  const Eigen::MatrixXcd h = 0.1 * testutil::random_hermitian(5, rng);
  Eigen::MatrixXcd series = Eigen::MatrixXcd::Identity(5, 5), term = series;
  for (int k = 1; k < 30; ++k) {
    term = term * h / double(k);
    series += term;
  }
  EXPECT_LT(max_abs(expm_scaled(h, 1.0) - series), 1e-13);
}

TEST(Lanczos, ising_ring_ground_doublet) {
  const auto ring = models::build_plaquette_3d(1.0, 0.0).hamiltonian;
  const auto values = lanczos_lowest(ring, 3, 1);
  EXPECT_NEAR(values[0], -4, 1e-9);
  EXPECT_NEAR(values[1], -4, 1e-9);
  EXPECT_NEAR(values[2], 0, 1e-9);
}

TEST(Lanczos, chain_matches_dense) {
  const auto model = models::build_chain_1d(5, 1.0, 0.3);
  const Spectrum dense = eigh(to_dense(model.hamiltonian));
  const auto values = lanczos_lowest(model.hamiltonian, 4, 7);
  for (std::size_t k = 0; k < values.size(); ++k) {
    EXPECT_NEAR(values[k], dense.eigenvalues(static_cast<Eigen::Index>(k)), 1e-8) << "level " << k;
  }
}

TEST(Lanczos, random_hermitian_matvec) {
  std::mt19937_64 rng(26);
  const Eigen::MatrixXcd h = testutil::random_hermitian(60, rng);
  MatVec mv = [&h](std::span<const cd> in, std::span<cd> out) {
    Eigen::Map<Eigen::VectorXcd>(out.data(), 60) = h * Eigen::Map<const Eigen::VectorXcd>(in.data(), 60);
  };
  const auto values = lanczos_lowest(mv, 60, 3, 3);
  const Spectrum s = eigh(h);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(values[k], s.eigenvalues(k), 1e-8);
}

TEST(Lanczos, seed_reproducible) {
  const auto model = models::build_chain_1d(4, 1.0, 0.2);
  EXPECT_EQ(lanczos_lowest(model.hamiltonian, 2, 5), lanczos_lowest(model.hamiltonian, 2, 5));
}

TEST(Lanczos, rejects_bad_k) {
  const auto ring = models::build_plaquette_3d(1.0, 0.0).hamiltonian;
  EXPECT_THROW(lanczos_lowest(ring, 0, 1), std::invalid_argument);
  EXPECT_THROW(lanczos_lowest(ring, 17, 1), std::invalid_argument);
}
