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

#include "clusterprep/evolve.hpp"

#include "clusterprep/analysis.hpp"
#include "clusterprep/models.hpp"
#include "gtest/gtest.h"

using namespace clusterprep;

namespace {

const HamiltonianBuilder kPlaquette = analysis::plaquette_builder(1.0);

DensityMatrix thermal(double lambda0, double T) {
  return gibbs_state(models::build_plaquette_3d(1.0, lambda0).hamiltonian, T);
}

Eigen::MatrixXcd minus_projector() {
  const Eigen::MatrixXcd w = to_dense(models::stabilizer_3d_local());
  return (Eigen::MatrixXcd::Identity(16, 16) - w) / 2.0;
}

}  // namespace

TEST(Schedule, linear_rampdown_values) {
  const auto s = linear_rampdown(2.5, 10);
  EXPECT_DOUBLE_EQ(s.values(0)[0], 2.5);
  EXPECT_DOUBLE_EQ(s.values(5)[0], 1.25);
  EXPECT_DOUBLE_EQ(s.values(10)[0], 0.0);
  EXPECT_DOUBLE_EQ(linear_rampdown(2, 4).values(2)[0], 1.0);
  EXPECT_THROW(s.values(-1), std::out_of_range);
  EXPECT_THROW(s.values(10.5), std::out_of_range);
  EXPECT_THROW(linear_rampdown(0, 1), std::invalid_argument);
  EXPECT_THROW(linear_rampdown(1, -1), std::invalid_argument);
}

TEST(Schedule, sequential_switchoff_order_1234) {
  const auto s = sequential_switchoff(2, 1, {1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.duration(), 4);
  const auto v = s.values(1.5);
  EXPECT_DOUBLE_EQ(v[0], 0);
  EXPECT_DOUBLE_EQ(v[1], 1);
  EXPECT_DOUBLE_EQ(v[2], 2);
  EXPECT_DOUBLE_EQ(v[3], 2);
  for (double x : s.values(4)) EXPECT_EQ(x, 0);
  for (double x : s.values(0)) EXPECT_EQ(x, 2);
}

TEST(Schedule, sequential_switchoff_order_1324) {
  const auto s = sequential_switchoff(2, 3, {1, 3, 2, 4});
  const auto v = s.values(4.5);
  EXPECT_DOUBLE_EQ(v[0], 0);
  EXPECT_DOUBLE_EQ(v[1], 2);
  EXPECT_DOUBLE_EQ(v[2], 1);
  EXPECT_DOUBLE_EQ(v[3], 2);
  EXPECT_THROW(sequential_switchoff(2, 1, {1, 1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(sequential_switchoff(2, 1, {0, 1, 2, 3}), std::invalid_argument);
}

TEST(Schedule, validation) {
  EXPECT_THROW(Schedule(1, {Channel{"a", {0, 1}, {1, -1}}}), std::invalid_argument);
  EXPECT_THROW(Schedule(1, {Channel{"a", {0, 0, 1}, {1, 1, 1}}}), std::invalid_argument);
  EXPECT_THROW(Schedule(1, {Channel{"a", {0, 0.5}, {1, 1}}}), std::invalid_argument);
  EXPECT_THROW(Schedule(1, {}), std::invalid_argument);
  const auto s = Schedule(2, {Channel{"a", {0, 0.5, 2}, {1, 3, 0}}});
  EXPECT_EQ(s.breakpoints(), (std::vector<double>{0, 0.5, 2}));
  EXPECT_DOUBLE_EQ(s.values(0.25)[0], 2);
  EXPECT_DOUBLE_EQ(s.values(1.25)[0], 1.5);
}

TEST(Propagate, zero_length_is_identity) {
  const auto rho0 = thermal(2.5, 0.3);
  const auto rho = propagate(kPlaquette, Schedule::constant({2.5}, 0.0), rho0, 1e-8);
  EXPECT_EQ(rho.matrix(), rho0.matrix());
}

TEST(Propagate, constant_hamiltonian_matches_eigendecomposition) {
  const auto rho0 = DensityMatrix::pure(analysis::ghz(+1));
  for (double tau : {0.3, 2.0, 7.5}) {
    const auto rho = propagate(kPlaquette, Schedule::constant({1.3}, tau), rho0, 1e-10);
    const Eigen::MatrixXcd u = expm_scaled(to_dense(models::build_plaquette_3d(1.0, 1.3).hamiltonian), cd(0, -tau));
    EXPECT_LT(max_abs(rho.matrix() - u * rho0.matrix() * u.adjoint()), 1e-8) << "tau=" << tau;
  }
}

TEST(Propagate, per_channel_constant_matches_oracle) {
  const auto rho0 = thermal(2.0, 0.5);
  const std::vector<double> lambda{0.3, 1.1, 0.0, 2.0};
  const auto rho = propagate(kPlaquette, Schedule::constant(lambda, 3.0), rho0, 1e-10);
  const Eigen::MatrixXcd h = to_dense(models::build_plaquette_3d(1.0, {0.3, 1.1, 0.0, 2.0}).hamiltonian);
  const Eigen::MatrixXcd u = expm_scaled(h, cd(0, -3.0));
  EXPECT_LT(max_abs(rho.matrix() - u * rho0.matrix() * u.adjoint()), 1e-8);
}

TEST(Propagate, conserves_trace_purity_and_sectors) {
  const Eigen::MatrixXcd minus = minus_projector();
  for (double T : {0.0, 0.5}) {
    const auto rho0 = thermal(2.5, T);
    std::vector<double> samples;
    for (int k = 1; k <= 10; ++k) samples.push_back(k);
    const auto path = propagate_trajectory(kPlaquette, linear_rampdown(2.5, 10), rho0, 1e-8, samples);
    ASSERT_EQ(path.size(), 10u);
    const double w0 = rho0.expectation(minus);
    for (const auto &p : path) {
      EXPECT_LE(std::abs(p.state.trace() - 1), 1e-8);
      EXPECT_LE(std::abs(p.state.purity() - rho0.purity()), 1e-8);
      EXPECT_LE(std::abs(p.state.expectation(minus) - w0), 1e-8) << "t=" << p.time;
    }
  }
}

TEST(Propagate, longer_ramps_are_more_adiabatic) {
  const auto rho0 = thermal(2.5, 0.0);
  double previous_infidelity = 1;
  for (double tau : {5.0, 7.0, 10.0, 20.0}) {
    const auto rho = propagate(kPlaquette, linear_rampdown(2.5, tau), rho0, 1e-8);
    const double infidelity = 1 - rho.fidelity(analysis::ghz(+1));
    EXPECT_LT(infidelity, previous_infidelity) << "tau=" << tau;
    previous_infidelity = infidelity;
  }
}

TEST(Propagate, sequential_path_reaches_ghz) {
  const auto rho0 = gibbs_state(models::build_plaquette_3d(1.0, 2.0).hamiltonian, 0.0);
  const auto rho = propagate(kPlaquette, sequential_switchoff(2.0, 10.0, {1, 2, 3, 4}), rho0, 1e-8);
  EXPECT_GT(rho.fidelity(analysis::ghz(+1)), 0.9);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
}

TEST(Propagate, step_doubling_converges) {
  const auto builder = kPlaquette;
  const auto schedule = linear_rampdown(2.5, 5);
  const auto coarse = propagator(builder, schedule, 1e-6);
  const auto fine = propagator(builder, schedule, 1e-11);
  EXPECT_LT(coarse.change, 1e-6);
  EXPECT_GE(fine.steps, coarse.steps);
  EXPECT_LT(max_abs(coarse.unitaries.back() - fine.unitaries.back()), 1e-6);
  const Eigen::MatrixXcd &u = fine.unitaries.back();
  EXPECT_LT(max_abs(u.adjoint() * u - Eigen::MatrixXcd::Identity(16, 16)), 1e-12);
}

TEST(Propagate, errors) {
  const DensityMatrix small = DensityMatrix::pure(Eigen::Vector2cd(1, 0));
  EXPECT_THROW(propagate(kPlaquette, linear_rampdown(1, 1), small, 1e-8), std::invalid_argument);
  EXPECT_THROW(propagate(kPlaquette, linear_rampdown(1, 1), thermal(1, 0), 0.0), std::invalid_argument);
  PropagationOptions opts;
  opts.max_halvings = 1;
  opts.base_step_fraction = 0.5;
  EXPECT_THROW(propagate(kPlaquette, linear_rampdown(2.5, 10), thermal(2.5, 0), 1e-12, opts), NumericalError);
}

TEST(Propagate, deterministic) {
  const auto rho0 = thermal(2.5, 0.4);
  const auto a = propagate(kPlaquette, linear_rampdown(2.5, 5), rho0, 1e-8);
  const auto b = propagate(kPlaquette, linear_rampdown(2.5, 5), rho0, 1e-8);
  EXPECT_EQ(a.matrix(), b.matrix());
}
