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

// Coupling schedules and unitary evolution of density matrices under
// time-dependent Hamiltonians H(lambda(t)).
//
// The time-ordered exponential is built from a fourth-order commutator-free
// Magnus step using two Gauss-Legendre samples per step,
//   U(t + h, t) = exp(-i h (a2 H1 + a1 H2)) exp(-i h (a1 H1 + a2 H2)),
//   H1,2 = H(t + (1/2 -+ sqrt(3)/6) h),  a1,2 = 1/4 +- sqrt(3)/6,
// with each exponential evaluated exactly by diagonalization, so the
// propagator is unitary to rounding. Steps never straddle a schedule
// breakpoint.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterprep/errors.hpp"
#include "clusterprep/linalg.hpp"
#include "clusterprep/pauli.hpp"
#include "clusterprep/thermal.hpp"

namespace clusterprep {

/// Piecewise-linear function through (times[i], values[i]).
struct Channel {
  std::string name;
  std::vector<double> times;
  std::vector<double> values;

  double at(double t) const {
    if (times.size() == 1 || t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + f * (values[hi] - values[lo]);
  }
};

class Schedule {
 public:
  Schedule(double duration, std::vector<Channel> channels) : duration_(duration), channels_(std::move(channels)) {
    if (!(duration >= 0) || !std::isfinite(duration)) throw std::invalid_argument("schedule duration must be >= 0");
    if (channels_.empty()) throw std::invalid_argument("schedule needs at least one channel");
    for (const auto &c : channels_) {
      if (c.times.empty() || c.times.size() != c.values.size()) {
        throw std::invalid_argument("channel '" + c.name + "' needs matching, non-empty breakpoints and values");
      }
      if (c.times.front() != 0 || c.times.back() != duration) {
        throw std::invalid_argument("channel '" + c.name + "' must span [0, duration]");
      }
      for (std::size_t i = 1; i < c.times.size(); ++i) {
        if (!(c.times[i] > c.times[i - 1])) {
          throw std::invalid_argument("channel '" + c.name + "' breakpoints must be strictly increasing");
        }
      }
      for (double v : c.values) {
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("channel '" + c.name + "' has a negative value");
      }
    }
  }

  /// Every channel held at `values` for `duration`.
  static Schedule constant(const std::vector<double> &values, double duration) {
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < values.size(); ++i) {
      Channel c{"lambda" + std::to_string(i + 1), {0.0}, {values[i]}};
      if (duration > 0) {
        c.times.push_back(duration);
        c.values.push_back(values[i]);
      }
      channels.push_back(std::move(c));
    }
    return Schedule(duration, std::move(channels));
  }

  double duration() const noexcept { return duration_; }
  std::size_t num_channels() const noexcept { return channels_.size(); }
  const std::vector<Channel> &channels() const noexcept { return channels_; }

  std::vector<double> values(double t) const {
    if (!(t >= 0) || !(t <= duration_)) {
      throw std::out_of_range("schedule evaluated at t=" + std::to_string(t) + " outside [0, " +
                              std::to_string(duration_) + "]");
    }
    std::vector<double> out;
    out.reserve(channels_.size());
    for (const auto &c : channels_) out.push_back(c.at(t));
    return out;
  }

  /// Sorted union of all channel breakpoints, including 0 and the duration.
  std::vector<double> breakpoints() const {
    std::vector<double> out{0.0, duration_};
    for (const auto &c : channels_) out.insert(out.end(), c.times.begin(), c.times.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  double duration_;
  std::vector<Channel> channels_;
};

/// lambda(t) = lambda0 - (lambda0 / tau) t on [0, tau].
inline Schedule linear_rampdown(double lambda0, double tau) {
  if (!(lambda0 > 0) || !std::isfinite(lambda0)) throw std::invalid_argument("lambda0 must be positive");
  if (!(tau > 0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  return Schedule(tau, {Channel{"lambda", {0.0, tau}, {lambda0, 0.0}}});
}

/// Four channels lambda1..lambda4 starting at lambda_init; during segment k
/// (of length tau_each) channel order[k] ramps linearly to zero.
/// `order` is a permutation of {1, 2, 3, 4}.
inline Schedule sequential_switchoff(double lambda_init, double tau_each, const std::array<int, 4> &order) {
  if (!(lambda_init >= 0) || !std::isfinite(lambda_init)) throw std::invalid_argument("lambda_init must be >= 0");
  if (!(tau_each > 0) || !std::isfinite(tau_each)) throw std::invalid_argument("tau_each must be positive");
  std::array<bool, 4> seen{};
  for (int c : order) {
    if (c < 1 || c > 4 || seen[static_cast<std::size_t>(c - 1)]) {
      throw std::invalid_argument("order must be a permutation of 1,2,3,4");
    }
    seen[static_cast<std::size_t>(c - 1)] = true;
  }
  const double total = 4 * tau_each;
  std::vector<Channel> channels(4);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto c = static_cast<std::size_t>(order[k] - 1);
    const double start = static_cast<double>(k) * tau_each, stop = start + tau_each;
    Channel &ch = channels[c];
    ch.name = "lambda" + std::to_string(c + 1);
    ch.times = {0.0};
    ch.values = {lambda_init};
    if (start > 0) {
      ch.times.push_back(start);
      ch.values.push_back(lambda_init);
    }
    ch.times.push_back(stop);
    ch.values.push_back(0.0);
    if (stop < total) {
      ch.times.push_back(total);
      ch.values.push_back(0.0);
    }
  }
  return Schedule(total, std::move(channels));
}

/// Maps channel values to the instantaneous Hamiltonian.
using HamiltonianBuilder = std::function<OperatorSum(std::span<const double>)>;

struct PropagationOptions {
  /// Initial step as a fraction of the schedule duration.
  double base_step_fraction = 1e-3;
  /// Step halvings allowed before reporting step underflow.
  int max_halvings = 10;
  std::size_t dense_limit = kDefaultDenseLimit;
};

/// Propagators U(t_k, 0) at the requested times.
struct PropagatorResult {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> unitaries;
  std::size_t steps = 0;
  /// Largest entry change between the last two step sizes.
  double change = 0;
};

namespace detail {

inline std::vector<double> merge_times(const Schedule &schedule, const std::vector<double> &samples) {
  std::vector<double> grid = schedule.breakpoints();
  for (double t : samples) {
    if (!(t >= 0) || !(t <= schedule.duration())) throw std::out_of_range("sample time outside the schedule");
    grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

class DenseHamiltonian {
 public:
  DenseHamiltonian(const HamiltonianBuilder &builder, const Schedule &schedule, std::size_t dense_limit)
      : builder_(builder), schedule_(schedule), dense_limit_(dense_limit) {}

  Eigen::MatrixXcd operator()(double t) const {
    const auto values = schedule_.values(std::clamp(t, 0.0, schedule_.duration()));
    return to_dense(builder_(values), dense_limit_);
  }

 private:
  const HamiltonianBuilder &builder_;
  const Schedule &schedule_;
  std::size_t dense_limit_;
};

/// U(t_k, 0) at each sample time with step size at most h.
inline std::vector<Eigen::MatrixXcd> integrate(const DenseHamiltonian &hamiltonian, const std::vector<double> &grid,
                                               const std::vector<double> &samples, Eigen::Index dim, double h,
                                               std::size_t &steps) {
  static const double kOffset = std::sqrt(3.0) / 6;
  static const double kA1 = 0.25 + kOffset, kA2 = 0.25 - kOffset;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<Eigen::MatrixXcd> out;
  std::size_t next = 0;
  steps = 0;
  auto emit = [&](double t) {
    while (next < samples.size() && samples[next] == t) {
      out.push_back(u);
      ++next;
    }
  };
  emit(grid.front());
  for (std::size_t seg = 0; seg + 1 < grid.size(); ++seg) {
    const double a = grid[seg], b = grid[seg + 1];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-9)));
    const double dt = (b - a) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = a + static_cast<double>(k) * dt;
      const Eigen::MatrixXcd h1 = hamiltonian(t + (0.5 - kOffset) * dt);
      const Eigen::MatrixXcd h2 = hamiltonian(t + (0.5 + kOffset) * dt);
      const Eigen::MatrixXcd first = expm_scaled(Eigen::MatrixXcd(kA1 * h1 + kA2 * h2), cd(0, -dt));
      const Eigen::MatrixXcd second = expm_scaled(Eigen::MatrixXcd(kA2 * h1 + kA1 * h2), cd(0, -dt));
      u = second * (first * u);
    }
    steps += n;
    emit(b);
  }
  return out;
}

}  // namespace detail

/// Maps a propagator to the quantity whose convergence is monitored.
using Observable = std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd &)>;

/// Propagators at `sample_times` (sorted ascending; the duration is always
/// appended). The step is halved until no entry of `observe(U)` at any sample
/// moves by `tol` or more; without an observable, U itself is monitored.
inline PropagatorResult propagator(const HamiltonianBuilder &builder, const Schedule &schedule, double tol,
                                   std::vector<double> sample_times = {}, const PropagationOptions &options = {},
                                   const Observable &observe = {}) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) throw std::invalid_argument("sample times must be sorted");
  if (sample_times.empty() || sample_times.back() != schedule.duration()) sample_times.push_back(schedule.duration());
  const auto grid = detail::merge_times(schedule, sample_times);
  const detail::DenseHamiltonian hamiltonian(builder, schedule, options.dense_limit);
  const Eigen::Index dim = hamiltonian(0.0).rows();

  PropagatorResult result;
  result.times = sample_times;
  if (schedule.duration() == 0) {
    result.unitaries.assign(sample_times.size(), Eigen::MatrixXcd::Identity(dim, dim));
    return result;
  }

  double h = options.base_step_fraction * schedule.duration();
  std::size_t steps = 0;
  auto coarse = detail::integrate(hamiltonian, grid, sample_times, dim, h, steps);
  for (int halving = 0; halving < options.max_halvings; ++halving) {
    h /= 2;
    auto fine = detail::integrate(hamiltonian, grid, sample_times, dim, h, steps);
    double change = 0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      change = std::max(change, observe ? max_abs(observe(fine[k]) - observe(coarse[k])) : max_abs(fine[k] - coarse[k]));
    }
    if (change < tol) {
      result.unitaries = std::move(fine);
      result.steps = steps;
      result.change = change;
      return result;
    }
    coarse = std::move(fine);
  }
  throw NumericalError("propagate: step underflow, tolerance " + std::to_string(tol) + " not reached after " +
                       std::to_string(options.max_halvings) + " halvings");
}

/// U rho U^H assembled from the eigen-decomposition of rho, summed in
/// eigenvalue-index order.
inline DensityMatrix evolve_state(const DensityMatrix &rho, const Eigen::MatrixXcd &u) {
  if (u.rows() != static_cast<Eigen::Index>(rho.dim())) throw std::invalid_argument("state dimension mismatch");
  const Spectrum parts = eigh(rho.matrix());
  std::vector<double> weights(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) weights[k] = parts.eigenvalues(static_cast<Eigen::Index>(k));
  const Eigen::MatrixXcd evolved = u * parts.eigenvectors;
  Eigen::MatrixXcd out = mixture(evolved, weights);
  return DensityMatrix::from_matrix((out + out.adjoint()) / 2.0, 1e-8);
}

struct TrajectoryPoint {
  double time;
  DensityMatrix state;
};

/// rho(t) at each sample time, sharing one converged integration.
inline std::vector<TrajectoryPoint> propagate_trajectory(const HamiltonianBuilder &builder, const Schedule &schedule,
                                                         const DensityMatrix &rho0, double tol,
                                                         const std::vector<double> &sample_times,
                                                         const PropagationOptions &options = {}) {
  const Observable conjugate = [&rho0](const Eigen::MatrixXcd &u) {
    if (u.rows() != static_cast<Eigen::Index>(rho0.dim())) {
      throw std::invalid_argument("initial state dimension does not match the Hamiltonian");
    }
    return Eigen::MatrixXcd(u * rho0.matrix() * u.adjoint());
  };
  if (schedule.duration() == 0) {
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    conjugate(to_dense(builder(schedule.values(0.0)), options.dense_limit));
    return std::vector<TrajectoryPoint>(std::max<std::size_t>(sample_times.size(), 1), {0.0, rho0});
  }
  const auto prop = propagator(builder, schedule, tol, sample_times, options, conjugate);
  if (prop.unitaries.front().rows() != static_cast<Eigen::Index>(rho0.dim())) {
    throw std::invalid_argument("initial state dimension does not match the Hamiltonian");
  }
  std::vector<TrajectoryPoint> out;
  for (std::size_t k = 0; k < prop.times.size(); ++k) out.push_back({prop.times[k], evolve_state(rho0, prop.unitaries[k])});
  return out;
}

/// rho(tau) = U rho0 U^H with U converged to `tol`.
inline DensityMatrix propagate(const HamiltonianBuilder &builder, const Schedule &schedule, const DensityMatrix &rho0,
                               double tol, const PropagationOptions &options = {}) {
  return propagate_trajectory(builder, schedule, rho0, tol, {}, options).back().state;
}

}  // namespace clusterprep
