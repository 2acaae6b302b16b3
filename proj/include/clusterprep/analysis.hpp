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

// Plaquette-level analysis: sector-labelled spectra, phase-flip error
// tomography of a final state, and threshold temperatures.
//
// Error tomography uses the orthonormal basis
//   |psi_{e,s}> = X^e (|0000> + s |1111>) / sqrt(2),  e mod complement,
// whose eight classes of e are
//   0000                      no error (fidelity),
//   0001 0010 0100 1000       single Z on neighbour 1..4,
//   0011~1100  0110~1001      adjacent pairs (correlated type 1),
//   0101~1010                 diagonal pair  (correlated type 2).
// An X flip on spin m is read as a Z error on the neighbouring logical qubit
// m. A component with s = -1 (stabilizer outcome -1) carries one extra,
// unlocatable single-Z error, so its weight is moved to class e ^ (1 << k)
// with probability 1/4 for each k.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterprep/evolve.hpp"
#include "clusterprep/linalg.hpp"
#include "clusterprep/models.hpp"
#include "clusterprep/thermal.hpp"

namespace clusterprep::analysis {

/// Fault-tolerance threshold on the total phase-flip error.
inline constexpr double kErrorThreshold = 0.03;

/// Integrator tolerance used for reported results.
inline constexpr double kAcceptanceTolerance = 1e-8;

// ---------------------------------------------------------------------------
// Plaquette helpers

/// Builder for the CZ-frame plaquette: one channel sets all four couplings,
/// four channels set them individually.
inline HamiltonianBuilder plaquette_builder(double J) {
  return [J](std::span<const double> lambda) {
    if (lambda.size() == 1) return models::build_plaquette_3d(J, lambda[0]).hamiltonian;
    if (lambda.size() == 4) {
      return models::build_plaquette_3d(J, {lambda[0], lambda[1], lambda[2], lambda[3]}).hamiltonian;
    }
    throw std::invalid_argument("plaquette builder needs 1 or 4 coupling channels");
  };
}

/// (|0000> + s|1111>) / sqrt(2).
inline Eigen::VectorXcd ghz(int s = +1) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
  v(0) = 1 / std::sqrt(2.0);
  v(15) = double(s) / std::sqrt(2.0);
  return v;
}

inline const Eigen::MatrixXcd &plaquette_stabilizer_matrix() {
  static const Eigen::MatrixXcd w = to_dense(models::stabilizer_3d_local());
  return w;
}

// ---------------------------------------------------------------------------
// Sector-labelled spectra

struct LabelledSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd vectors;
  std::vector<int> sectors;
  /// Degenerate blocks that had to be re-resolved by diagonalizing W.
  std::size_t mixed_blocks = 0;
};

/// Eigenpairs of H labelled by their eigenvalue of the commuting involution W.
inline LabelledSpectrum labelled_spectrum(const Eigen::MatrixXcd &h, const Eigen::MatrixXcd &w) {
  const Spectrum spec = eigh(h);
  LabelledSpectrum out{spec.eigenvalues, spec.eigenvectors, std::vector<int>(spec.size(), 0), 0};
  const auto n = static_cast<Eigen::Index>(spec.size());
  const double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && spec.eigenvalues(stop) - spec.eigenvalues(stop - 1) <= 1e-8 * scale) ++stop;
    const Eigen::Index size = stop - start;
    bool sharp = true;
    for (Eigen::Index k = start; k < stop; ++k) {
      const double wk = spec.eigenvectors.col(k).dot(w * spec.eigenvectors.col(k)).real();
      if (std::abs(wk) < 1 - 1e-6) sharp = false;
    }
    if (!sharp) {
      ++out.mixed_blocks;
      const Eigen::MatrixXcd block = spec.eigenvectors.middleCols(start, size);
      const Spectrum inner = eigh(Eigen::MatrixXcd(block.adjoint() * w * block));
      // Ascending W order puts -1 first; reverse so +1 states lead the block.
      Eigen::MatrixXcd rotated = block * inner.eigenvectors.rowwise().reverse();
      out.vectors.middleCols(start, size) = rotated;
      const double mean = spec.eigenvalues.segment(start, size).mean();
      out.energies.segment(start, size).setConstant(mean);
    }
    for (Eigen::Index k = start; k < stop; ++k) {
      const double wk = out.vectors.col(k).dot(w * out.vectors.col(k)).real();
      if (std::abs(wk) < 1 - 1e-6) throw NumericalError("eigenvector is not a stabilizer eigenstate");
      out.sectors[static_cast<std::size_t>(k)] = wk > 0 ? +1 : -1;
    }
    start = stop;
  }
  return out;
}

struct SpectrumRow {
  double x;  // coupling or path time
  std::size_t level;
  double energy;
  int sector;
  double gap_global;  // E1 - E0
  double gap_sector;  // gap inside the W = +1 sector
};

struct SectorSpectrumTable {
  std::vector<SpectrumRow> rows;
  /// Smallest W = +1 sector gap over all sampled points.
  double min_sector_gap = std::numeric_limits<double>::infinity();
  std::size_t mixed_blocks = 0;
};

namespace detail {

inline void append_point(SectorSpectrumTable &table, double x, const OperatorSum &h) {
  const auto ls = labelled_spectrum(to_dense(h), plaquette_stabilizer_matrix());
  const double gap_global = ls.energies(1) - ls.energies(0);
  std::vector<double> plus;
  for (std::size_t k = 0; k < ls.sectors.size(); ++k) {
    if (ls.sectors[k] == +1) plus.push_back(ls.energies(static_cast<Eigen::Index>(k)));
  }
  if (plus.size() < 2) throw NumericalError("W = +1 sector has fewer than two levels");
  const double gap_sector = plus[1] - plus[0];
  for (std::size_t k = 0; k < ls.sectors.size(); ++k) {
    table.rows.push_back({x, k, ls.energies(static_cast<Eigen::Index>(k)), ls.sectors[k], gap_global, gap_sector});
  }
  table.min_sector_gap = std::min(table.min_sector_gap, gap_sector);
  table.mixed_blocks += ls.mixed_blocks;
}

}  // namespace detail

/// 16 labelled plaquette levels per uniform coupling in `lambda_grid`.
inline SectorSpectrumTable spectrum_scan(double J, const std::vector<double> &lambda_grid) {
  SectorSpectrumTable table;
  for (double lambda : lambda_grid) {
    if (!(lambda >= 0)) throw std::invalid_argument("coupling grid values must be >= 0");
    detail::append_point(table, lambda, models::build_plaquette_3d(J, lambda).hamiltonian);
  }
  return table;
}

/// Labelled plaquette levels at `samples` evenly spaced times of a
/// four-channel schedule.
inline SectorSpectrumTable spectrum_path(const Schedule &schedule, double J, std::size_t samples) {
  if (schedule.num_channels() != 4) throw std::invalid_argument("path schedule must have 4 coupling channels");
  if (samples < 2) throw std::invalid_argument("path needs at least 2 samples");
  const auto builder = plaquette_builder(J);
  SectorSpectrumTable table;
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? schedule.duration()
                                      : schedule.duration() * static_cast<double>(i) / static_cast<double>(samples - 1);
    detail::append_point(table, t, builder(schedule.values(t)));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Error tomography

inline constexpr std::size_t kErrorClasses = 8;

/// Representative flip pattern e for each class, in report order.
inline constexpr std::array<unsigned, kErrorClasses> kClassPattern = {0b0000, 0b0001, 0b0010, 0b0100,
                                                                       0b1000, 0b0011, 0b0110, 0b0101};

inline const char *class_name(std::size_t c) {
  static constexpr const char *names[] = {"none", "z1", "z2", "z3", "z4", "c1_12", "c1_23", "c2_13"};
  return names[c];
}

/// Class of flip pattern e (4 bits), identifying e with its complement.
inline std::size_t error_class(unsigned e) {
  e &= 0xF;
  for (std::size_t c = 0; c < kErrorClasses; ++c) {
    if (kClassPattern[c] == e || (kClassPattern[c] ^ 0xFu) == e) return c;
  }
  throw std::logic_error("unreachable error pattern");
}

/// Column 2c + (s < 0) is |psi_{e_c, s}>.
inline Eigen::MatrixXcd tomography_basis() {
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(16, 16);
  const double r = 1 / std::sqrt(2.0);
  for (std::size_t c = 0; c < kErrorClasses; ++c) {
    const unsigned e = kClassPattern[c];
    for (int s = 0; s < 2; ++s) {
      const auto col = static_cast<Eigen::Index>(2 * c + static_cast<std::size_t>(s));
      basis(e, col) = r;
      basis(e ^ 0xFu, col) = s == 0 ? r : -r;
    }
  }
  return basis;
}

struct ErrorChannelReport {
  double fidelity = 0;
  double p_z = 0;
  double p_c1 = 0;
  double p_c2 = 0;
  double e_zeta = 0;
  double w_minus = 0;
  /// raw[c][0] and raw[c][1]: weight of |psi_{e_c,+}> and |psi_{e_c,->}.
  std::array<std::array<double, 2>, kErrorClasses> raw{};
  /// Class probabilities after moving s = -1 weight.
  std::array<double, kErrorClasses> classes{};
};

/// P_Z + 4 P_C1 + 2 P_C2.
inline double total_phase_flip_error(const ErrorChannelReport &r) { return r.p_z + 4 * r.p_c1 + 2 * r.p_c2; }

inline ErrorChannelReport error_tomography(const DensityMatrix &rho) {
  if (rho.dim() != 16) throw std::invalid_argument("error tomography needs a 4-qubit plaquette state");
  static const Eigen::MatrixXcd basis = tomography_basis();
  const Eigen::MatrixXcd &m = rho.matrix();
  ErrorChannelReport r;
  for (std::size_t c = 0; c < kErrorClasses; ++c) {
    for (int s = 0; s < 2; ++s) {
      const auto v = basis.col(static_cast<Eigen::Index>(2 * c + static_cast<std::size_t>(s)));
      r.raw[c][static_cast<std::size_t>(s)] = std::clamp(v.dot(m * v).real(), 0.0, 1.0);
    }
  }
  for (std::size_t c = 0; c < kErrorClasses; ++c) {
    r.classes[c] += r.raw[c][0];
    r.w_minus += r.raw[c][1];
    for (unsigned k = 0; k < 4; ++k) r.classes[error_class(kClassPattern[c] ^ (1u << k))] += r.raw[c][1] / 4;
  }
  r.fidelity = r.classes[0];
  r.p_z = (r.classes[1] + r.classes[2] + r.classes[3] + r.classes[4]) / 4;
  r.p_c1 = (r.classes[5] + r.classes[6]) / 2;
  r.p_c2 = r.classes[7];
  r.e_zeta = total_phase_flip_error(r);
  return r;
}

/// F + 4 P_Z + 2 P_C1 + P_C2, which is 1 for any state.
inline double tomography_total(const ErrorChannelReport &r) { return r.fidelity + 4 * r.p_z + 2 * r.p_c1 + r.p_c2; }

// ---------------------------------------------------------------------------
// Protocol pipeline

/// gibbs_state(H(lambda0), T), linear ramp to zero over tau, then tomography.
inline ErrorChannelReport run_point(double T, double lambda0, double tau, double J = 1.0,
                                    double tol = kAcceptanceTolerance) {
  const auto builder = plaquette_builder(J);
  const DensityMatrix rho0 = gibbs_state(models::build_plaquette_3d(J, lambda0).hamiltonian, T);
  return error_tomography(propagate(builder, linear_rampdown(lambda0, tau), rho0, tol));
}

/// Tomography of the initial Gibbs state, without any evolution.
inline ErrorChannelReport no_evolution_point(double T, double lambda0, double J = 1.0) {
  return error_tomography(gibbs_state(models::build_plaquette_3d(J, lambda0).hamiltonian, T));
}

/// Ramp outcome for every temperature at once: the propagator does not depend
/// on T, so the eigenvectors of H(lambda0) are evolved once and recombined
/// with Boltzmann weights.
class RampResponse {
 public:
  RampResponse(double lambda0, double tau, double J = 1.0, double tol = kAcceptanceTolerance)
      : spectrum_(eigh(to_dense(models::build_plaquette_3d(J, lambda0).hamiltonian))) {
    const auto prop = propagator(plaquette_builder(J), linear_rampdown(lambda0, tau), tol);
    evolved_ = prop.unitaries.back() * spectrum_.eigenvectors;
    steps_ = prop.steps;
  }

  DensityMatrix state(double T) const {
    const Eigen::MatrixXcd rho = mixture(evolved_, boltzmann_weights(spectrum_.eigenvalues, T));
    return DensityMatrix::from_matrix((rho + rho.adjoint()) / 2.0, 1e-8);
  }

  ErrorChannelReport report(double T) const { return error_tomography(state(T)); }
  std::size_t steps() const noexcept { return steps_; }

 private:
  Spectrum spectrum_;
  Eigen::MatrixXcd evolved_;
  std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Threshold temperatures

struct ThresholdOptions {
  double target = kErrorThreshold;
  double t_lo = 1e-4;
  double t_hi = 5.0;
  /// Log-spaced samples used to verify monotonicity before bisecting.
  int monotone_samples = 12;
  /// Required accuracy of E(T*) against the target.
  double value_tolerance = 1e-4;
};

/// Relative decrease of E(T) between monotonicity samples that is tolerated.
inline constexpr double kMonotoneSlack = 1e-6;

/// Temperature where the nondecreasing E(T) crosses the target, or nothing
/// when E exceeds the target at every sampled temperature.
inline std::optional<double> find_threshold(const std::function<double(double)> &error_at,
                                            const ThresholdOptions &opt = {}) {
  if (!(opt.t_lo > 0) || !(opt.t_hi > opt.t_lo)) throw std::invalid_argument("temperature bracket must satisfy 0 < lo < hi");
  const int n = std::max(opt.monotone_samples, 2);
  std::vector<double> temperatures, errors;
  for (int i = 0; i < n; ++i) {
    temperatures.push_back(opt.t_lo * std::pow(opt.t_hi / opt.t_lo, static_cast<double>(i) / (n - 1)));
    errors.push_back(error_at(temperatures.back()));
  }
  if (*std::min_element(errors.begin(), errors.end()) > opt.target) return std::nullopt;
  for (int i = 1; i < n; ++i) {
    if (errors[i] < errors[i - 1] * (1 - kMonotoneSlack)) {
      throw std::invalid_argument("phase-flip error is not monotone in T over the bracket (drops at T=" +
                                  std::to_string(temperatures[i]) + ")");
    }
  }
  if (errors.back() <= opt.target) throw std::invalid_argument("temperature bracket does not straddle the target");
  double lo = opt.t_lo, hi = opt.t_hi;
  for (int iter = 0; iter < 200 && hi / lo - 1 > 1e-10; ++iter) {
    const double mid = std::sqrt(lo * hi);
    (error_at(mid) <= opt.target ? lo : hi) = mid;
  }
  const double t_star = std::sqrt(lo * hi);
  const double miss = std::abs(error_at(t_star) - opt.target);
  if (miss > opt.value_tolerance) {
    throw NumericalError("threshold bisection ended " + std::to_string(miss) + " away from the target");
  }
  return t_star;
}

/// Highest initial temperature whose ramped state stays below the target.
inline std::optional<double> threshold_temperature(double lambda0, double tau, double J = 1.0,
                                                   const ThresholdOptions &opt = {},
                                                   double tol = kAcceptanceTolerance) {
  const RampResponse response(lambda0, tau, J, tol);
  return find_threshold([&](double T) { return response.report(T).e_zeta; }, opt);
}

/// Threshold for the initial Gibbs state itself.
inline std::optional<double> no_evolution_threshold(double lambda0, double J = 1.0, const ThresholdOptions &opt = {}) {
  const Spectrum spectrum = eigh(to_dense(models::build_plaquette_3d(J, lambda0).hamiltonian));
  return find_threshold([&](double T) { return error_tomography(gibbs_state(spectrum, T)).e_zeta; }, opt);
}

}  // namespace clusterprep::analysis
