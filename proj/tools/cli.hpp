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

// Command-line front end. Subcommands:
//
//   verify          exact commutation of a model with its stabilizers
//   spectrum        sector-labelled plaquette spectra along a coupling grid or
//                   a sequential switch-off path
//   evolve          one thermal ramp with a time series and an error report
//   sweep           error reports over a (tau, lambda0, T) grid
//   phase-diagram   threshold temperatures over a (tau, lambda0) grid
//
// Settings come from flags, then from an optional `--config FILE` holding
// `key = value` lines in per-command sections, then from defaults.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or I/O error,
// 3 numerical failure.

#pragma once

#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "clusterprep/clusterprep.hpp"

#ifndef CLUSTERPREP_VERSION
#define CLUSTERPREP_VERSION "0.0.0"
#endif

namespace clusterprep::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2, kNumericalFailure = 3 };

/// Failure carrying the process exit code.
class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string &message) : std::runtime_error(message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

inline constexpr std::size_t kDefaultGridCap = 100000;

// ---------------------------------------------------------------------------
// Formatting and parsing helpers

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  if (v == 0) v = 0;  // drop the sign of negative zero
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

inline double parse_double(const std::string &text, const std::string &what) {
  double v = 0;
  const char *end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, v);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(v)) {
    throw CliError(kUsageError, "invalid number '" + text + "' for " + what);
  }
  return v;
}

/// Comma-separated values; each item is a number or an inclusive linear range
/// `start:stop:count`.
inline std::vector<double> parse_grid(const std::string &text, const std::string &what) {
  std::vector<double> out;
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream fields(item);
    std::string field;
    while (std::getline(fields, field, ':')) parts.push_back(field);
    if (parts.size() == 1) {
      out.push_back(parse_double(parts[0], what));
    } else if (parts.size() == 3) {
      const double start = parse_double(parts[0], what), stop = parse_double(parts[1], what);
      const double count = parse_double(parts[2], what);
      if (count < 1 || count != std::floor(count) || count > 1e7) {
        throw CliError(kUsageError, "range count in '" + item + "' for " + what + " must be a positive integer");
      }
      const auto n = static_cast<std::size_t>(count);
      for (std::size_t i = 0; i < n; ++i) {
        out.push_back(n == 1 ? start
                             : i + 1 == n ? stop
                                          : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
      }
    } else {
      throw CliError(kUsageError, "malformed item '" + item + "' for " + what + " (use v or start:stop:count)");
    }
  }
  if (out.empty()) throw CliError(kUsageError, "empty value list for " + what);
  return out;
}

inline std::array<int, 4> parse_order(const std::string &text) {
  std::array<int, 4> order{};
  std::stringstream items(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(items, item, ',')) {
    if (k == 4) throw CliError(kUsageError, "--order takes four channel numbers");
    const double v = parse_double(item, "--order");
    order[k++] = static_cast<int>(v);
  }
  if (k != 4) throw CliError(kUsageError, "--order takes four channel numbers");
  return order;
}

/// Writes a file through a temporary sibling so a failure never leaves a
/// partial artifact at `path`.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path) : path_(std::move(path)), temp_(path_ + ".partial") {
    out_.open(temp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw CliError(kUsageError, "cannot write output file '" + path_ + "'");
  }
  AtomicFile(const AtomicFile &) = delete;
  AtomicFile &operator=(const AtomicFile &) = delete;
  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ignored;
      std::filesystem::remove(temp_, ignored);
    }
  }

  std::ostream &stream() { return out_; }

  void commit() {
    out_.close();
    if (!out_) throw CliError(kUsageError, "failed writing '" + path_ + "'");
    std::error_code ec;
    std::filesystem::rename(temp_, path_, ec);
    if (ec) throw CliError(kUsageError, "cannot move output into '" + path_ + "': " + ec.message());
    committed_ = true;
  }

 private:
  std::string path_;
  std::string temp_;
  std::ofstream out_;
  bool committed_ = false;
};

/// Sends CSV text to `path`, or to `fallback` when no path was given.
inline void emit(const std::string &path, const std::string &text, std::ostream &fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  AtomicFile file(path);
  file.stream() << text;
  file.commit();
}

/// Parallel map over [0, count) with results gathered by index. Once a task
/// fails no new tasks start, and the failure with the lowest index is
/// rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, std::size_t workers, F &&task) {
  std::vector<std::optional<R>> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto &t : pool) t.join();
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto &r : results) out.push_back(std::move(*r));
  return out;
}

inline std::string header_comment(const std::string &command, double J, const std::string &tol,
                                  const std::vector<std::pair<std::string, std::string>> &flags) {
  std::string line = "# clusterprep " CLUSTERPREP_VERSION " " + command + " J=" + format_double(J) + " tol=" + tol;
  for (const auto &[name, value] : flags) line += " --" + name + "=" + value;
  return line + "\n";
}

inline OperatorSum load_plaquette_file(const std::string &path) {
  try {
    const auto doc = hamlang::load_file(path);
    if (doc.op.num_qubits() != 4) throw CliError(kUsageError, "'" + path + "' must declare 4 qubits");
    return doc.op;
  } catch (const ParseError &e) {
    throw CliError(kUsageError, path + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw CliError(kUsageError, e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands

struct VerifyOptions {
  std::string model = "1d";
  std::size_t N = 4;
  std::size_t L1 = 2, L2 = 2, L = 2;
  double J = 1.0;
  double lambda = 0.3;
  std::string hamiltonian;
  std::vector<std::string> stabilizers;
};

inline int cmd_verify(const VerifyOptions &o, std::ostream &out) {
  OperatorSum h;
  std::vector<OperatorSum> stabilizers;
  std::string label;
  if (!o.hamiltonian.empty()) {
    try {
      h = hamlang::load_file(o.hamiltonian).op;
      for (const auto &path : o.stabilizers) stabilizers.push_back(hamlang::load_file(path).op);
    } catch (const std::exception &e) {
      throw CliError(kUsageError, e.what());
    }
    if (stabilizers.empty()) throw CliError(kUsageError, "--hamiltonian needs at least one --stabilizer file");
    label = "file " + o.hamiltonian;
  } else {
    models::Model m;
    if (o.model == "1d") {
      m = models::build_chain_1d(o.N, o.J, o.lambda);
      label = "1d N=" + std::to_string(o.N);
    } else if (o.model == "2d") {
      m = models::build_lattice_2d(o.L1, o.L2, o.J, o.lambda);
      label = "2d L1=" + std::to_string(o.L1) + " L2=" + std::to_string(o.L2);
    } else if (o.model == "3d") {
      m = models::build_plaquette_3d(o.J, o.lambda);
      label = "3d plaquette";
    } else if (o.model == "3d-lattice") {
      m = models::build_lattice_3d(o.L, o.J, o.lambda);
      label = "3d lattice L=" + std::to_string(o.L);
    } else {
      throw CliError(kUsageError, "unknown model '" + o.model + "'");
    }
    h = m.hamiltonian;
    stabilizers = m.stabilizers;
    label += " J=" + format_double(o.J) + " lambda=" + format_double(o.lambda);
  }
  out << "model " << label << " qubits=" << h.num_qubits() << " terms=" << h.size() << "\n";
  std::size_t failures = 0;
  for (std::size_t j = 0; j < stabilizers.size(); ++j) {
    if (stabilizers[j].num_qubits() != h.num_qubits()) {
      throw CliError(kUsageError, "stabilizer " + std::to_string(j) + " has the wrong qubit count");
    }
    const auto check = commutator_is_zero(h, stabilizers[j]);
    out << "stabilizer " << j << " residual " << format_double(check.residual_norm) << "\n";
    failures += check.is_zero ? 0 : 1;
  }
  if (failures == 0) {
    out << "all " << stabilizers.size() << " stabilizers commute exactly\n";
    return kSuccess;
  }
  out << failures << " of " << stabilizers.size() << " stabilizers fail to commute\n";
  return kVerificationFailure;
}

struct SpectrumOptions {
  std::string model = "3d";
  std::string lambda_grid = "0:2.5:101";
  std::string path;
  std::string order = "1,2,3,4";
  double lambda_init = 2.0;
  double tau_each = 1.0;
  std::size_t samples = 201;
  double J = 1.0;
  std::string hamiltonian;
  std::string out;
};

inline std::string spectrum_csv(const analysis::SectorSpectrumTable &table) {
  std::string csv = "lambda_or_time,level,energy,sector,gap_global,gap_sector\n";
  for (const auto &r : table.rows) {
    csv += format_double(r.x) + "," + std::to_string(r.level) + "," + format_double(r.energy) + "," +
           (r.sector > 0 ? "1" : "-1") + "," + format_double(r.gap_global) + "," + format_double(r.gap_sector) + "\n";
  }
  return csv;
}

inline int cmd_spectrum(const SpectrumOptions &o, std::ostream &out) {
  if (o.model != "3d") throw CliError(kUsageError, "spectrum supports --model 3d (the plaquette) only");
  analysis::SectorSpectrumTable table;
  std::vector<std::pair<std::string, std::string>> flags{{"model", o.model}};
  if (!o.hamiltonian.empty()) {
    analysis::detail::append_point(table, 0.0, load_plaquette_file(o.hamiltonian));
    flags.emplace_back("hamiltonian", o.hamiltonian);
  } else if (o.path.empty()) {
    table = analysis::spectrum_scan(o.J, parse_grid(o.lambda_grid, "--lambda-grid"));
    flags.emplace_back("lambda-grid", o.lambda_grid);
  } else if (o.path == "sequential") {
    if (o.samples < 2) throw CliError(kUsageError, "--samples must be at least 2");
    const auto schedule = sequential_switchoff(o.lambda_init, o.tau_each, parse_order(o.order));
    table = analysis::spectrum_path(schedule, o.J, o.samples);
    flags.insert(flags.end(), {{"path", o.path},
                               {"order", o.order},
                               {"lambda-init", format_double(o.lambda_init)},
                               {"tau-each", format_double(o.tau_each)},
                               {"samples", std::to_string(o.samples)}});
  } else {
    throw CliError(kUsageError, "unknown --path '" + o.path + "' (expected 'sequential')");
  }
  emit(o.out, header_comment("spectrum", o.J, "none", flags) + spectrum_csv(table), out);
  if (!o.out.empty() && o.out != "-") {
    out << "wrote " << table.rows.size() << " rows to " << o.out << "\n";
    out << "min_sector_gap = " << format_double(table.min_sector_gap) << "\n";
  }
  return kSuccess;
}

struct EvolveOptions {
  double T = 0.0;
  double lambda0 = 2.5;
  double tau = 10.0;
  double J = 1.0;
  double tol = analysis::kAcceptanceTolerance;
  std::size_t samples = 11;
  std::string hamiltonian;
  std::string out;
};

inline void write_report(std::ostream &out, const analysis::ErrorChannelReport &r) {
  out << "fidelity = " << format_double(r.fidelity) << "\n";
  out << "p_z = " << format_double(r.p_z) << "\n";
  out << "p_c1 = " << format_double(r.p_c1) << "\n";
  out << "p_c2 = " << format_double(r.p_c2) << "\n";
  out << "w_minus = " << format_double(r.w_minus) << "\n";
  out << "e_zeta = " << format_double(r.e_zeta) << "\n";
  out << "below_threshold = " << (r.e_zeta <= analysis::kErrorThreshold ? "true" : "false") << "\n";
}

inline int cmd_evolve(const EvolveOptions &o, std::ostream &out) {
  if (!(o.T >= 0)) throw CliError(kUsageError, "--T must be >= 0");
  if (!(o.lambda0 > 0)) throw CliError(kUsageError, "--lambda0 must be positive");
  if (!(o.tau > 0)) throw CliError(kUsageError, "--tau must be positive");
  if (!(o.tol > 0)) throw CliError(kUsageError, "--tol must be positive");
  if (o.samples < 2) throw CliError(kUsageError, "--samples must be at least 2");
  const OperatorSum initial =
      o.hamiltonian.empty() ? models::build_plaquette_3d(o.J, o.lambda0).hamiltonian : load_plaquette_file(o.hamiltonian);
  const DensityMatrix rho0 = gibbs_state(initial, o.T);
  const Schedule schedule = linear_rampdown(o.lambda0, o.tau);
  std::vector<double> times;
  for (std::size_t k = 1; k < o.samples; ++k) {
    times.push_back(k + 1 == o.samples ? o.tau : o.tau * static_cast<double>(k) / static_cast<double>(o.samples - 1));
  }
  const auto path = propagate_trajectory(analysis::plaquette_builder(o.J), schedule, rho0, o.tol, times);

  const Eigen::VectorXcd ghz = analysis::ghz(+1);
  const Eigen::MatrixXcd w = analysis::plaquette_stabilizer_matrix();
  const Eigen::MatrixXcd minus = (Eigen::MatrixXcd::Identity(16, 16) - w) / 2.0;
  std::string csv = header_comment("evolve", o.J, format_double(o.tol),
                                   {{"T", format_double(o.T)},
                                    {"lambda0", format_double(o.lambda0)},
                                    {"tau", format_double(o.tau)},
                                    {"samples", std::to_string(o.samples)},
                                    {"hamiltonian", o.hamiltonian.empty() ? "builtin" : o.hamiltonian}});
  csv += "t,lambda,fidelity,w_plus,w_minus\n";
  auto row = [&](double t, const DensityMatrix &rho) {
    const double wm = rho.expectation(minus);
    csv += format_double(t) + "," + format_double(schedule.values(t)[0]) + "," + format_double(rho.fidelity(ghz)) +
           "," + format_double(1 - wm) + "," + format_double(wm) + "\n";
  };
  row(0.0, rho0);
  for (const auto &p : path) row(p.time, p.state);
  if (!o.out.empty()) emit(o.out, csv, out);
  write_report(out, analysis::error_tomography(path.back().state));
  return kSuccess;
}

struct SweepOptions {
  std::string T;
  std::string lambda0;
  std::string tau;
  double J = 1.0;
  double tol = analysis::kAcceptanceTolerance;
  std::size_t workers = 0;
  std::size_t cap = kDefaultGridCap;
  std::string out;
};

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void check_grid_size(std::size_t size, std::size_t cap) {
  if (size > cap) {
    throw CliError(kUsageError, "grid has " + std::to_string(size) + " points, above the cap of " + std::to_string(cap));
  }
}

inline int cmd_sweep(const SweepOptions &o, std::ostream &out) {
  const auto temperatures = parse_grid(o.T, "--T");
  const auto lambdas = parse_grid(o.lambda0, "--lambda0");
  const auto taus = parse_grid(o.tau, "--tau");
  for (double t : temperatures) {
    if (!(t >= 0)) throw CliError(kUsageError, "temperatures must be >= 0");
  }
  for (double l : lambdas) {
    if (!(l > 0)) throw CliError(kUsageError, "lambda0 values must be positive");
  }
  for (double t : taus) {
    if (!(t > 0)) throw CliError(kUsageError, "tau values must be positive");
  }
  if (!(o.tol > 0)) throw CliError(kUsageError, "--tol must be positive");
  check_grid_size(temperatures.size() * lambdas.size() * taus.size(), o.cap);

  // One task per (tau, lambda0): the ramp is independent of T.
  const std::size_t pairs = taus.size() * lambdas.size();
  const auto blocks = parallel_map<std::vector<analysis::ErrorChannelReport>>(
      pairs, resolve_workers(o.workers), [&](std::size_t i) {
        const analysis::RampResponse response(lambdas[i % lambdas.size()], taus[i / lambdas.size()], o.J, o.tol);
        std::vector<analysis::ErrorChannelReport> reports;
        for (double T : temperatures) reports.push_back(response.report(T));
        return reports;
      });

  std::string csv = header_comment("sweep", o.J, format_double(o.tol),
                                   {{"T", o.T}, {"lambda0", o.lambda0}, {"tau", o.tau}, {"cap", std::to_string(o.cap)}});
  csv += "tau,lambda0,T,fidelity,p_z,p_c1,p_c2,w_minus,e_zeta\n";
  for (std::size_t i = 0; i < pairs; ++i) {
    for (std::size_t k = 0; k < temperatures.size(); ++k) {
      const auto &r = blocks[i][k];
      csv += format_double(taus[i / lambdas.size()]) + "," + format_double(lambdas[i % lambdas.size()]) + "," +
             format_double(temperatures[k]) + "," + format_double(r.fidelity) + "," + format_double(r.p_z) + "," +
             format_double(r.p_c1) + "," + format_double(r.p_c2) + "," + format_double(r.w_minus) + "," +
             format_double(r.e_zeta) + "\n";
    }
  }
  emit(o.out, csv, out);
  return kSuccess;
}

struct PhaseDiagramOptions {
  std::string tau;
  std::string lambda0;
  double t_lo = 1e-4;
  double t_hi = 5.0;
  double target = analysis::kErrorThreshold;
  double J = 1.0;
  double tol = analysis::kAcceptanceTolerance;
  bool no_evolution = false;
  std::size_t workers = 0;
  std::size_t cap = kDefaultGridCap;
  std::string out;
};

inline int cmd_phase_diagram(const PhaseDiagramOptions &o, std::ostream &out, std::ostream &err) {
  const auto taus = parse_grid(o.tau, "--tau");
  const auto lambdas = parse_grid(o.lambda0, "--lambda0");
  for (double l : lambdas) {
    if (!(l > 0)) throw CliError(kUsageError, "lambda0 values must be positive");
  }
  for (double t : taus) {
    if (!(t > 0)) throw CliError(kUsageError, "tau values must be positive");
  }
  if (!(o.t_lo > 0) || !(o.t_hi > o.t_lo)) throw CliError(kUsageError, "need 0 < --T-lo < --T-hi");
  if (!(o.target > 0)) throw CliError(kUsageError, "--target must be positive");
  check_grid_size(taus.size() * lambdas.size(), o.cap);

  analysis::ThresholdOptions topt;
  topt.t_lo = o.t_lo;
  topt.t_hi = o.t_hi;
  topt.target = o.target;
  auto guarded = [](auto &&f) -> std::optional<double> {
    try {
      return f();
    } catch (const std::invalid_argument &e) {
      throw NumericalError(e.what());
    }
  };

  const std::size_t pairs = taus.size() * lambdas.size();
  const auto evolved = parallel_map<std::optional<double>>(pairs, resolve_workers(o.workers), [&](std::size_t i) {
    const double lambda0 = lambdas[i % lambdas.size()], tau = taus[i / lambdas.size()];
    return guarded([&] { return analysis::threshold_temperature(lambda0, tau, o.J, topt, o.tol); });
  });
  std::vector<std::optional<double>> still;
  if (o.no_evolution) {
    still = parallel_map<std::optional<double>>(lambdas.size(), resolve_workers(o.workers), [&](std::size_t i) {
      return guarded([&] { return analysis::no_evolution_threshold(lambdas[i], o.J, topt); });
    });
  }

  auto cell = [](const std::optional<double> &v) { return v ? format_double(*v) : std::string(); };
  std::string csv = header_comment("phase-diagram", o.J, format_double(o.tol),
                                   {{"tau", o.tau},
                                    {"lambda0", o.lambda0},
                                    {"T-lo", format_double(o.t_lo)},
                                    {"T-hi", format_double(o.t_hi)},
                                    {"target", format_double(o.target)},
                                    {"no-evolution", o.no_evolution ? "true" : "false"},
                                    {"cap", std::to_string(o.cap)}});
  csv += o.no_evolution ? "tau,lambda0,T_star,T_star_no_evolution\n" : "tau,lambda0,T_star\n";
  std::size_t found = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    found += evolved[i].has_value();
    csv += format_double(taus[i / lambdas.size()]) + "," + format_double(lambdas[i % lambdas.size()]) + "," +
           cell(evolved[i]);
    if (o.no_evolution) csv += "," + cell(still[i % lambdas.size()]);
    csv += "\n";
  }
  emit(o.out, csv, out);
  if (found == 0) err << "warning: no threshold temperature inside the bracket for any grid point\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Adiabatic cluster-state preparation: models, spectra, thermal ramps and error analysis."};
  app.set_version_flag("--version", CLUSTERPREP_VERSION);
  app.set_config("--config", "", "Read 'key = value' settings (sections per command) from FILE");
  app.require_subcommand(1, 1);

  VerifyOptions vo;
  auto *verify = app.add_subcommand("verify", "Check that every stabilizer commutes exactly with the Hamiltonian");
  verify->add_option("--model", vo.model, "1d, 2d, 3d (plaquette) or 3d-lattice")
      ->check(CLI::IsMember({"1d", "2d", "3d", "3d-lattice"}))
      ->capture_default_str();
  verify->add_option("--N", vo.N, "Logical qubits of the 1D chain (>= 3)")->capture_default_str();
  verify->add_option("--L1", vo.L1, "2D torus extent along e1")->capture_default_str();
  verify->add_option("--L2", vo.L2, "2D torus extent along e2")->capture_default_str();
  verify->add_option("--L", vo.L, "3D lattice edge length")->capture_default_str();
  verify->add_option("--J", vo.J, "Ring coupling J")->capture_default_str();
  verify->add_option("--lambda", vo.lambda, "Inter-logical coupling")->capture_default_str();
  verify->add_option("--hamiltonian", vo.hamiltonian, "Operator file (.pham) instead of a built-in model");
  verify->add_option("--stabilizer", vo.stabilizers, "Stabilizer file (.pham); repeatable");

  SpectrumOptions so;
  auto *spectrum = app.add_subcommand("spectrum", "Sector-labelled plaquette spectrum as CSV");
  spectrum->add_option("--model", so.model, "Model (3d plaquette)")->capture_default_str();
  spectrum->add_option("--lambda-grid", so.lambda_grid, "Couplings: values or start:stop:count")->capture_default_str();
  spectrum->add_option("--path", so.path, "Use a switch-off path instead of a grid ('sequential')");
  spectrum->add_option("--order", so.order, "Switch-off order of the four couplings")->capture_default_str();
  spectrum->add_option("--lambda-init", so.lambda_init, "Initial coupling on the path")->capture_default_str();
  spectrum->add_option("--tau-each", so.tau_each, "Duration of each path segment")->capture_default_str();
  spectrum->add_option("--samples", so.samples, "Path samples")->capture_default_str();
  spectrum->add_option("--J", so.J, "Ring coupling J")->capture_default_str();
  spectrum->add_option("--hamiltonian", so.hamiltonian, "4-qubit operator file (.pham) to label instead");
  spectrum->add_option("--out", so.out, "CSV output path (stdout when omitted)");

  EvolveOptions eo;
  auto *evolve = app.add_subcommand("evolve", "Ramp one thermal plaquette state and report its errors");
  evolve->add_option("--T", eo.T, "Initial temperature")->capture_default_str();
  evolve->add_option("--lambda0", eo.lambda0, "Initial coupling")->capture_default_str();
  evolve->add_option("--tau", eo.tau, "Ramp duration")->capture_default_str();
  evolve->add_option("--J", eo.J, "Ring coupling J")->capture_default_str();
  evolve->add_option("--tol", eo.tol, "Integrator tolerance")->capture_default_str();
  evolve->add_option("--samples", eo.samples, "Time-series points including t=0")->capture_default_str();
  evolve->add_option("--hamiltonian", eo.hamiltonian, "4-qubit operator file (.pham) defining the initial state");
  evolve->add_option("--out", eo.out, "Time-series CSV path");

  SweepOptions wo;
  auto *sweep = app.add_subcommand("sweep", "Error reports over a (tau, lambda0, T) grid as CSV");
  sweep->add_option("--T", wo.T, "Temperatures: values or start:stop:count")->required();
  sweep->add_option("--lambda0", wo.lambda0, "Initial couplings")->required();
  sweep->add_option("--tau", wo.tau, "Ramp durations")->required();
  sweep->add_option("--J", wo.J, "Ring coupling J")->capture_default_str();
  sweep->add_option("--tol", wo.tol, "Integrator tolerance")->capture_default_str();
  sweep->add_option("--workers", wo.workers, "Worker threads (0: one per core)")->capture_default_str();
  sweep->add_option("--cap", wo.cap, "Largest allowed grid")->capture_default_str();
  sweep->add_option("--out", wo.out, "CSV output path (stdout when omitted)");

  PhaseDiagramOptions po;
  auto *phase = app.add_subcommand("phase-diagram", "Threshold temperatures over a (tau, lambda0) grid as CSV");
  phase->add_option("--tau", po.tau, "Ramp durations")->required();
  phase->add_option("--lambda0", po.lambda0, "Initial couplings")->required();
  phase->add_option("--T-lo", po.t_lo, "Lower end of the temperature bracket")->capture_default_str();
  phase->add_option("--T-hi", po.t_hi, "Upper end of the temperature bracket")->capture_default_str();
  phase->add_option("--target", po.target, "Error threshold on E_zeta")->capture_default_str();
  phase->add_option("--J", po.J, "Ring coupling J")->capture_default_str();
  phase->add_option("--tol", po.tol, "Integrator tolerance")->capture_default_str();
  phase->add_flag("--no-evolution", po.no_evolution, "Add thresholds of the unevolved Gibbs state");
  phase->add_option("--workers", po.workers, "Worker threads (0: one per core)")->capture_default_str();
  phase->add_option("--cap", po.cap, "Largest allowed grid")->capture_default_str();
  phase->add_option("--out", po.out, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*verify) return cmd_verify(vo, out);
    if (*spectrum) return cmd_spectrum(so, out);
    if (*evolve) return cmd_evolve(eo, out);
    if (*sweep) return cmd_sweep(wo, out);
    if (*phase) return cmd_phase_diagram(po, out, err);
  } catch (const CliError &e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const NumericalError &e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::out_of_range &e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace clusterprep::cli
