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

// Two-body spin-1/2 Hamiltonians whose conserved quantities are cluster-state
// stabilizers of logical qubits, each logical qubit being a ring of physical
// spins with ferromagnetic ZZ bonds.
//
// Physical qubit m of logical qubit j lives at flat index
// physical_per_logical * j + m. All indices below are zero-based; labels
// "1..4" used in diagrams correspond to m = 0..3.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clusterprep/pauli.hpp"

namespace clusterprep::models {

enum class ModelKind { chain1d, lattice2d, plaquette3d, lattice3d };

inline const char *kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::chain1d:
      return "chain1d";
    case ModelKind::lattice2d:
      return "lattice2d";
    case ModelKind::plaquette3d:
      return "plaquette3d";
    case ModelKind::lattice3d:
      return "lattice3d";
  }
  return "?";
}

struct ModelInstance {
  ModelKind kind;
  std::size_t logical_qubits;
  std::size_t physical_per_logical;
  double J;
  /// A single uniform coupling, or one per physical qubit (plaquette3d).
  std::vector<double> couplings;
  /// Torus extents for lattice2d; edge length for lattice3d (in extent1).
  std::size_t extent1 = 0;
  std::size_t extent2 = 0;

  std::size_t num_qubits() const noexcept { return logical_qubits * physical_per_logical; }

  /// Flat index of physical qubit m of logical qubit j.
  std::size_t qubit(std::size_t logical, std::size_t m) const {
    if (logical >= logical_qubits || m >= physical_per_logical) throw std::out_of_range("no such physical qubit");
    return physical_per_logical * logical + m;
  }
};

using Bond = std::pair<std::size_t, std::size_t>;

struct Model {
  ModelInstance instance;
  OperatorSum hamiltonian;
  /// Conserved cluster-state stabilizers, one per logical qubit.
  std::vector<OperatorSum> stabilizers;
  /// Inter-logical bonds carrying a CZ in the stabilizer frame (lattice3d only).
  std::vector<Bond> cz_bonds;
};

namespace detail {

inline void check_coupling(double J, double lambda) {
  if (!(J > 0) || !std::isfinite(J)) throw std::invalid_argument("coupling J must be positive and finite");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("coupling lambda must be >= 0 and finite");
}

inline std::size_t wrap(long long i, std::size_t n) {
  const long long m = static_cast<long long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

class TermList {
 public:
  explicit TermList(std::size_t n) : n_(n) {}

  void add(double c, std::initializer_list<std::pair<std::size_t, Pauli>> factors) {
    terms_.push_back({c, PauliString::from_factors(n_, factors)});
  }

  OperatorSum build() && { return OperatorSum::from_terms(n_, std::move(terms_)); }

 private:
  std::size_t n_;
  std::vector<PauliTerm<double>> terms_;
};

}  // namespace detail

/// W_j = X_{j,1} X_{j,2} Z_{j-1,2} Z_{j+1,1} on the periodic chain.
inline std::vector<OperatorSum> stabilizers_1d(const ModelInstance &instance) {
  if (instance.kind != ModelKind::chain1d) throw std::invalid_argument("stabilizers_1d needs a chain1d instance");
  const std::size_t N = instance.logical_qubits;
  std::vector<OperatorSum> out;
  for (std::size_t j = 0; j < N; ++j) {
    detail::TermList w(instance.num_qubits());
    w.add(1.0, {{instance.qubit(j, 0), Pauli::X},
                {instance.qubit(j, 1), Pauli::X},
                {instance.qubit(detail::wrap(static_cast<long long>(j) - 1, N), 1), Pauli::Z},
                {instance.qubit(detail::wrap(static_cast<long long>(j) + 1, N), 0), Pauli::Z}});
    out.push_back(std::move(w).build());
  }
  return out;
}

/// One-dimensional Kitaev chain of N logical qubits (2N spins, periodic):
///   H = -J sum_j Z_{j,1} Z_{j,2} - lambda sum_j (X_{j,1} X_{j-2,2} + Y_{j,1} Y_{j-1,2}).
inline Model build_chain_1d(std::size_t N, double J, double lambda) {
  if (N < 3) throw std::invalid_argument("chain1d needs N >= 3 logical qubits");
  detail::check_coupling(J, lambda);
  ModelInstance inst{ModelKind::chain1d, N, 2, J, {lambda}};
  detail::TermList h(inst.num_qubits());
  for (std::size_t j = 0; j < N; ++j) {
    const long long sj = static_cast<long long>(j);
    h.add(-J, {{inst.qubit(j, 0), Pauli::Z}, {inst.qubit(j, 1), Pauli::Z}});
    h.add(-lambda, {{inst.qubit(j, 0), Pauli::X}, {inst.qubit(detail::wrap(sj - 2, N), 1), Pauli::X}});
    h.add(-lambda, {{inst.qubit(j, 0), Pauli::Y}, {inst.qubit(detail::wrap(sj - 1, N), 1), Pauli::Y}});
  }
  Model model{inst, std::move(h).build(), {}, {}};
  model.stabilizers = stabilizers_1d(inst);
  return model;
}

/// Two-dimensional Kitaev-like model on an L1 x L2 torus of logical qubits.
///
/// Each logical qubit j is a 4-ring; spin m faces direction +e2, +e1, -e2, -e1
/// for m = 0..3, and nb(j, m) is the spin of the neighbouring logical qubit
/// facing back, (j + dir(m), m + 2 mod 4). Bonds:
///   * blue (YY): every facing pair nb(j, 0) - (j, 0) and nb(j, 1) - (j, 1);
///   * red (XX): the four spins Z-coupled by W_j, paired around the corners as
///     nb(j, 0) - nb(j, 1) and nb(j, 2) - nb(j, 3).
/// W_j = prod_m X_{j,m} prod_m Z_{nb(j,m)} commutes with every bond.
inline Model build_lattice_2d(std::size_t L1, std::size_t L2, double J, double lambda) {
  if (L1 < 2 || L2 < 2) {
    throw std::invalid_argument("lattice2d needs L1, L2 >= 2 to place all bonds without duplication");
  }
  detail::check_coupling(J, lambda);
  ModelInstance inst{ModelKind::lattice2d, L1 * L2, 4, J, {lambda}, L1, L2};
  const auto logical = [&](long long a, long long b) { return detail::wrap(a, L1) + L1 * detail::wrap(b, L2); };
  // Neighbour spin facing (j, m).
  const auto nb = [&](std::size_t a, std::size_t b, std::size_t m) {
    static constexpr int da[] = {0, 1, 0, -1};
    static constexpr int db[] = {1, 0, -1, 0};
    const auto sa = static_cast<long long>(a), sb = static_cast<long long>(b);
    return inst.qubit(logical(sa + da[m], sb + db[m]), (m + 2) % 4);
  };

  detail::TermList h(inst.num_qubits());
  std::vector<OperatorSum> stabilizers;
  for (std::size_t b = 0; b < L2; ++b) {
    for (std::size_t a = 0; a < L1; ++a) {
      const std::size_t j = logical(static_cast<long long>(a), static_cast<long long>(b));
      for (std::size_t m = 0; m < 4; ++m) {
        h.add(-J, {{inst.qubit(j, m), Pauli::Z}, {inst.qubit(j, (m + 1) % 4), Pauli::Z}});
      }
      h.add(-lambda, {{inst.qubit(j, 0), Pauli::Y}, {nb(a, b, 0), Pauli::Y}});
      h.add(-lambda, {{inst.qubit(j, 1), Pauli::Y}, {nb(a, b, 1), Pauli::Y}});
      h.add(-lambda, {{nb(a, b, 0), Pauli::X}, {nb(a, b, 1), Pauli::X}});
      h.add(-lambda, {{nb(a, b, 2), Pauli::X}, {nb(a, b, 3), Pauli::X}});

      detail::TermList w(inst.num_qubits());
      w.add(1.0, {{inst.qubit(j, 0), Pauli::X},
                  {inst.qubit(j, 1), Pauli::X},
                  {inst.qubit(j, 2), Pauli::X},
                  {inst.qubit(j, 3), Pauli::X},
                  {nb(a, b, 0), Pauli::Z},
                  {nb(a, b, 1), Pauli::Z},
                  {nb(a, b, 2), Pauli::Z},
                  {nb(a, b, 3), Pauli::Z}});
      stabilizers.push_back(std::move(w).build());
    }
  }
  return Model{inst, std::move(h).build(), std::move(stabilizers), {}};
}

/// W^loc = X (x) X (x) X (x) X on one plaquette.
inline OperatorSum stabilizer_3d_local() {
  return OperatorSum::single(1.0, PauliString::from_text("XXXX"));
}

using PlaquetteCouplings = std::array<double, 4>;

/// One 4-spin plaquette of the 3D model in the CZ frame:
///   H = -J sum_m Z_m Z_{m+1} - sum_m lambda_m X_m,
/// where lambda_m couples the plaquette to its neighbouring logical qubit m.
inline Model build_plaquette_3d(double J, const PlaquetteCouplings &lambda) {
  for (double l : lambda) detail::check_coupling(J, l);
  ModelInstance inst{ModelKind::plaquette3d, 1, 4, J, {lambda.begin(), lambda.end()}};
  detail::TermList h(4);
  for (std::size_t m = 0; m < 4; ++m) {
    h.add(-J, {{m, Pauli::Z}, {(m + 1) % 4, Pauli::Z}});
    h.add(-lambda[m], {{m, Pauli::X}});
  }
  return Model{inst, std::move(h).build(), {stabilizer_3d_local()}, {}};
}

inline Model build_plaquette_3d(double J, double lambda) {
  return build_plaquette_3d(J, PlaquetteCouplings{lambda, lambda, lambda, lambda});
}

/// Conjugation by CZ on every listed bond: on bond (a, b),
/// X_a -> X_a Z_b, Y_a -> Y_a Z_b, Z_a -> Z_a, and symmetrically for b.
inline PauliString cz_conjugate(const PauliString &p, const std::vector<Bond> &bonds) {
  const std::size_t n = p.num_qubits();
  std::vector<std::vector<std::size_t>> partners(n);
  for (auto [a, b] : bonds) {
    if (a >= n || b >= n || a == b) {
      throw std::invalid_argument("invalid CZ bond (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    partners[a].push_back(b);
    partners[b].push_back(a);
  }
  PauliString image(n);
  image.set_phase(p.phase());
  for (std::size_t q : p.support()) {
    const Pauli letter = p.letter(q);
    PauliString factor(n);
    factor.set(q, letter);
    if (letter == Pauli::X || letter == Pauli::Y) {
      for (std::size_t r : partners[q]) factor = multiply(factor, single_qubit_string(n, r, Pauli::Z));
    }
    image = multiply(image, factor);
  }
  return image;
}

inline OperatorSum cz_conjugate(const OperatorSum &op, const std::vector<Bond> &bonds) {
  std::vector<PauliTerm<double>> terms;
  terms.reserve(op.size());
  for (const auto &t : op.terms()) terms.push_back({t.coefficient, cz_conjugate(t.string, bonds)});
  return OperatorSum::from_terms(op.num_qubits(), std::move(terms));
}

/// Original-frame 3D model on a periodic L x L x L cubic lattice. Logical
/// qubits sit on every face and every edge; each face borders four edges and
/// each edge four faces, and spin m of a logical qubit is bonded to the spin of
/// its m-th neighbour that faces back:
///   H = sum_j [-J sum_ring Z Z - lambda sum_m X_{(j,m)} Z_{nb(j,m)}],
///   W_j = prod_m X_{(j,m)} Z_{nb(j,m)}.
/// CZ on every bond maps H to a sum of independent plaquettes and W_j to W^loc.
inline Model build_lattice_3d(std::size_t L, double J, double lambda) {
  if (L < 2) throw std::invalid_argument("lattice3d needs L >= 2");
  detail::check_coupling(J, lambda);
  const std::size_t vertices = L * L * L;
  ModelInstance inst{ModelKind::lattice3d, 6 * vertices, 4, J, {lambda}, L, L};

  using Vertex = std::array<long long, 3>;
  const auto vid = [&](Vertex v) {
    return detail::wrap(v[0], L) + L * (detail::wrap(v[1], L) + L * detail::wrap(v[2], L));
  };
  const auto shift = [](Vertex v, std::size_t axis, long long d) {
    v[axis] += d;
    return v;
  };
  const auto edge = [&](Vertex v, std::size_t axis) { return 3 * vid(v) + axis; };
  const auto face = [&](Vertex v, std::size_t normal) { return 3 * vertices + 3 * vid(v) + normal; };

  // Neighbour lists in ring order.
  std::vector<std::array<std::size_t, 4>> neighbours(inst.logical_qubits);
  for (std::size_t z = 0; z < L; ++z) {
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t x = 0; x < L; ++x) {
        const Vertex v{static_cast<long long>(x), static_cast<long long>(y), static_cast<long long>(z)};
        for (std::size_t a = 0; a < 3; ++a) {
          const std::size_t b = (a + 1) % 3, c = (a + 2) % 3;
          neighbours[face(v, a)] = {edge(v, b), edge(shift(v, b, 1), c), edge(shift(v, c, 1), b), edge(v, c)};
          neighbours[edge(v, a)] = {face(v, b), face(v, c), face(shift(v, c, -1), b), face(shift(v, b, -1), c)};
        }
      }
    }
  }

  std::vector<Bond> bonds;
  std::vector<std::size_t> partner(inst.num_qubits());
  for (std::size_t j = 0; j < inst.logical_qubits; ++j) {
    for (std::size_t m = 0; m < 4; ++m) {
      const std::size_t k = neighbours[j][m];
      const auto &back = neighbours[k];
      const auto slot = static_cast<std::size_t>(std::find(back.begin(), back.end(), j) - back.begin());
      if (slot == 4) throw std::logic_error("lattice3d neighbour lists are not symmetric");
      partner[inst.qubit(j, m)] = inst.qubit(k, slot);
      if (j < k) bonds.emplace_back(inst.qubit(j, m), inst.qubit(k, slot));
    }
  }

  detail::TermList h(inst.num_qubits());
  std::vector<OperatorSum> stabilizers;
  for (std::size_t j = 0; j < inst.logical_qubits; ++j) {
    PauliString w(inst.num_qubits());
    for (std::size_t m = 0; m < 4; ++m) {
      const std::size_t q = inst.qubit(j, m);
      h.add(-J, {{q, Pauli::Z}, {inst.qubit(j, (m + 1) % 4), Pauli::Z}});
      h.add(-lambda, {{q, Pauli::X}, {partner[q], Pauli::Z}});
      w.set(q, Pauli::X);
      w.set(partner[q], Pauli::Z);
    }
    stabilizers.push_back(OperatorSum::single(1.0, std::move(w)));
  }
  return Model{inst, std::move(h).build(), std::move(stabilizers), std::move(bonds)};
}

/// Closed-form gaps in units of J:
///   chain1d:     2J - 4 lambda, valid for lambda < J/2;
///   lattice2d:   lambda^6 / (768 J^5), sixth-order perturbative estimate;
///   plaquette3d: 2 sqrt(2J^2 + 2 lambda^2 + 2 sqrt(J^4 + lambda^4))
///                - 2 sqrt(J^2 + lambda^2) - 2J.
inline double gap_closed_form(ModelKind kind, double J, double lambda) {
  detail::check_coupling(J, lambda);
  switch (kind) {
    case ModelKind::chain1d:
      if (lambda >= J / 2) throw std::invalid_argument("chain1d gap formula needs lambda < J/2");
      return 2 * J - 4 * lambda;
    case ModelKind::lattice2d:
      return std::pow(lambda, 6) / (768 * std::pow(J, 5));
    case ModelKind::plaquette3d:
    case ModelKind::lattice3d: {
      const double J2 = J * J, l2 = lambda * lambda;
      return 2 * std::sqrt(2 * J2 + 2 * l2 + 2 * std::sqrt(J2 * J2 + l2 * l2)) - 2 * std::sqrt(J2 + l2) - 2 * J;
    }
  }
  throw std::invalid_argument("unknown model kind");
}

}  // namespace clusterprep::models
