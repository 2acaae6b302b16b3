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
#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace clusterprep {

using cd = std::complex<double>;

/// Largest register realized as a dense 2^n x 2^n matrix.
inline constexpr std::size_t kDefaultDenseLimit = 12;
/// Largest register accepted by the matrix-free state-vector paths.
inline constexpr std::size_t kSparseLimit = 24;
/// Coefficients below this magnitude are dropped after merging.
inline constexpr double kZeroCoefficient = 1e-14;

enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char pauli_char(Pauli p) {
  constexpr char chars[] = {'I', 'X', 'Z', 'Y'};
  return chars[static_cast<int>(p)];
}

/// i^k for k in [0, 4).
inline cd phase_value(int k) {
  switch (k & 3) {
    case 0:
      return {1, 0};
    case 1:
      return {0, 1};
    case 2:
      return {-1, 0};
    default:
      return {0, -1};
  }
}

/// A Pauli operator i^phase * P_0 (x) P_1 (x) ... (x) P_{n-1}.
///
/// Letters are stored as two bitmasks: qubit q carries X when only the x bit is
/// set, Z when only the z bit is set and Y when both are set. The phase counts
/// powers of i, so products stay exact.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::size_t num_qubits)
      : num_qubits_(num_qubits), x_(word_count(num_qubits), 0), z_(word_count(num_qubits), 0) {
    if (num_qubits == 0) {
      throw std::invalid_argument("PauliString needs at least one qubit");
    }
  }

  /// Letters listed qubit 0 first, optionally preceded by a sign: "+XIZ", "-iYY".
  static PauliString from_text(std::string_view text) {
    int phase = 0;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
      phase = text[0] == '-' ? 2 : 0;
      text.remove_prefix(1);
    }
    if (!text.empty() && text[0] == 'i') {
      phase += 1;
      text.remove_prefix(1);
    }
    PauliString result(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) {
      switch (text[q]) {
        case 'I':
        case '_':
          break;
        case 'X':
          result.set(q, Pauli::X);
          break;
        case 'Y':
          result.set(q, Pauli::Y);
          break;
        case 'Z':
          result.set(q, Pauli::Z);
          break;
        default:
          throw std::invalid_argument("bad Pauli letter '" + std::string(1, text[q]) + "'");
      }
    }
    result.phase_ = phase & 3;
    return result;
  }

  /// Identity everywhere except the listed (qubit, letter) pairs.
  static PauliString from_factors(std::size_t num_qubits, std::initializer_list<std::pair<std::size_t, Pauli>> factors) {
    PauliString result(num_qubits);
    for (auto [q, p] : factors) {
      if (result.letter(q) != Pauli::I) {
        throw std::invalid_argument("repeated factor on qubit " + std::to_string(q));
      }
      result.set(q, p);
    }
    return result;
  }

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  int phase() const noexcept { return phase_; }
  void set_phase(int k) noexcept { phase_ = k & 3; }

  Pauli letter(std::size_t q) const {
    check_index(q);
    const bool x = (x_[q / 64] >> (q % 64)) & 1u;
    const bool z = (z_[q / 64] >> (q % 64)) & 1u;
    return static_cast<Pauli>(static_cast<int>(x) | (static_cast<int>(z) << 1));
  }

  void set(std::size_t q, Pauli p) {
    check_index(q);
    const std::uint64_t bit = std::uint64_t{1} << (q % 64);
    const int code = static_cast<int>(p);
    x_[q / 64] = (code & 1) ? (x_[q / 64] | bit) : (x_[q / 64] & ~bit);
    z_[q / 64] = (code & 2) ? (z_[q / 64] | bit) : (z_[q / 64] & ~bit);
  }

  std::span<const std::uint64_t> x_words() const noexcept { return x_; }
  std::span<const std::uint64_t> z_words() const noexcept { return z_; }

  /// Masks for registers that fit a single machine word (state-vector paths).
  std::uint64_t x_mask() const { return single_word(x_); }
  std::uint64_t z_mask() const { return single_word(z_); }

  std::size_t weight() const noexcept {
    std::size_t w = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
    return w;
  }

  bool is_identity() const noexcept { return weight() == 0; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> qubits;
    for (std::size_t q = 0; q < num_qubits_; ++q) {
      if (letter(q) != Pauli::I) qubits.push_back(q);
    }
    return qubits;
  }

  PauliString without_phase() const {
    PauliString copy = *this;
    copy.phase_ = 0;
    return copy;
  }

  /// "+XIZ" style rendering, qubit 0 first.
  std::string to_string() const {
    static constexpr const char *prefixes[] = {"+", "+i", "-", "-i"};
    std::string out = prefixes[phase_];
    for (std::size_t q = 0; q < num_qubits_; ++q) out += pauli_char(letter(q));
    return out;
  }

  /// Count of Y letters, i.e. popcount(x & z).
  int y_count() const noexcept {
    int count = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) count += std::popcount(x_[i] & z_[i]);
    return count;
  }

  friend bool operator==(const PauliString &a, const PauliString &b) = default;

  /// Canonical total order on letters, ignoring phase: lexicographic on
  /// (z-mask, x-mask), most significant word first.
  friend bool letters_less(const PauliString &a, const PauliString &b) {
    if (a.num_qubits_ != b.num_qubits_) return a.num_qubits_ < b.num_qubits_;
    for (std::size_t i = a.z_.size(); i-- > 0;) {
      if (a.z_[i] != b.z_[i]) return a.z_[i] < b.z_[i];
    }
    for (std::size_t i = a.x_.size(); i-- > 0;) {
      if (a.x_[i] != b.x_[i]) return a.x_[i] < b.x_[i];
    }
    return false;
  }

  friend bool same_letters(const PauliString &a, const PauliString &b) {
    return a.num_qubits_ == b.num_qubits_ && a.x_ == b.x_ && a.z_ == b.z_;
  }

  friend PauliString multiply(const PauliString &a, const PauliString &b);
  friend bool commutes(const PauliString &a, const PauliString &b);

 private:
  static std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

  static std::uint64_t single_word(const std::vector<std::uint64_t> &words) {
    if (words.size() != 1 || std::bit_width(words[0]) > 63) {
      throw std::invalid_argument("register too wide for a single-word mask");
    }
    return words[0];
  }

  void check_index(std::size_t q) const {
    if (q >= num_qubits_) {
      throw std::out_of_range("qubit " + std::to_string(q) + " out of range for " + std::to_string(num_qubits_) +
                              "-qubit string");
    }
  }

  std::size_t num_qubits_ = 0;
  int phase_ = 0;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
};

/// Exact product a*b. With P(x,z) = i^{xz} X^x Z^z per qubit,
/// P1 P2 = i^{x1 z1 + x2 z2 + 2 z1 x2 - x3 z3} P(x1^x2, z1^z2).
inline PauliString multiply(const PauliString &a, const PauliString &b) {
  if (a.num_qubits_ != b.num_qubits_) {
    throw std::invalid_argument("qubit-count mismatch: " + std::to_string(a.num_qubits_) + " vs " +
                                std::to_string(b.num_qubits_));
  }
  PauliString c(a.num_qubits_);
  int k = a.phase_ + b.phase_;
  for (std::size_t i = 0; i < a.x_.size(); ++i) {
    const std::uint64_t x1 = a.x_[i], z1 = a.z_[i], x2 = b.x_[i], z2 = b.z_[i];
    const std::uint64_t x3 = x1 ^ x2, z3 = z1 ^ z2;
    k += std::popcount(x1 & z1) + std::popcount(x2 & z2) + 2 * std::popcount(z1 & x2) - std::popcount(x3 & z3);
    c.x_[i] = x3;
    c.z_[i] = z3;
  }
  c.phase_ = ((k % 4) + 4) % 4;
  return c;
}

inline PauliString operator*(const PauliString &a, const PauliString &b) { return multiply(a, b); }

inline bool commutes(const PauliString &a, const PauliString &b) {
  if (a.num_qubits_ != b.num_qubits_) throw std::invalid_argument("qubit-count mismatch");
  int anti = 0;
  for (std::size_t i = 0; i < a.x_.size(); ++i) {
    anti += std::popcount(a.x_[i] & b.z_[i]) + std::popcount(a.z_[i] & b.x_[i]);
  }
  return anti % 2 == 0;
}

template <class Scalar>
struct PauliTerm {
  Scalar coefficient;
  PauliString string;  // phase is always zero
};

/// A weighted sum of phase-free Pauli strings, kept in canonical form:
/// duplicates merged, near-zero coefficients dropped, terms sorted by
/// letters_less. Real coefficients give Hermitian operators.
template <class Scalar>
class PauliSum {
  static_assert(std::is_same_v<Scalar, double> || std::is_same_v<Scalar, cd>);

 public:
  using Term = PauliTerm<Scalar>;

  PauliSum() = default;
  explicit PauliSum(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0) throw std::invalid_argument("operator needs at least one qubit");
  }

  /// Builds the canonical sum of coefficient * string. A string's own phase is
  /// folded into its coefficient; for real sums that phase must be +1 or -1.
  static PauliSum from_terms(std::size_t num_qubits, std::vector<Term> terms) {
    PauliSum sum(num_qubits);
    for (auto &t : terms) {
      if (t.string.num_qubits() != num_qubits) {
        throw std::invalid_argument("qubit-count mismatch: term on " + std::to_string(t.string.num_qubits()) +
                                    " qubits in a " + std::to_string(num_qubits) + "-qubit sum");
      }
      t.coefficient = fold_phase(t.coefficient, t.string.phase());
      t.string.set_phase(0);
    }
    sum.terms_ = std::move(terms);
    sum.canonicalize();
    return sum;
  }

  static PauliSum single(Scalar coefficient, PauliString string) {
    const std::size_t n = string.num_qubits();
    return from_terms(n, {Term{coefficient, std::move(string)}});
  }

  std::size_t num_qubits() const noexcept { return num_qubits_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<Term> &terms() const noexcept { return terms_; }

  /// Sum of |coefficient|; an upper bound on the operator norm.
  double one_norm() const noexcept {
    double s = 0;
    for (const auto &t : terms_) s += std::abs(t.coefficient);
    return s;
  }

  /// Recanonicalizes a copy. Public sums are always canonical already, so this
  /// is the identity map; it exists for the idempotence property.
  PauliSum canonical() const {
    PauliSum copy = *this;
    copy.canonicalize();
    return copy;
  }

  friend bool operator==(const PauliSum &a, const PauliSum &b) {
    if (a.num_qubits_ != b.num_qubits_ || a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].coefficient != b.terms_[i].coefficient || !same_letters(a.terms_[i].string, b.terms_[i].string)) {
        return false;
      }
    }
    return true;
  }

  friend PauliSum operator+(const PauliSum &a, const PauliSum &b) {
    require_same_width(a, b);
    std::vector<Term> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return from_terms(a.num_qubits_, std::move(terms));
  }

  friend PauliSum operator*(Scalar s, const PauliSum &a) {
    std::vector<Term> terms = a.terms_;
    for (auto &t : terms) t.coefficient *= s;
    return from_terms(a.num_qubits_, std::move(terms));
  }

  friend PauliSum operator-(const PauliSum &a, const PauliSum &b) { return a + Scalar(-1) * b; }

  std::string to_string() const;

 private:
  template <class S>
  friend class PauliSum;

  static Scalar fold_phase(Scalar c, int phase) {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (phase % 2 != 0) throw std::invalid_argument("imaginary phase in a real operator sum");
      return phase == 2 ? -c : c;
    } else {
      return c * phase_value(phase);
    }
  }

  static void require_same_width(const PauliSum &a, const PauliSum &b) {
    if (a.num_qubits_ != b.num_qubits_) {
      throw std::invalid_argument("qubit-count mismatch: " + std::to_string(a.num_qubits_) + " vs " +
                                  std::to_string(b.num_qubits_));
    }
  }

  void canonicalize() {
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const Term &a, const Term &b) { return letters_less(a.string, b.string); });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (auto &t : terms_) {
      if (!merged.empty() && same_letters(merged.back().string, t.string)) {
        merged.back().coefficient += t.coefficient;
      } else {
        merged.push_back(std::move(t));
      }
    }
    std::erase_if(merged, [](const Term &t) { return std::abs(t.coefficient) < kZeroCoefficient; });
    terms_ = std::move(merged);
  }

  std::size_t num_qubits_ = 0;
  std::vector<Term> terms_;
};

using OperatorSum = PauliSum<double>;
using ComplexOperatorSum = PauliSum<cd>;

template <class A, class B>
ComplexOperatorSum operator*(const PauliSum<A> &a, const PauliSum<B> &b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("qubit-count mismatch");
  std::vector<PauliTerm<cd>> terms;
  terms.reserve(a.size() * b.size());
  for (const auto &ta : a.terms()) {
    for (const auto &tb : b.terms()) {
      terms.push_back({cd(ta.coefficient) * cd(tb.coefficient), multiply(ta.string, tb.string)});
    }
  }
  return ComplexOperatorSum::from_terms(a.num_qubits(), std::move(terms));
}

template <class S>
ComplexOperatorSum to_complex(const PauliSum<S> &a) {
  std::vector<PauliTerm<cd>> terms;
  for (const auto &t : a.terms()) terms.push_back({cd(t.coefficient), t.string});
  return ComplexOperatorSum::from_terms(a.num_qubits(), std::move(terms));
}

/// ab - ba, in canonical form. Only anticommuting term pairs contribute.
template <class A, class B>
ComplexOperatorSum commutator(const PauliSum<A> &a, const PauliSum<B> &b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("qubit-count mismatch: " + std::to_string(a.num_qubits()) + " vs " +
                                std::to_string(b.num_qubits()));
  }
  std::vector<PauliTerm<cd>> terms;
  for (const auto &ta : a.terms()) {
    for (const auto &tb : b.terms()) {
      if (commutes(ta.string, tb.string)) continue;
      // For anticommuting strings ab - ba = 2ab.
      terms.push_back({2.0 * cd(ta.coefficient) * cd(tb.coefficient), multiply(ta.string, tb.string)});
    }
  }
  return ComplexOperatorSum::from_terms(a.num_qubits(), std::move(terms));
}

struct CommutatorCheck {
  bool is_zero;
  double residual_norm;  // sum of |coefficients| of ab - ba
};

template <class A, class B>
CommutatorCheck commutator_is_zero(const PauliSum<A> &a, const PauliSum<B> &b) {
  const auto c = commutator(a, b);
  return {c.empty(), c.one_norm()};
}

inline PauliString single_qubit_string(std::size_t n, std::size_t q, Pauli p) {
  PauliString s(n);
  s.set(q, p);
  return s;
}

namespace detail {

/// <b ^ x| P |b> for a phase-free string with single-word masks:
/// i^{popcount(x&z)} (-1)^{popcount(z&b)}.
inline cd basis_phase(int y_count, std::uint64_t z, std::uint64_t b) {
  cd p = phase_value(y_count);
  return (std::popcount(z & b) & 1) ? -p : p;
}

}  // namespace detail

/// out = op * in on the computational basis; qubit q is bit q of the index,
/// with bit value 0 meaning spin up (Z = +1).
template <class S>
void apply(const PauliSum<S> &op, std::span<const cd> in, std::span<cd> out) {
  const std::size_t n = op.num_qubits();
  if (n > kSparseLimit) throw std::invalid_argument("register exceeds the state-vector limit");
  const std::size_t dim = std::size_t{1} << n;
  if (in.size() != dim || out.size() != dim) throw std::invalid_argument("state dimension mismatch");
  std::fill(out.begin(), out.end(), cd{0});
  for (const auto &t : op.terms()) {
    const std::uint64_t x = t.string.x_mask();
    const std::uint64_t z = t.string.z_mask();
    const cd base = cd(t.coefficient) * phase_value(t.string.y_count());
    for (std::size_t b = 0; b < dim; ++b) {
      const cd amp = (std::popcount(z & b) & 1) ? -base : base;
      out[b ^ x] += amp * in[b];
    }
  }
}

inline double max_abs(const Eigen::MatrixXcd &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_residual(const Eigen::MatrixXcd &m) { return max_abs(m - m.adjoint()); }

/// Dense 2^n x 2^n realization. Refuses registers above `dense_limit` qubits.
template <class S>
Eigen::MatrixXcd to_dense(const PauliSum<S> &op, std::size_t dense_limit = kDefaultDenseLimit) {
  const std::size_t n = op.num_qubits();
  if (n > dense_limit) {
    throw std::invalid_argument("dense realization of " + std::to_string(n) + " qubits exceeds the limit of " +
                                std::to_string(dense_limit) + "; use the matrix-free path");
  }
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto &t : op.terms()) {
    const std::uint64_t x = t.string.x_mask();
    const std::uint64_t z = t.string.z_mask();
    const cd c(t.coefficient);
    const int y = t.string.y_count();
    for (std::size_t b = 0; b < dim; ++b) {
      m(b ^ x, b) += c * detail::basis_phase(y, z, b);
    }
  }
  return m;
}

inline Eigen::MatrixXcd to_dense(const PauliString &p) {
  return to_dense(ComplexOperatorSum::single(phase_value(p.phase()), p.without_phase()));
}

template <class S>
std::string PauliSum<S>::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto &t : terms_) {
    if (!out.empty()) out += " + ";
    if constexpr (std::is_same_v<S, double>) {
      out += std::to_string(t.coefficient);
    } else {
      out += "(" + std::to_string(t.coefficient.real()) + "," + std::to_string(t.coefficient.imag()) + ")";
    }
    out += " *";
    bool any = false;
    for (std::size_t q : t.string.support()) {
      out += " ";
      out += pauli_char(t.string.letter(q));
      out += std::to_string(q);
      any = true;
    }
    if (!any) out += " I";
  }
  return out;
}

}  // namespace clusterprep
