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

// Line-oriented text format for real Pauli sums (`.pham`):
//
//   # comment
//   qubits 4
//   -1 * Z0 Z1
//   -2.5 * X3       # trailing comments are allowed
//   0.25 * I        # identity term
//
// Unlisted qubits carry the identity. Terms are merged on parse, and
// serialization writes the canonical term order with 17 significant digits.

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "clusterprep/errors.hpp"
#include "clusterprep/pauli.hpp"

namespace clusterprep::hamlang {

/// Upper bound on the `qubits` header; wider registers are never realized.
inline constexpr std::size_t kMaxDeclaredQubits = 1 << 16;

struct OperatorDocument {
  std::size_t declared_qubits = 0;
  OperatorSum op;
  std::vector<std::string> comments;  // full-line comments, '#' stripped
};

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_blanks() {
    while (pos_ < text_.size() && is_blank(text_[pos_])) ++pos_;
  }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  std::size_t column() const { return pos_ + 1; }

  [[noreturn]] void fail(const std::string &message) const { throw ParseError(line_, column(), message); }
  [[noreturn]] void fail_at(std::size_t column, const std::string &message) const {
    throw ParseError(line_, column, message);
  }

  std::string_view word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_blank(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::size_t unsigned_integer() {
    const std::size_t start = pos_;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc() || ptr == text_.data() + start) fail("expected a non-negative integer");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  double number() {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '+') ++pos_;
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec == std::errc::result_out_of_range) {
      pos_ = start;
      fail("non-finite coefficient");
    }
    if (ec != std::errc()) {
      pos_ = start;
      fail("expected a coefficient");
    }
    if (!std::isfinite(value)) {
      pos_ = start;
      fail("non-finite coefficient");
    }
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  void expect(char c) {
    if (done() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void advance() { ++pos_; }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline void parse_term(LineCursor &cur, std::size_t qubits, std::vector<PauliTerm<double>> &terms) {
  const double coefficient = cur.number();
  cur.skip_blanks();
  cur.expect('*');
  cur.skip_blanks();
  if (cur.done()) cur.fail("expected at least one factor");

  PauliString string(qubits);
  std::vector<bool> used(qubits, false);
  bool identity = false;
  std::size_t factors = 0;
  while (!cur.done()) {
    const std::size_t column = cur.column();
    const char letter = cur.peek();
    if (identity) cur.fail("identity factor 'I' must be the only factor");
    if (letter == 'I') {
      cur.advance();
      if (!cur.done() && !is_blank(cur.peek())) cur.fail("unexpected character after 'I'");
      if (factors > 0) cur.fail("identity factor 'I' must be the only factor");
      identity = true;
    } else {
      Pauli p;
      switch (letter) {
        case 'X':
          p = Pauli::X;
          break;
        case 'Y':
          p = Pauli::Y;
          break;
        case 'Z':
          p = Pauli::Z;
          break;
        default:
          cur.fail(std::string("expected a factor X<n>, Y<n> or Z<n>, got '") + letter + "'");
      }
      cur.advance();
      if (cur.done() || !std::isdigit(static_cast<unsigned char>(cur.peek()))) cur.fail("expected a qubit index");
      const std::size_t q = cur.unsigned_integer();
      if (!cur.done() && !is_blank(cur.peek())) cur.fail("unexpected character after qubit index");
      if (q >= qubits) {
        cur.fail_at(column, "qubit index " + std::to_string(q) + " out of range for " + std::to_string(qubits) +
                                " qubits");
      }
      if (used[q]) cur.fail_at(column, "repeated factor on qubit " + std::to_string(q));
      used[q] = true;
      string.set(q, p);
    }
    ++factors;
    cur.skip_blanks();
  }
  terms.push_back({coefficient, std::move(string)});
}

}  // namespace detail

inline OperatorDocument parse_document(std::string_view text) {
  OperatorDocument doc;
  std::vector<PauliTerm<double>> terms;
  bool have_header = false;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_number;
    start = end + 1;

    const std::size_t hash = line.find('#');
    const bool full_line_comment = [&] {
      if (hash == std::string_view::npos) return false;
      for (std::size_t i = 0; i < hash; ++i) {
        if (!detail::is_blank(line[i])) return false;
      }
      return true;
    }();
    if (full_line_comment) {
      std::string_view body = line.substr(hash + 1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      while (!body.empty() && body.back() == '\r') body.remove_suffix(1);
      doc.comments.emplace_back(body);
      continue;
    }
    if (hash != std::string_view::npos) line = line.substr(0, hash);

    detail::LineCursor cur(line, line_number);
    cur.skip_blanks();
    if (cur.done()) continue;

    if (!have_header) {
      if (cur.word() != "qubits") cur.fail_at(1, "expected header 'qubits N'");
      cur.skip_blanks();
      const std::size_t n = cur.unsigned_integer();
      cur.skip_blanks();
      if (!cur.done()) cur.fail("unexpected text after qubit count");
      if (n == 0 || n > kMaxDeclaredQubits) cur.fail("qubit count must be in [1, 65536]");
      doc.declared_qubits = n;
      have_header = true;
      continue;
    }
    detail::parse_term(cur, doc.declared_qubits, terms);
  }
  if (!have_header) throw ParseError(line_number, 1, "missing header 'qubits N'");
  doc.op = OperatorSum::from_terms(doc.declared_qubits, std::move(terms));
  return doc;
}

inline OperatorSum parse(std::string_view text) { return parse_document(text).op; }

inline std::string format_coefficient(double c) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", c);
  return buffer;
}

/// Deterministic text: header, then one line per canonical term, no trailing newline.
inline std::string serialize(const OperatorSum &op) {
  std::string out = "qubits " + std::to_string(op.num_qubits());
  for (const auto &t : op.terms()) {
    out += '\n';
    out += format_coefficient(t.coefficient);
    out += " *";
    const auto support = t.string.support();
    if (support.empty()) out += " I";
    for (std::size_t q : support) {
      out += ' ';
      out += pauli_char(t.string.letter(q));
      out += std::to_string(q);
    }
  }
  return out;
}

inline std::string serialize(const OperatorDocument &doc) {
  std::string out;
  for (const auto &c : doc.comments) out += "# " + c + "\n";
  return out + serialize(doc.op);
}

inline OperatorDocument load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open operator file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str());
}

}  // namespace clusterprep::hamlang
