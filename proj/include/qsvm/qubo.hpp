// Copyright 2026 The qsvm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary encoding of the SVM dual as a QUBO, the Ising form, energies and
// the sparse-triple text format.
//
// Each coefficient alpha_n is spelled by K base-B digits restricted to
// {0, 1}: alpha_n = sum_k B^k a_{Kn+k}. Substituting into the dual
// objective and adding (xi/2)(sum_n alpha_n t_n)^2 gives a quadratic form
// over the K*N bits whose symmetric matrix is
//
//   Qs[Kn+k][Km+j] = 1/2 B^(k+j) t_n t_m (k(x_n, x_m) + xi) - [n==m][k==j] B^k
//
// and the upper-triangular form folds Qs[i][j] + Qs[j][i] into i < j.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qsvm/dataset.hpp"
#include "qsvm/error.hpp"
#include "qsvm/kernel.hpp"
#include "qsvm/matrix.hpp"
#include "qsvm/text.hpp"

namespace qsvm {

using BitVector = std::vector<std::uint8_t>;

/// Largest decodable coefficient, sum_{k=0}^{K-1} B^k.
inline double derive_c(int base, int bits) {
  require(base >= 2, "encoding base must be >= 2");
  require(bits >= 1, "bits per coefficient must be >= 1");
  double c = 0.0, p = 1.0;
  for (int k = 0; k < bits; ++k, p *= base) c += p;
  return c;
}

struct EncodingParams {
  int base = 2;
  int bits = 2;
  double xi = 0.0;
  KernelParams kernel;

  double c_bound() const { return derive_c(base, bits); }

  void validate() const {
    derive_c(base, bits);
    require(xi >= 0.0 && std::isfinite(xi), "penalty xi must be nonnegative");
    if (kernel.kind == KernelKind::gaussian) KernelParams::gaussian(kernel.gamma);
  }

  friend bool operator==(const EncodingParams&, const EncodingParams&) = default;
};

inline std::vector<double> digit_weights(int base, int bits) {
  std::vector<double> w(static_cast<std::size_t>(bits));
  double p = 1.0;
  for (auto& x : w) {
    x = p;
    p *= base;
  }
  return w;
}

/// alpha_n = sum_k B^k bits[Kn+k].
inline std::vector<double> decode_alphas(std::span<const std::uint8_t> bits, int base, int per_alpha) {
  require(per_alpha >= 1, "bits per coefficient must be >= 1");
  const auto k = static_cast<std::size_t>(per_alpha);
  require(bits.size() % k == 0, "bit vector length " + std::to_string(bits.size()) +
                                    " is not a multiple of " + std::to_string(k));
  const auto w = digit_weights(base, per_alpha);
  std::vector<double> alphas(bits.size() / k, 0.0);
  for (std::size_t n = 0; n < alphas.size(); ++n)
    for (std::size_t j = 0; j < k; ++j)
      if (bits[n * k + j]) alphas[n] += w[j];
  return alphas;
}

inline std::vector<double> decode_alphas(std::span<const std::uint8_t> bits, const EncodingParams& p) {
  return decode_alphas(bits, p.base, p.bits);
}

inline std::vector<double> decode_alphas(std::span<const std::uint8_t> bits, const EncodingParams& p,
                                         std::size_t num_alphas) {
  require(bits.size() == num_alphas * static_cast<std::size_t>(p.bits),
          "bit vector length " + std::to_string(bits.size()) + " does not match K*N = " +
              std::to_string(num_alphas * static_cast<std::size_t>(p.bits)));
  return decode_alphas(bits, p);
}

/// Upper-triangular QUBO coefficients; energy of x is sum_{i<=j} Q_ij x_i x_j.
class QuboProblem {
 public:
  QuboProblem() = default;
  explicit QuboProblem(std::size_t num_vars) : coeffs_(num_vars, num_vars) {}

  /// Takes a square matrix that must already be upper triangular.
  static QuboProblem from_upper(Matrix coeffs) {
    require(coeffs.rows() == coeffs.cols(), "QUBO matrix must be square");
    for (std::size_t i = 0; i < coeffs.rows(); ++i)
      for (std::size_t j = 0; j < coeffs.cols(); ++j) {
        require(std::isfinite(coeffs(i, j)), "QUBO coefficients must be finite");
        require(j >= i || coeffs(i, j) == 0.0, "QUBO matrix must be upper triangular");
      }
    QuboProblem q;
    q.coeffs_ = std::move(coeffs);
    return q;
  }

  std::size_t num_vars() const { return coeffs_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return coeffs_(i, j); }
  const Matrix& coeffs() const { return coeffs_; }

  void set(std::size_t i, std::size_t j, double value) {
    require(i <= j && j < num_vars(), "QUBO entry must lie on or above the diagonal");
    require(std::isfinite(value), "QUBO coefficients must be finite");
    coeffs_(i, j) = value;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double v : coeffs_.data()) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const QuboProblem&, const QuboProblem&) = default;

 private:
  Matrix coeffs_;
};

/// x^T M x over a binary vector for any square M.
inline double quadratic_form(const Matrix& m, std::span<const std::uint8_t> bits) {
  require(m.rows() == bits.size() && m.cols() == bits.size(), "quadratic form length mismatch");
  double e = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    for (std::size_t j = 0; j < bits.size(); ++j)
      if (bits[j]) e += m(i, j);
  }
  return e;
}

inline double qubo_energy(const QuboProblem& q, std::span<const std::uint8_t> bits) {
  require(bits.size() == q.num_vars(), "bit vector length " + std::to_string(bits.size()) +
                                           " does not match QUBO size " +
                                           std::to_string(q.num_vars()));
  double e = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const auto row = q.coeffs().row(i);
    for (std::size_t j = i; j < bits.size(); ++j)
      if (bits[j]) e += row[j];
  }
  return e;
}

/// Q_ii = M_ii, Q_ij = M_ij + M_ji for i < j, zero below the diagonal.
inline QuboProblem upper_triangularize(const Matrix& m) {
  require(m.rows() == m.cols(), "QUBO matrix must be square");
  Matrix u(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    u(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.cols(); ++j) u(i, j) = m(i, j) + m(j, i);
  }
  return QuboProblem::from_upper(std::move(u));
}

inline void require_binary_labels(const Dataset& data) {
  require(data.is_binary(), "non-binary labels: expected every label in {-1, +1}");
}

/// The symmetric K*N x K*N matrix before triangularization.
inline Matrix symmetric_qubo_matrix(const Dataset& data, const EncodingParams& params) {
  params.validate();
  require_binary_labels(data);
  require(data.size() >= 2, "QUBO construction needs at least 2 points");
  const auto gram = gram_matrix(params.kernel, data);
  const auto w = digit_weights(params.base, params.bits);
  const std::size_t K = static_cast<std::size_t>(params.bits);
  const std::size_t n = data.size();
  Matrix s(K * n, K * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double tt = static_cast<double>(data.label(a) * data.label(b));
      const double kk = gram(a, b) + params.xi;
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j) s(K * a + k, K * b + j) = 0.5 * w[k] * w[j] * tt * kk;
    }
    for (std::size_t k = 0; k < K; ++k) s(K * a + k, K * a + k) -= w[k];
  }
  return s;
}

inline QuboProblem build_qubo(const Dataset& data, const EncodingParams& params) {
  return upper_triangularize(symmetric_qubo_matrix(data, params));
}

/// 1/2 sum_mn alpha_m alpha_n t_m t_n k(x_m, x_n) - sum_n alpha_n.
inline double dual_objective(std::span<const double> alphas, const Dataset& data, const KernelParams& kernel) {
  require(alphas.size() == data.size(), "alpha count does not match dataset size");
  double quad = 0.0, lin = 0.0;
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    lin += alphas[m];
    if (alphas[m] == 0.0) continue;
    for (std::size_t n = 0; n < alphas.size(); ++n) {
      if (alphas[n] == 0.0) continue;
      quad += alphas[m] * alphas[n] * data.label(m) * data.label(n) *
              kernel_eval(kernel, data.features(m), data.features(n));
    }
  }
  return 0.5 * quad - lin;
}

/// sum_n alpha_n t_n.
inline double equality_residual(std::span<const double> alphas, const Dataset& data) {
  require(alphas.size() == data.size(), "alpha count does not match dataset size");
  double s = 0.0;
  for (std::size_t n = 0; n < alphas.size(); ++n) s += alphas[n] * data.label(n);
  return s;
}

/// E(s) = sum_i h_i s_i + sum_{i<j} J_ij s_i s_j + offset, s in {-1, +1}.
struct IsingProblem {
  std::vector<double> h;
  Matrix J;
  double offset = 0.0;

  std::size_t num_spins() const { return h.size(); }
};

using SpinVector = std::vector<std::int8_t>;

inline double ising_energy(const IsingProblem& p, std::span<const std::int8_t> spins) {
  require(spins.size() == p.num_spins(), "spin vector length mismatch");
  double e = p.offset;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    e += p.h[i] * spins[i];
    for (std::size_t j = i + 1; j < spins.size(); ++j) e += p.J(i, j) * spins[i] * spins[j];
  }
  return e;
}

inline SpinVector bits_to_spins(std::span<const std::uint8_t> bits) {
  SpinVector s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? 1 : -1;
  return s;
}

inline BitVector spins_to_bits(std::span<const std::int8_t> spins) {
  BitVector b(spins.size());
  for (std::size_t i = 0; i < spins.size(); ++i) b[i] = spins[i] > 0 ? 1 : 0;
  return b;
}

/// Substitutes x = (s + 1) / 2.
inline IsingProblem qubo_to_ising(const QuboProblem& q) {
  const auto n = q.num_vars();
  IsingProblem p{std::vector<double>(n, 0.0), Matrix(n, n), 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    p.h[i] += 0.5 * q(i, i);
    p.offset += 0.5 * q(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = 0.25 * q(i, j);
      p.J(i, j) = c;
      p.h[i] += c;
      p.h[j] += c;
      p.offset += c;
    }
  }
  return p;
}

/// Substitutes s = 2x - 1. Returns the QUBO and the constant energy offset.
inline std::pair<QuboProblem, double> ising_to_qubo(const IsingProblem& p) {
  const auto n = p.num_spins();
  require(p.J.rows() == n && p.J.cols() == n, "Ising coupling matrix size mismatch");
  Matrix u(n, n);
  double offset = p.offset;
  for (std::size_t i = 0; i < n; ++i) {
    u(i, i) += 2.0 * p.h[i];
    offset -= p.h[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = p.J(i, j);
      u(i, j) += 4.0 * c;
      u(i, i) -= 2.0 * c;
      u(j, j) -= 2.0 * c;
      offset += c;
    }
  }
  return {QuboProblem::from_upper(std::move(u)), offset};
}

/// "vars N" followed by one "i j value" line per nonzero coefficient.
inline std::string serialize_qubo(const QuboProblem& q) {
  std::string out = "vars " + std::to_string(q.num_vars()) + "\n";
  for (std::size_t i = 0; i < q.num_vars(); ++i)
    for (std::size_t j = i; j < q.num_vars(); ++j)
      if (q(i, j) != 0.0)
        out += std::to_string(i) + " " + std::to_string(j) + " " + format_real(q(i, j)) + "\n";
  return out;
}

/// Errors carry the 1-based line number. Blank lines and `#` comments are
/// skipped; repeated entries are rejected.
inline QuboProblem parse_qubo(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  QuboProblem q;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  auto fail = [&line_no](const std::string& what) {
    throw Error("QUBO line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto body = std::string_view(line);
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    auto tok = split_whitespace(body);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 2 || tok[0] != "vars") fail("expected header 'vars N'");
      auto n = parse_integer(tok[1]);
      if (!n || *n < 0) fail("invalid variable count '" + tok[1] + "'");
      q = QuboProblem(static_cast<std::size_t>(*n));
      have_header = true;
      continue;
    }
    if (tok.size() != 3) fail("expected 'i j value'");
    auto i = parse_integer(tok[0]);
    auto j = parse_integer(tok[1]);
    auto v = parse_real(tok[2]);
    if (!i || !j || *i < 0 || *j < 0) fail("invalid index");
    if (!v) fail("invalid value '" + tok[2] + "'");
    const auto ui = static_cast<std::size_t>(*i), uj = static_cast<std::size_t>(*j);
    if (ui >= q.num_vars() || uj >= q.num_vars()) fail("index out of range");
    if (uj < ui) fail("entry below the diagonal");
    if (!seen.emplace(std::pair{ui, uj}, line_no).second) fail("duplicate entry");
    q.set(ui, uj, *v);
  }
  if (!have_header) throw Error("QUBO file is empty: expected header 'vars N'");
  return q;
}

}  // namespace qsvm
