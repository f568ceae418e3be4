// Copyright 2026 The freelim Authors
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

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "freelim/matrix_word.hpp"
#include "freelim/rng.hpp"
#include "freelim/transforms.hpp"

namespace freelim {

/// n x n matrix of i.i.d. draws of the entry law, scaled by 1/sqrt(n).
/// Entries are consumed row by row, so results are reproducible per stream.
inline SquareMatrix sample_girko(int n, EntryDist dist, Xoshiro256pp& rng) {
  if (n < 1) throw config_error("sample_girko: n must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = scale * sample_entry(dist, rng);
  return {std::move(m), is_complex_dist(dist) ? MatrixField::complex_entries
                                              : MatrixField::real_entries};
}

inline SquareMatrix sample_girko(int n, EntryDist dist, std::uint64_t stream_seed) {
  Xoshiro256pp rng(stream_seed);
  return sample_girko(n, dist, rng);
}

/// (Z*Z + tI)^{-1} Z*; equals Z^{-1} at t = 0. The t = 0 path refuses when
/// the LU condition estimate falls below n^{-8}, which flags genuine numeric
/// trouble rather than typical ensemble draws.
inline SquareMatrix regularized_inverse(const SquareMatrix& z, double t) {
  if (t < 0.0) throw config_error("regularized_inverse: t must be >= 0");
  const int n = z.dim();
  if (n < 1) throw config_error("regularized_inverse: empty matrix");
  if (t == 0.0) {
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z.values);
    const double guard = std::pow(static_cast<double>(n), -8.0);
    // LU-based condition estimate: the U-diagonal ratio tracks s_n/s_1 well
    // enough to act as the tripwire for genuinely singular factors.
    double umin = std::numeric_limits<double>::infinity();
    double umax = 0.0;
    for (int j = 0; j < n; ++j) {
      const double u = std::abs(lu.matrixLU()(j, j));
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
    if (!(umin >= guard * umax))
      throw singular_matrix_error(
          "regularized_inverse: matrix numerically singular at t=0 "
          "(pivot ratio " + std::to_string(umin / umax) + " below guard " +
          std::to_string(guard) + ")");
    Eigen::MatrixXcd inv = lu.inverse();
    if (!inv.allFinite())
      throw singular_matrix_error(
          "regularized_inverse: inverse overflow at t=0");
    return {std::move(inv), z.field};
  }
  Eigen::MatrixXcd h = z.values.adjoint() * z.values;
  h.diagonal().array() += t;
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  if (llt.info() != Eigen::Success)
    throw decomposition_error("regularized_inverse: Cholesky factorization failed");
  return {llt.solve(z.values.adjoint()), z.field};
}

/// Supplies the matrix for a given global factor id (summand q shifts ids by
/// q * span, keeping every factor on its own independent stream).
using FactorSampler = std::function<SquareMatrix(int n, int global_factor_id)>;

inline FactorSampler girko_factor_sampler(EntryDist dist, std::uint64_t master_seed,
                                          std::uint64_t replicate_index) {
  return [dist, master_seed, replicate_index](int n, int id) {
    Xoshiro256pp rng(derive_stream_seed(master_seed, replicate_index,
                                        static_cast<std::uint64_t>(id)));
    return sample_girko(n, dist, rng);
  };
}

/// Assembles sum_q prod_r (X^{(id)})_t^{exponent * power}. Every factor of a
/// power is regularized individually; singular factors are reported with
/// their global factor id.
inline SquareMatrix assemble_word(const MatrixWord& word, int n,
                                  const FactorSampler& sampler, double t = 0.0) {
  word.validate();
  if (n < 1) throw config_error("assemble_word: n must be >= 1");
  const int span = word.factor_id_span();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
  MatrixField field = MatrixField::real_entries;
  for (int q = 0; q < word.summands; ++q) {
    Eigen::MatrixXcd prod;
    bool started = false;
    for (const auto& f : word.factors) {
      const int gid = f.factor_id + q * span;
      SquareMatrix x = sampler(n, gid);
      if (x.dim() != n)
        throw config_error("assemble_word: sampler returned a " +
                           std::to_string(x.dim()) + "x" + std::to_string(x.dim()) +
                           " matrix, expected n=" + std::to_string(n));
      field = combine_fields(field, x.field);
      Eigen::MatrixXcd base;
      if (f.exponent == +1) {
        base = std::move(x.values);
      } else {
        try {
          base = regularized_inverse(x, t).values;
        } catch (const singular_matrix_error& e) {
          throw singular_matrix_error(
              std::string(e.what()) + " [factor x" + std::to_string(gid) + "]",
              gid);
        }
      }
      for (int rep = 0; rep < f.power; ++rep) {
        if (!started) {
          prod = base;
          started = true;
        } else {
          prod = prod * base;
        }
      }
    }
    sum += prod;
  }
  return {std::move(sum), field};
}

inline SquareMatrix assemble_girko_word(const MatrixWord& word, int n,
                                        EntryDist dist, double t,
                                        std::uint64_t master_seed,
                                        std::uint64_t replicate_index) {
  return assemble_word(word, n, girko_factor_sampler(dist, master_seed, replicate_index), t);
}

/// Haar-distributed unitary: orthonormalize a complex Ginibre draw and fix
/// the column phases so the triangular QR factor has positive real diagonal.
inline SquareMatrix sample_haar_unitary(int n, Xoshiro256pp& rng) {
  if (n < 1) throw config_error("sample_haar_unitary: n must be >= 1");
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      g(j, k) = sample_entry(EntryDist::gaussian_complex, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cd d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : cd(1.0, 0.0));
  }
  return {std::move(q), MatrixField::complex_entries};
}

inline SquareMatrix sample_haar_unitary(int n, std::uint64_t stream_seed) {
  Xoshiro256pp rng(stream_seed);
  return sample_haar_unitary(n, rng);
}

/// Y T U* model for the rotation-invariant stable law of index alpha: Y is a
/// complex Ginibre matrix, T is deterministic diagonal with the |xi|
/// quantiles at j/(n+1), and U is an independent Haar unitary.
inline SquareMatrix sample_stable_model(int n, double alpha,
                                        std::uint64_t master_seed,
                                        std::uint64_t replicate_index) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw config_error("sample_stable_model: alpha must lie in (0, 2)");
  if (n < 1) throw config_error("sample_stable_model: n must be >= 1");
  Xoshiro256pp y_rng(derive_stream_seed(master_seed, replicate_index, 0));
  SquareMatrix y = sample_girko(n, EntryDist::gaussian_complex, y_rng);
  Eigen::VectorXd t_diag(n);
  for (int j = 1; j <= n; ++j)
    t_diag[j - 1] = quantile_abs_xi(alpha, static_cast<double>(j) / (n + 1));
  Xoshiro256pp u_rng(derive_stream_seed(master_seed, replicate_index, 1));
  SquareMatrix u = sample_haar_unitary(n, u_rng);
  Eigen::MatrixXcd f = y.values * t_diag.asDiagonal() * u.values.adjoint();
  return {std::move(f), MatrixField::complex_entries};
}

}  // namespace freelim
