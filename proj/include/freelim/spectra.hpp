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

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "freelim/lapack.hpp"
#include "freelim/matrix_word.hpp"
#include "freelim/quadrature.hpp"

namespace freelim {

enum class SpectrumKind { complex_eigenvalues, singular_values };

/// Pooled multiset of eigenvalues or singular values across replicates.
/// Singular values are kept descending.
struct EmpiricalSpectrum {
  SpectrumKind kind = SpectrumKind::complex_eigenvalues;
  std::vector<cd> eigvals;
  std::vector<double> singvals;
  int n = 0;
  int replicate_count = 0;

  std::size_t size() const {
    return kind == SpectrumKind::complex_eigenvalues ? eigvals.size()
                                                     : singvals.size();
  }

  /// Commutative pooling of spectra from independent replicates.
  void merge(const EmpiricalSpectrum& other) {
    if (replicate_count == 0) {
      *this = other;
      return;
    }
    if (other.kind != kind || other.n != n)
      throw config_error("EmpiricalSpectrum::merge: incompatible spectra");
    eigvals.insert(eigvals.end(), other.eigvals.begin(), other.eigvals.end());
    singvals.insert(singvals.end(), other.singvals.begin(), other.singvals.end());
    std::sort(singvals.begin(), singvals.end(), std::greater<double>());
    replicate_count += other.replicate_count;
  }
};

/// All complex eigenvalues (with multiplicity) of one matrix.
inline EmpiricalSpectrum eigenvalues(const SquareMatrix& m) {
  EmpiricalSpectrum spec;
  spec.kind = SpectrumKind::complex_eigenvalues;
  spec.n = m.dim();
  spec.replicate_count = 1;
  const Eigen::VectorXcd w = lapack::eigenvalues(m.values);
  spec.eigvals.assign(w.data(), w.data() + w.size());
  return spec;
}

/// Singular values of one matrix, descending.
inline EmpiricalSpectrum singular_values(const SquareMatrix& m) {
  EmpiricalSpectrum spec;
  spec.kind = SpectrumKind::singular_values;
  spec.n = m.dim();
  spec.replicate_count = 1;
  const Eigen::VectorXd s = lapack::singular_values(m.values);
  spec.singvals.assign(s.data(), s.data() + s.size());
  return spec;
}

/// The 2n x 2n Hermitian block matrix [0 F; F* 0]; its spectrum is the
/// symmetrized singular value multiset {+-s_j(F)}.
inline SquareMatrix hermitize(const SquareMatrix& f) {
  const int n = f.dim();
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  v.topRightCorner(n, n) = f.values;
  v.bottomLeftCorner(n, n) = f.values.adjoint();
  return {std::move(v), f.field};
}

/// Empirical CDF given by a sorted multiset of real samples.
struct StepCDF {
  std::vector<double> points;  // ascending

  static StepCDF from_samples(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    return {std::move(samples)};
  }

  /// Right-continuous empirical CDF value.
  double value(double x) const {
    const auto it = std::upper_bound(points.begin(), points.end(), x);
    return static_cast<double>(it - points.begin()) / points.size();
  }
};

/// Symmetrized singular value CDF: each s contributes half mass at -s and +s.
inline StepCDF symmetrize(const EmpiricalSpectrum& spec) {
  if (spec.kind != SpectrumKind::singular_values)
    throw config_error("symmetrize: expected a singular value spectrum");
  std::vector<double> pts;
  pts.reserve(2 * spec.singvals.size());
  for (double s : spec.singvals) {
    pts.push_back(-s);
    pts.push_back(s);
  }
  return StepCDF::from_samples(std::move(pts));
}

/// CDF of the squared singular values.
inline StepCDF square(const EmpiricalSpectrum& spec) {
  if (spec.kind != SpectrumKind::singular_values)
    throw config_error("square: expected a singular value spectrum");
  std::vector<double> pts;
  pts.reserve(spec.singvals.size());
  for (double s : spec.singvals) pts.push_back(s * s);
  return StepCDF::from_samples(std::move(pts));
}

/// Empirical CDF of eigenvalue moduli.
inline StepCDF radial_cdf(const EmpiricalSpectrum& spec) {
  if (spec.kind != SpectrumKind::complex_eigenvalues)
    throw config_error("radial_cdf: expected an eigenvalue spectrum");
  std::vector<double> pts;
  pts.reserve(spec.eigvals.size());
  for (const cd& z : spec.eigvals) pts.push_back(std::abs(z));
  return StepCDF::from_samples(std::move(pts));
}

/// Eigenvalue arguments mapped to (0, 1]; uniform for rotation-invariant laws.
inline StepCDF angular_cdf(const EmpiricalSpectrum& spec) {
  if (spec.kind != SpectrumKind::complex_eigenvalues)
    throw config_error("angular_cdf: expected an eigenvalue spectrum");
  std::vector<double> pts;
  pts.reserve(spec.eigvals.size());
  for (const cd& z : spec.eigvals)
    pts.push_back((std::arg(z) + kPi) / (2.0 * kPi));
  return StepCDF::from_samples(std::move(pts));
}

/// Kolmogorov-Smirnov distance against an analytic CDF, evaluated exactly at
/// the jump points (both one-sided limits; ties grouped).
inline double ks_distance(const StepCDF& emp,
                          const std::function<double(double)>& cdf) {
  if (emp.points.empty()) throw config_error("ks_distance: empty sample");
  const double n = static_cast<double>(emp.points.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < emp.points.size()) {
    std::size_t j = i;
    while (j < emp.points.size() && emp.points[j] == emp.points[i]) ++j;
    const double f = cdf(emp.points[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(j) / n));
    i = j;
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double two_sample_ks(const StepCDF& a, const StepCDF& b) {
  if (a.points.empty() || b.points.empty())
    throw config_error("two_sample_ks: empty sample");
  const double na = static_cast<double>(a.points.size());
  const double nb = static_cast<double>(b.points.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.points.size() || ib < b.points.size()) {
    double v;
    if (ia == a.points.size()) v = b.points[ib];
    else if (ib == b.points.size()) v = a.points[ia];
    else v = std::min(a.points[ia], b.points[ib]);
    while (ia < a.points.size() && a.points[ia] == v) ++ia;
    while (ib < b.points.size() && b.points[ib] == v) ++ib;
    d = std::max(d, std::abs(ia / na - ib / nb));
  }
  return d;
}

/// L1 distance between the empirical and an analytic CDF.
inline double wasserstein1(const StepCDF& emp,
                           const std::function<double(double)>& cdf) {
  if (emp.points.empty()) throw config_error("wasserstein1: empty sample");
  const auto& p = emp.points;
  const double n = static_cast<double>(p.size());
  double w = 0.0;

  // left tail: F below the smallest sample
  double span = std::max(1.0, p.back() - p.front());
  double lo = p.front() - span;
  for (int it = 0; it < 60 && cdf(lo) > 1e-9; ++it) {
    span *= 2.0;
    lo = p.front() - span;
  }
  w += adaptive_simpson(cdf, lo, p.front(), 1e-9);

  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i] == p[i + 1]) continue;
    const double level = static_cast<double>(i + 1) / n;
    w += adaptive_simpson(
        [&](double x) { return std::abs(level - cdf(x)); }, p[i], p[i + 1],
        1e-9);
  }

  // right tail: 1 - F beyond the largest sample
  span = std::max(1.0, p.back() - p.front());
  double hi = p.back() + span;
  for (int it = 0; it < 60 && 1.0 - cdf(hi) > 1e-9; ++it) {
    span *= 2.0;
    hi = p.back() + span;
  }
  w += adaptive_simpson([&](double x) { return 1.0 - cdf(x); }, p.back(), hi,
                        1e-9);
  return w;
}

}  // namespace freelim
