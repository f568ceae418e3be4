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
#include <complex>
#include <string>
#include <vector>

#include "freelim/common.hpp"

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n,
            std::complex<double>* a, const int* lda, std::complex<double>* w,
            std::complex<double>* vl, const int* ldvl, std::complex<double>* vr,
            const int* ldvr, std::complex<double>* work, const int* lwork,
            double* rwork, int* info);

void zgesdd_(const char* jobz, const int* m, const int* n,
             std::complex<double>* a, const int* lda, double* s,
             std::complex<double>* u, const int* ldu, std::complex<double>* vt,
             const int* ldvt, std::complex<double>* work, const int* lwork,
             double* rwork, int* iwork, int* info);
}

namespace freelim::lapack {

/// All eigenvalues of a dense complex matrix (Schur-based QR iteration).
inline Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd a = m;  // zgeev overwrites its input
  Eigen::VectorXcd w(n);
  std::vector<double> rwork(std::max(1, 2 * n));
  int info = 0;
  int lwork = -1;
  std::complex<double> wkopt;
  const int ione = 1;
  zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &ione, nullptr, &ione,
         &wkopt, &lwork, rwork.data(), &info);
  lwork = static_cast<int>(wkopt.real());
  std::vector<std::complex<double>> work(std::max(1, lwork));
  zgeev_("N", "N", &n, a.data(), &n, w.data(), nullptr, &ione, nullptr, &ione,
         work.data(), &lwork, rwork.data(), &info);
  if (info != 0)
    throw decomposition_error("zgeev failed to converge (info=" +
                              std::to_string(info) + ")");
  return w;
}

/// Singular values of a dense complex matrix, descending.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::MatrixXcd a = m;
  Eigen::VectorXd s(n);
  std::vector<double> rwork(std::max(1, 7 * n));
  std::vector<int> iwork(std::max(1, 8 * n));
  int info = 0;
  int lwork = -1;
  std::complex<double> wkopt;
  const int ione = 1;
  zgesdd_("N", &n, &n, a.data(), &n, s.data(), nullptr, &ione, nullptr, &ione,
          &wkopt, &lwork, rwork.data(), iwork.data(), &info);
  lwork = static_cast<int>(wkopt.real());
  std::vector<std::complex<double>> work(std::max(1, lwork));
  zgesdd_("N", &n, &n, a.data(), &n, s.data(), nullptr, &ione, nullptr, &ione,
          work.data(), &lwork, rwork.data(), iwork.data(), &info);
  if (info != 0)
    throw decomposition_error("zgesdd failed to converge (info=" +
                              std::to_string(info) + ")");
  return s;
}

}  // namespace freelim::lapack
