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

#include <complex>
#include <stdexcept>
#include <string>

namespace freelim {

inline constexpr const char* kVersion = "0.1.0";

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Base class for all freelim errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, malformed input, or usage error.
struct config_error : error {
  using error::error;
};

/// Base class for runtime numeric failures.
struct numeric_error : error {
  using error::error;
};

/// A t=0 matrix inversion was refused because the factor looks singular.
struct singular_matrix_error : numeric_error {
  explicit singular_matrix_error(const std::string& msg, int factor = -1)
      : numeric_error(msg), factor_id(factor) {}
  int factor_id;  // -1 when the offending factor is unknown
};

/// An eigenvalue or singular value decomposition did not converge.
struct decomposition_error : numeric_error {
  using numeric_error::numeric_error;
};

/// An iterative solver failed to converge; carries the last residual.
struct convergence_error : numeric_error {
  convergence_error(const std::string& msg, double residual)
      : numeric_error(msg + " (last residual " + std::to_string(residual) + ")"),
        last_residual(residual) {}
  double last_residual;
};

/// Evaluation requested on an excluded ray of a slit power domain.
struct branch_error : numeric_error {
  using numeric_error::numeric_error;
};

/// The scalar equation handed to the general radial solver is not monotone.
struct non_monotone_error : numeric_error {
  using numeric_error::numeric_error;
};

/// A quantile could not be bracketed within the supported range.
struct quantile_error : numeric_error {
  using numeric_error::numeric_error;
};

}  // namespace freelim
