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
#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freelim/common.hpp"

namespace freelim {

enum class MatrixField { real_entries, complex_entries };

inline MatrixField combine_fields(MatrixField a, MatrixField b) {
  return (a == MatrixField::real_entries && b == MatrixField::real_entries)
             ? MatrixField::real_entries
             : MatrixField::complex_entries;
}

/// Dense complex square matrix with a field tag. Real-field matrices keep
/// zero imaginary parts; all spectral code downstream is uniformly complex.
struct SquareMatrix {
  Eigen::MatrixXcd values;
  MatrixField field = MatrixField::complex_entries;

  SquareMatrix() = default;
  SquareMatrix(Eigen::MatrixXcd v, MatrixField f) : values(std::move(v)), field(f) {}

  int dim() const { return static_cast<int>(values.rows()); }
};

/// One factor X_{id}^{exponent * power} of a matrix word.
struct WordFactor {
  int factor_id = 0;
  int exponent = +1;  // +1 or -1
  int power = 1;      // >= 1
};

/// Symbolic recipe for a sum of `summands` independent copies of the product
/// over `factors`. All summands share the factor layout; summand q draws its
/// own independent matrices on a disjoint factor-id range.
struct MatrixWord {
  std::vector<WordFactor> factors;
  int summands = 1;

  void validate() const {
    if (summands < 1) throw config_error("matrix word: summands must be >= 1");
    if (factors.empty()) throw config_error("matrix word: no factors");
    std::set<int> ids;
    for (const auto& f : factors) {
      if (f.exponent != 1 && f.exponent != -1)
        throw config_error("matrix word: exponent must be +1 or -1");
      if (f.power < 1) throw config_error("matrix word: power must be >= 1");
      if (f.factor_id < 0) throw config_error("matrix word: negative factor id");
      if (!ids.insert(f.factor_id).second)
        throw config_error("matrix word: duplicate factor id " +
                           std::to_string(f.factor_id));
    }
  }

  /// Total inverse power l (the sum of powers carrying exponent -1).
  int inverse_power() const {
    int l = 0;
    for (const auto& f : factors)
      if (f.exponent == -1) l += f.power;
    return l;
  }

  int forward_power() const {
    int k = 0;
    for (const auto& f : factors)
      if (f.exponent == +1) k += f.power;
    return k;
  }

  /// Width of one summand's id range; summand q uses ids in
  /// [q * span, (q+1) * span).
  int factor_id_span() const {
    int m = 0;
    for (const auto& f : factors) m = std::max(m, f.factor_id + 1);
    return m;
  }

  static MatrixWord single_factor() { return MatrixWord{{{0, +1, 1}}, 1}; }

  /// X_0 X_1^{-1} ... X_l^{-1} (l = 0 gives the single forward factor).
  static MatrixWord inverse_product(int l, int summands = 1) {
    MatrixWord w;
    w.summands = summands;
    w.factors.push_back({0, +1, 1});
    for (int i = 1; i <= l; ++i) w.factors.push_back({i, -1, 1});
    return w;
  }

  /// X_0 X_1^{-p_1} ... X_k^{-p_k}.
  static MatrixWord inverse_powers(const std::vector<int>& powers, int summands = 1) {
    MatrixWord w;
    w.summands = summands;
    w.factors.push_back({0, +1, 1});
    int id = 1;
    for (int p : powers) w.factors.push_back({id++, -1, p});
    return w;
  }
};

/// Compact text form, e.g. "x0 x1^-2 x3^2"; `summands` is carried separately.
inline std::string word_to_string(const MatrixWord& w) {
  std::ostringstream os;
  bool first = true;
  for (const auto& f : w.factors) {
    if (!first) os << ' ';
    first = false;
    os << 'x' << f.factor_id;
    const int e = f.exponent * f.power;
    if (e != 1) os << '^' << e;
  }
  return os.str();
}

inline MatrixWord word_from_string(const std::string& text, int summands = 1) {
  MatrixWord w;
  w.summands = summands;
  std::string s = text;
  std::replace(s.begin(), s.end(), '*', ' ');
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    if (tok.size() < 2 || (tok[0] != 'x' && tok[0] != 'X'))
      throw config_error("bad word factor '" + tok + "' (expected e.g. x0 or x1^-2)");
    const auto caret = tok.find('^');
    WordFactor f;
    try {
      f.factor_id = std::stoi(tok.substr(1, caret == std::string::npos
                                                ? std::string::npos
                                                : caret - 1));
      int e = 1;
      if (caret != std::string::npos) e = std::stoi(tok.substr(caret + 1));
      if (e == 0) throw config_error("bad word factor '" + tok + "': zero exponent");
      f.exponent = e > 0 ? +1 : -1;
      f.power = e > 0 ? e : -e;
    } catch (const std::invalid_argument&) {
      throw config_error("bad word factor '" + tok + "'");
    } catch (const std::out_of_range&) {
      throw config_error("bad word factor '" + tok + "'");
    }
    w.factors.push_back(f);
  }
  w.validate();
  return w;
}

}  // namespace freelim
