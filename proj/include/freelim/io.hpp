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

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "freelim/limits.hpp"
#include "freelim/spectra.hpp"
#include "freelim/transforms.hpp"

namespace freelim {

/// FNV-1a 64-bit content hash, used for artifact manifests.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view data) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw error("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

/// Eigenvalue spectra serialize as "re,im" rows, singular values as "s".
inline std::string spectrum_csv(const EmpiricalSpectrum& spec) {
  std::string out;
  if (spec.kind == SpectrumKind::complex_eigenvalues) {
    out = "re,im\n";
    for (const cd& z : spec.eigvals)
      out += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
  } else {
    out = "s\n";
    for (double s : spec.singvals) out += format_double(s) + "\n";
  }
  return out;
}

/// Radial law table: r, psi, pdf, radial_cdf.
inline std::string limit_law_csv(const LimitLaw& law,
                                 const std::vector<double>& grid) {
  std::string out = "r,psi,pdf,radial_cdf\n";
  for (double r : grid) {
    const double psi = law.psi(r);
    out += format_double(r) + "," + format_double(psi) + "," +
           format_double(law.density(r)) + "," + format_double(psi) + "\n";
  }
  return out;
}

/// Line density table: x, pdf, cdf.
inline std::string density_table_csv(const DensityTable& table) {
  std::string out = "x,pdf,cdf\n";
  for (std::size_t i = 0; i < table.x.size(); ++i)
    out += format_double(table.x[i]) + "," + format_double(table.pdf[i]) +
           "," + format_double(table.cdf(table.x[i])) + "\n";
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (!(hi > lo) || count < 2)
    throw config_error("uniform_grid: need hi > lo and count >= 2");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

}  // namespace freelim
