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
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "freelim/common.hpp"
#include "freelim/quadrature.hpp"

namespace freelim {

// ---------------------------------------------------------------------------
// S-transforms of the building-block laws and the free stable family.
// ---------------------------------------------------------------------------

/// S-transform of the Marchenko-Pastur law, 1/(z+1).
inline cd s_mp(cd z) {
  if (std::abs(z + cd(1.0, 0.0)) < 1e-14)
    throw numeric_error("s_mp: pole at z = -1");
  return 1.0 / (z + 1.0);
}

/// S-transform of the inverse Marchenko-Pastur law, -z.
inline cd s_mp_inv(cd z) { return -z; }

/// Unit-modulus rotation parameter of the symmetric free stable family,
/// exp((-pi + alpha*pi/2) i).
inline cd stable_b(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw config_error("stable_b: alpha must lie in (0, 2]");
  const double arg = -kPi + alpha * kPi / 2.0;
  return cd(std::cos(arg), std::sin(arg));
}

inline double alpha_tilde(double alpha) { return 2.0 * alpha / (2.0 + alpha); }

/// z^e with the argument of z taken in (-2*pi, 0); the positive real axis is
/// excluded. Negative reals carry argument -pi.
inline cd slit_pow(cd z, double e) {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw branch_error("slit_pow: z on the excluded ray [0, +inf)");
  double th = std::atan2(z.imag(), z.real());
  if (th > 0.0) th -= 2.0 * kPi;
  const double lr = std::log(std::abs(z));
  return std::exp(cd(e * lr, e * th));
}

enum class StableVariant { symmetric, positive, power_r_generic };

/// A law whose R-transform has the power form R(z) = c z^{p-1}. Covers the
/// symmetric free stable family (c = b(alpha), p = alpha), the positive
/// family (p = alpha_tilde), and the xi^2 laws feeding the matrix model.
struct StableLaw {
  StableVariant variant = StableVariant::symmetric;
  double alpha = 2.0;  // family index (symmetric alpha / positive alpha_tilde)
  cd b = cd(1.0, 0.0);
  cd r_coeff = cd(1.0, 0.0);
  double r_power = 2.0;

  bool symmetric_support() const {
    if (variant == StableVariant::symmetric) return true;
    if (variant == StableVariant::power_r_generic) {
      const double target = -kPi + r_power * kPi / 2.0;
      return std::abs(std::arg(r_coeff) - target) < 1e-12;
    }
    return false;
  }

  /// Density decays like x^{-r_power - 1}.
  double tail_exponent() const { return -r_power - 1.0; }

  static StableLaw symmetric(double alpha) {
    StableLaw law;
    law.variant = StableVariant::symmetric;
    law.alpha = alpha;
    law.b = stable_b(alpha);
    law.r_coeff = law.b;
    law.r_power = alpha;
    return law;
  }

  /// Positive free stable law of index alpha_tilde in (0, 1).
  static StableLaw positive(double a_tilde) {
    if (!(a_tilde > 0.0 && a_tilde < 1.0))
      throw config_error("StableLaw::positive: index must lie in (0, 1)");
    StableLaw law;
    law.variant = StableVariant::positive;
    law.alpha = a_tilde;
    law.b = cd(std::cos(-kPi + a_tilde * kPi), std::sin(-kPi + a_tilde * kPi));
    law.r_coeff = law.b;
    law.r_power = a_tilde;
    return law;
  }

  static StableLaw power_r(cd c, double p) {
    if (!(p > 0.0)) throw config_error("StableLaw::power_r: p must be > 0");
    StableLaw law;
    law.variant = StableVariant::power_r_generic;
    law.alpha = p;
    law.b = c / std::abs(c);
    law.r_coeff = c;
    law.r_power = p;
    return law;
  }
};

/// S-transform S(z) = z^{(1/p)-1} / c^{1/p}, with the slit convention for
/// powers of z and the principal branch for powers of c.
inline cd s_stable(const StableLaw& law, cd z) {
  return slit_pow(z, 1.0 / law.r_power - 1.0) /
         std::pow(law.r_coeff, 1.0 / law.r_power);
}

// ---------------------------------------------------------------------------
// Cauchy transform of power-form R laws: Newton continuation solver.
// ---------------------------------------------------------------------------

namespace detail {

struct PowerREquation {
  cd c;
  double p;
  cd residual(cd g, cd z) const {
    return c * std::pow(g, p - 1.0) + 1.0 / g - z;
  }
  cd derivative(cd g) const {
    return c * (p - 1.0) * std::pow(g, p - 2.0) - 1.0 / (g * g);
  }
};

/// Damped Newton iteration constrained to the branch with Im G <= 0.
/// Returns the final residual magnitude; success means residual <= tol.
inline double newton_lower_branch(const PowerREquation& eq, cd z, cd& g,
                                  double tol, int max_iter = 200) {
  cd f = eq.residual(g, z);
  double fn = std::abs(f);
  for (int it = 0; it < max_iter; ++it) {
    if (fn <= tol) {
      // two polishing steps; keep the best iterate
      for (int extra = 0; extra < 2; ++extra) {
        const cd d = eq.derivative(g);
        if (std::abs(d) == 0.0) break;
        const cd cand = g - f / d;
        if (cand.imag() > 0.0) break;
        const cd fc = eq.residual(cand, z);
        if (std::abs(fc) >= fn) break;
        g = cand;
        f = fc;
        fn = std::abs(f);
      }
      return fn;
    }
    const cd d = eq.derivative(g);
    if (std::abs(d) == 0.0) return fn;
    const cd step = f / d;
    double lambda = 1.0;
    bool moved = false;
    for (int cut = 0; cut < 60; ++cut) {
      const cd cand = g - lambda * step;
      if (cand.imag() <= 0.0 && cand != cd(0.0, 0.0)) {
        const cd fc = eq.residual(cand, z);
        if (std::abs(fc) < fn) {
          g = cand;
          f = fc;
          fn = std::abs(fc);
          moved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!moved) return fn;
  }
  return fn;
}

}  // namespace detail

/// Solves c*G^{p-1} + 1/G = z for the Cauchy-transform branch (Im G < 0 when
/// Im z > 0), by Newton iteration with continuation from large imaginary part
/// where G ~ 1/z. The convergence target is 1e-12 * max(1, |z|).
inline cd cauchy_power_R(cd c, double p, cd z) {
  if (!(z.imag() > 0.0))
    throw branch_error("cauchy_power_R: z must lie in the upper half-plane");
  const detail::PowerREquation eq{c, p};
  const double tol = 1e-12 * std::max(1.0, std::abs(z));
  double last_residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 3; ++attempt) {
    const int steps = 32 << (2 * attempt);
    const double y_top = std::max(8.0, 2.0 * std::abs(z)) * (attempt + 1);
    cd g = 1.0 / cd(z.real(), y_top);
    bool ok = true;
    for (int k = 1; k <= steps && ok; ++k) {
      const double y =
          y_top * std::pow(z.imag() / y_top, static_cast<double>(k) / steps);
      const cd zk(z.real(), y);
      const double res = detail::newton_lower_branch(
          eq, zk, g, 1e-12 * std::max(1.0, std::abs(zk)));
      ok = res <= 1e-10 * std::max(1.0, std::abs(zk));
    }
    if (ok) {
      last_residual = detail::newton_lower_branch(eq, z, g, tol);
      if (last_residual <= tol) return g;
    }
  }
  throw convergence_error("cauchy_power_R: Newton continuation failed",
                          last_residual);
}

/// Same equation solved from a warm start; falls back to full continuation.
inline cd cauchy_power_R_warm(cd c, double p, cd z, cd warm) {
  const detail::PowerREquation eq{c, p};
  const double tol = 1e-12 * std::max(1.0, std::abs(z));
  cd g = warm;
  if (g.imag() <= 0.0 && g != cd(0.0, 0.0)) {
    const double res = detail::newton_lower_branch(eq, z, g, tol);
    if (res <= tol) return g;
  }
  return cauchy_power_R(c, p, z);
}

namespace detail {

/// Boundary density -Im G(x + i0)/pi via the fixed epsilon ladder
/// 1e-2, ..., 1e-8 and Neville extrapolation in h = sqrt(eps). The sqrt
/// variable keeps the extrapolation exact at square-root support edges.
inline double power_r_boundary_density(cd c, double p, double x) {
  constexpr int kLadder = 7;
  double vals[kLadder];
  cd g = cauchy_power_R(c, p, cd(x, 1e-2));
  vals[0] = -g.imag() / kPi;
  for (int k = 1; k < kLadder; ++k) {
    const double eps = 1e-2 * std::pow(10.0, -k);
    g = cauchy_power_R_warm(c, p, cd(x, eps), g);
    vals[k] = -g.imag() / kPi;
  }
  const double q = std::sqrt(10.0);
  double t[kLadder];
  for (int k = 0; k < kLadder; ++k) t[k] = vals[k];
  for (int j = 1; j < kLadder; ++j) {
    const double qj = std::pow(q, j);
    for (int k = kLadder - 1; k >= j; --k)
      t[k] = (qj * t[k] - t[k - 1]) / (qj - 1.0);
  }
  return std::max(0.0, t[kLadder - 1]);
}

}  // namespace detail

/// Density of a power-form R law on the real line. Laws without symmetric
/// support live on (0, inf); their density is 0 for x <= 0.
inline double stable_density(const StableLaw& law, double x) {
  if (!law.symmetric_support() && x <= 0.0) return 0.0;
  return detail::power_r_boundary_density(law.r_coeff, law.r_power, x);
}

/// CDF by adaptive Simpson quadrature of the density (absolute tol 1e-8).
inline double stable_cdf(const StableLaw& law, double x) {
  const auto f = [&law](double t) { return stable_density(law, t); };
  if (law.symmetric_support()) {
    if (x == 0.0) return 0.5;
    const double half = adaptive_simpson(f, 0.0, std::abs(x), 1e-8);
    return x > 0.0 ? 0.5 + half : 0.5 - half;
  }
  if (x <= 0.0) return 0.0;
  return adaptive_simpson(f, 0.0, x, 1e-8);
}

/// Quantile by bisection on stable_cdf.
inline double stable_quantile(const StableLaw& law, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw config_error("stable_quantile: u must lie in (0, 1)");
  double lo, hi;
  if (law.symmetric_support()) {
    lo = -1.0;
    hi = 1.0;
    while (stable_cdf(law, lo) > u) {
      lo *= 2.0;
      if (lo < -1e12) throw quantile_error("stable_quantile: bracket blew up");
    }
    while (stable_cdf(law, hi) < u) {
      hi *= 2.0;
      if (hi > 1e12) throw quantile_error("stable_quantile: bracket blew up");
    }
  } else {
    lo = 0.0;
    hi = 1.0;
    while (stable_cdf(law, hi) < u) {
      hi *= 2.0;
      if (hi > 1e12) throw quantile_error("stable_quantile: bracket blew up");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, std::abs(lo));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    (stable_cdf(law, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Tabulated densities (fast CDF / quantile evaluation for Monte Carlo).
// ---------------------------------------------------------------------------

/// Density table over the nonnegative half-line with a fitted power tail.
/// For symmetric laws the table stores the half-line mass and the CDF and
/// quantile account for the reflection.
struct DensityTable {
  std::vector<double> x;
  std::vector<double> pdf;
  std::vector<double> cum;  // integral of pdf over [x.front(), x[i]]
  bool symmetric = false;
  double tail_exponent = 0.0;  // pdf ~ tail_coeff * t^{tail_exponent}
  double tail_coeff = 0.0;
  double half_total = 0.0;  // mass on [0, inf) including the analytic tail
  double total_mass = 0.0;  // full-law mass (should be 1)
  double power_region_start = 0.0;  // beyond it, segments interpolate as powers

  double tail_mass_beyond(double v) const {
    if (tail_coeff <= 0.0) return 0.0;
    const double p = -tail_exponent - 1.0;
    return tail_coeff * std::pow(v, -p) / p;
  }

  /// Local power exponent of the density across segment i, or 0 when the
  /// segment is not suited for power interpolation.
  double segment_power(std::size_t i) const {
    if (x[i] < power_region_start || x[i] <= 0.0) return 0.0;
    if (!(pdf[i] > 0.0) || !(pdf[i + 1] > 0.0)) return 0.0;
    const double q = std::log(pdf[i] / pdf[i + 1]) / std::log(x[i + 1] / x[i]);
    if (!(std::abs(q - 1.0) > 1e-9)) return 0.0;
    return q;
  }

  /// Integral of the half-line density over [0, v].
  double half_mass(double v) const {
    if (v <= x.front()) return 0.0;
    if (v >= x.back()) return half_total - tail_mass_beyond(v);
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double q = segment_power(i);
    if (q != 0.0) {
      // pdf behaves like c t^{-q} across the segment; c matches the stored mass
      const double denom = std::pow(x[i + 1], 1.0 - q) - std::pow(x[i], 1.0 - q);
      const double w =
          (std::pow(v, 1.0 - q) - std::pow(x[i], 1.0 - q)) / denom;
      return cum[i] + w * (cum[i + 1] - cum[i]);
    }
    const double w = (v - x[i]) / (x[i + 1] - x[i]);
    return cum[i] + w * (cum[i + 1] - cum[i]);
  }

  double cdf(double v) const {
    if (symmetric) {
      const double h = half_mass(std::abs(v)) / (2.0 * half_total);
      return v >= 0.0 ? 0.5 + h : 0.5 - h;
    }
    return v <= 0.0 ? 0.0 : half_mass(v) / half_total;
  }

  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
      throw config_error("DensityTable::quantile: u must lie in (0, 1)");
    if (symmetric) {
      const double m = (u - 0.5) * 2.0 * half_total;
      const double ax = invert_half_mass(std::abs(m));
      return u >= 0.5 ? ax : -ax;
    }
    return invert_half_mass(u * half_total);
  }

 private:
  double invert_half_mass(double target) const {
    if (target <= 0.0) return x.front();
    if (target >= cum.back()) {
      const double rest = half_total - target;
      const double p = -tail_exponent - 1.0;
      if (tail_coeff <= 0.0 || rest <= 0.0) return x.back();
      const double v = std::pow(tail_coeff / (p * rest), 1.0 / p);
      return std::max(v, x.back());
    }
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cum.begin());
    if (i == 0) return x.front();
    const double span = cum[i] - cum[i - 1];
    const double w = span > 0.0 ? (target - cum[i - 1]) / span : 0.0;
    const double q = segment_power(i - 1);
    if (q != 0.0 && span > 0.0) {
      const double a = std::pow(x[i - 1], 1.0 - q);
      const double b = std::pow(x[i], 1.0 - q);
      return std::pow(a + w * (b - a), 1.0 / (1.0 - q));
    }
    return x[i - 1] + w * (x[i] - x[i - 1]);
  }
};

/// Builds a density table for a power-form R law. Node-to-node cumulative
/// masses use adaptive Simpson; the far tail is closed analytically with the
/// law's known power decay.
inline DensityTable make_density_table(const StableLaw& law,
                                       int core_points = 600,
                                       double core_extent = 8.0) {
  DensityTable table;
  table.symmetric = law.symmetric_support();
  table.tail_exponent = law.tail_exponent();
  table.power_region_start = core_extent;
  const double p = law.r_power;

  for (int i = 0; i < core_points; ++i)
    table.x.push_back(core_extent * i / (core_points - 1));
  double v = core_extent;
  while (v < 1e12) {
    v *= 1.2;
    table.x.push_back(v);
    const double f = stable_density(law, v);
    if (f * v / p < 1e-9) break;
  }

  table.pdf.resize(table.x.size());
  for (std::size_t i = 0; i < table.x.size(); ++i)
    table.pdf[i] = stable_density(law, table.x[i]);

  table.cum.resize(table.x.size());
  table.cum[0] = 0.0;
  const auto f = [&law](double t) { return stable_density(law, t); };
  for (std::size_t i = 1; i < table.x.size(); ++i)
    table.cum[i] =
        table.cum[i - 1] +
        adaptive_simpson(f, table.x[i - 1], table.x[i], 1e-11);

  // fit the tail constant at the outermost nodes
  double coeff = 0.0;
  int used = 0;
  for (std::size_t k = table.x.size() - 3; k < table.x.size(); ++k) {
    if (table.pdf[k] > 0.0) {
      coeff += table.pdf[k] * std::pow(table.x[k], p + 1.0);
      ++used;
    }
  }
  table.tail_coeff = used > 0 ? coeff / used : 0.0;

  table.half_total = table.cum.back() + table.tail_mass_beyond(table.x.back());
  table.total_mass = table.symmetric ? 2.0 * table.half_total : table.half_total;
  if (std::abs(table.total_mass - 1.0) > 5e-3)
    throw numeric_error("make_density_table: mass " +
                        std::to_string(table.total_mass) +
                        " is far from 1; table construction failed");
  return table;
}

// ---------------------------------------------------------------------------
// The xi^2 law of the stable matrix model.
// ---------------------------------------------------------------------------

/// Law of xi^2 where |xi| feeds the diagonal of the Y T U* model: a power-R
/// law with coefficient b(alpha) and power alpha/2, so its S-transform is
/// z^{(2/alpha)-1} / b^{2/alpha}. Validated at runtime by the numeric
/// S-transform round trip rather than assumed.
inline StableLaw xi_squared_law(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw config_error("xi_squared_law: alpha must lie in (0, 2)");
  StableLaw law = StableLaw::power_r(stable_b(alpha), alpha / 2.0);
  law.alpha = alpha;
  return law;
}

inline const DensityTable& xi_squared_table(double alpha) {
  static std::map<double, DensityTable> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(alpha);
  if (it == cache.end())
    it = cache.emplace(alpha, make_density_table(xi_squared_law(alpha))).first;
  return it->second;
}

/// Quantile of |xi| at u, via |xi| = sqrt(xi^2).
inline double quantile_abs_xi(double alpha, double u) {
  if (!(u > 0.0 && u < 1.0))
    throw config_error("quantile_abs_xi: u must lie in (0, 1)");
  return std::sqrt(xi_squared_table(alpha).quantile(u));
}

// ---------------------------------------------------------------------------
// Marchenko-Pastur law (parameter 1).
// ---------------------------------------------------------------------------

inline double mp_density(double x) {
  if (x <= 0.0 || x >= 4.0) return 0.0;
  return std::sqrt((4.0 - x) / x) / (2.0 * kPi);
}

/// CDF by quadrature under the substitution x = 4 sin^2(theta), which turns
/// the endpoint singularities into a smooth integrand.
inline double mp_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  const double theta = std::asin(std::sqrt(0.25 * x));
  const auto g = [](double t) { return (2.0 / kPi) * (1.0 + std::cos(2.0 * t)); };
  return adaptive_simpson(g, 0.0, theta, 1e-12);
}

inline double mp_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw config_error("mp_quantile: u must lie in (0, 1)");
  double lo = 0.0, hi = 4.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mp_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Numeric S-transform from a Cauchy transform (used for round-trip checks).
// ---------------------------------------------------------------------------

/// S-transform of a positive-support law at real z in (-1, 0), computed from
/// its Cauchy transform: invert the moment generating function
/// psi(u) = G(1/u)/u - 1 (u < 0) and set S(z) = chi(z) (1+z)/z.
inline double numeric_s_transform(const std::function<cd(cd)>& cauchy,
                                  double z) {
  if (!(z > -1.0 && z < 0.0))
    throw config_error("numeric_s_transform: z must lie in (-1, 0)");
  const auto psi = [&cauchy](double u) {
    const cd g = cauchy(cd(1.0 / u, 1e-8));
    return (g / u).real() - 1.0;
  };
  double hi = -1e-9;
  double lo = -1.0;
  while (psi(lo) > z) {
    lo *= 2.0;
    if (lo < -1e12)
      throw quantile_error("numeric_s_transform: bracket exhausted");
  }
  for (int it = 0;
       it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi(mid) > z ? hi : lo) = mid;
  }
  const double u = 0.5 * (lo + hi);
  return u * (1.0 + z) / z;
}

}  // namespace freelim
