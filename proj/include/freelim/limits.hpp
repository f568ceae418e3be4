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

#include <cmath>
#include <functional>
#include <limits>

#include "freelim/common.hpp"
#include "freelim/transforms.hpp"

namespace freelim {

// ---------------------------------------------------------------------------
// Closed radial forms for products with l = 0..3 inverse factors.
// ---------------------------------------------------------------------------

namespace detail {

/// v(r) of the l=3 law; w(r) = 1/v(r) since v*w = 1 identically.
inline double closed3_v(double r) {
  const double s = std::sqrt(4.0 + 27.0 * r * r);
  return std::cbrt(0.5 * s + 0.5 * std::sqrt(27.0) * r);
}

}  // namespace detail

/// Radial CDF psi_l(r) of the limiting eigenvalue law for l inverse factors.
/// psi solves psi = r^2 (1 - psi)^l; for l=3 the depressed cubic is solved by
/// Cardano's v, w radicals.
inline double psi_closed(int l, double r) {
  if (l < 0 || l > 3) throw config_error("psi_closed: l must be in 0..3");
  if (r <= 0.0) return 0.0;
  const double r2 = r * r;
  switch (l) {
    case 0:
      return std::min(r2, 1.0);
    case 1:
      return r2 / (1.0 + r2);
    case 2:
      return 1.0 - 2.0 / (std::sqrt(1.0 + 4.0 * r2) + 1.0);
    default: {
      const double v = detail::closed3_v(r);
      const double w = 1.0 / v;
      return 1.0 - 3.0 / (1.0 + v * v + w * w);
    }
  }
}

/// Radial densities f_l(r); f_l(0) = 1/pi for every l.
inline double density_closed(int l, double r) {
  if (l < 0 || l > 3) throw config_error("density_closed: l must be in 0..3");
  if (r < 0.0) return 0.0;
  const double r2 = r * r;
  switch (l) {
    case 0:
      return r <= 1.0 ? 1.0 / kPi : 0.0;
    case 1: {
      const double d = 1.0 + r2;
      return 1.0 / (kPi * d * d);
    }
    case 2: {
      const double s = std::sqrt(1.0 + 4.0 * r2);
      return 2.0 / (kPi * s * (1.0 + 2.0 * r2 + s));
    }
    default: {
      const double v = detail::closed3_v(r);
      const double w = 1.0 / v;
      const double s = std::sqrt(4.0 + 27.0 * r2);
      const double m = 1.0 + v * v + w * w;
      return 27.0 * (v + w) / (kPi * s * m * m * m);
    }
  }
}

// ---------------------------------------------------------------------------
// General radial solvers.
// ---------------------------------------------------------------------------

/// Radial CDF of the rotation-invariant law attached to the symmetric free
/// stable family: the unique root in (0, 1) of
/// psi / (1 - psi)^{(2/alpha) - 1} = r^2. alpha = 2 degenerates to min(r^2, 1).
inline double psi_stable(double alpha, double r) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw config_error("psi_stable: alpha must lie in (0, 2]");
  if (r <= 0.0) return 0.0;
  if (alpha == 2.0) return std::min(r * r, 1.0);
  const double beta = 2.0 / alpha - 1.0;
  const double target = 2.0 * std::log(r);
  double lo = 0.0;
  double hi = std::nextafter(1.0, 0.0);
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = std::log(mid) - beta * std::log1p(-mid) - target;
    (g < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Radial density f(r) = psi (1 - psi) / (pi r^2 (1 + (2/alpha - 2) psi)),
/// extended continuously by 1/pi at r = 0.
inline double density_stable(double alpha, double r) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw config_error("density_stable: alpha must lie in (0, 2]");
  if (r < 0.0) return 0.0;
  if (r == 0.0) return 1.0 / kPi;
  if (alpha == 2.0) return r <= 1.0 ? 1.0 / kPi : 0.0;
  const double psi = psi_stable(alpha, r);
  return psi * (1.0 - psi) /
         (kPi * r * r * (1.0 + (2.0 / alpha - 2.0) * psi));
}

/// Radial CDF from a supplied S-transform S_V of the symmetrized singular
/// value law: solves psi (1-psi) = -r^2 (1-psi)^2 S_V(-(1-psi))^2 through the
/// monotone reformulation psi / ((1-psi) * (-S_V^2)) = r^2. Rejects inputs for
/// which the reformulated left side is not nondecreasing on (0, 1).
inline double psi_from_s_transform(const std::function<cd(cd)>& s_transform,
                                   double r) {
  if (r <= 0.0) return 0.0;
  const auto minus_s_squared = [&s_transform](double psi) -> double {
    const cd s = s_transform(cd(-(1.0 - psi), 0.0));
    const cd t = -(s * s);
    if (!(t.real() > 0.0) ||
        std::abs(t.imag()) > 1e-9 * std::max(1.0, std::abs(t.real())))
      throw non_monotone_error(
          "psi_from_s_transform: -S_V^2 is not positive on (-1, 0)");
    return t.real();
  };
  const auto lhs = [&](double psi) {
    return psi / ((1.0 - psi) * minus_s_squared(psi));
  };

  const double hi_cap = 1.0 - 1e-14;
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 64; ++k) {
    const double psi = hi_cap * k / 64.0;
    const double value = lhs(psi);
    if (value < prev * (1.0 - 1e-9) - 1e-12)
      throw non_monotone_error(
          "psi_from_s_transform: reformulated equation is not monotone");
    prev = value;
  }

  const double target = r * r;
  double lo = 0.0, hi = hi_cap;
  if (lhs(hi) < target) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lhs(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Rotation-invariant limit laws on the complex plane.
// ---------------------------------------------------------------------------

enum class LimitLawKind { closed_form, stable, via_s_transform };

/// A rotation-invariant law on C described by its radial CDF psi and radial
/// density f. Scaling z -> c z is carried as a wrapper: psi_c(r) = psi(r/c),
/// f_c(r) = f(r/c)/c^2.
struct LimitLaw {
  LimitLawKind kind = LimitLawKind::stable;
  int l = -1;          // closed_form laws
  double alpha = 0.0;  // stable laws
  double scale = 1.0;
  std::function<double(double)> psi_base;
  std::function<double(double)> density_base;

  double psi(double r) const { return psi_base(r / scale); }
  double density(double r) const {
    return density_base(r / scale) / (scale * scale);
  }
  /// The radial CDF of the law coincides with psi.
  double radial_cdf(double r) const { return psi(r); }
};

inline LimitLaw limit_law_closed(int l) {
  if (l < 0 || l > 3) throw config_error("limit_law_closed: l must be in 0..3");
  LimitLaw law;
  law.kind = LimitLawKind::closed_form;
  law.l = l;
  law.alpha = 2.0 / (l + 1);
  law.psi_base = [l](double r) { return psi_closed(l, r); };
  law.density_base = [l](double r) { return density_closed(l, r); };
  return law;
}

inline LimitLaw limit_law_stable(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw config_error("limit_law_stable: alpha must lie in (0, 2]");
  LimitLaw law;
  law.kind = LimitLawKind::stable;
  law.alpha = alpha;
  law.psi_base = [alpha](double r) { return psi_stable(alpha, r); };
  law.density_base = [alpha](double r) { return density_stable(alpha, r); };
  return law;
}

/// Limit law evaluated through the general S-transform solver. The density is
/// the radial derivative psi'(r) / (2 pi r), taken by central differences.
inline LimitLaw limit_law_from_s_transform(std::function<cd(cd)> s_transform) {
  LimitLaw law;
  law.kind = LimitLawKind::via_s_transform;
  auto s_shared = std::make_shared<std::function<cd(cd)>>(std::move(s_transform));
  law.psi_base = [s_shared](double r) {
    return psi_from_s_transform(*s_shared, r);
  };
  law.density_base = [s_shared](double r) -> double {
    if (r <= 0.0) return 0.0;
    const double h = 1e-5 * (1.0 + r);
    const double up = psi_from_s_transform(*s_shared, r + h);
    const double dn = psi_from_s_transform(*s_shared, std::max(r - h, 0.0));
    return (up - dn) / (2.0 * h) / (2.0 * kPi * r);
  };
  return law;
}

/// Scaling z -> c z of a limit law.
inline LimitLaw scale_law(LimitLaw law, double c) {
  if (!(c > 0.0)) throw config_error("scale_law: c must be > 0");
  law.scale *= c;
  return law;
}

/// Scaling x -> c x of a power-R law: R picks up a factor c^p.
inline StableLaw scale_law(const StableLaw& law, double c) {
  if (!(c > 0.0)) throw config_error("scale_law: c must be > 0");
  StableLaw scaled = StableLaw::power_r(
      std::pow(c, law.r_power) * law.r_coeff, law.r_power);
  scaled.alpha = law.alpha;
  return scaled;
}

/// The correspondence sending a symmetric stable law on the line to its
/// rotation-invariant companion on the plane. Accepts the symmetric family
/// and its dilations; other inputs have no closed image here.
inline LimitLaw h_map(const StableLaw& law) {
  if (law.variant == StableVariant::symmetric)
    return limit_law_stable(law.alpha);
  if (law.symmetric_support()) {
    // dilated symmetric law: recover the scale from |c| = s^p
    const double s = std::pow(std::abs(law.r_coeff), 1.0 / law.r_power);
    return scale_law(limit_law_stable(law.r_power), s);
  }
  throw config_error("h_map: law must be symmetric on the real line");
}

struct OplusStableResult {
  LimitLaw law;        // law of the m-fold sum
  double normalizer;   // m^{-1/alpha}; rescaling by it recovers the base law
};

/// m-fold additive convolution on the stable family: the sum law is the base
/// law dilated by m^{1/alpha}.
inline OplusStableResult oplus_stable(double alpha, int m) {
  if (m < 1) throw config_error("oplus_stable: m must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw config_error("oplus_stable: alpha must lie in (0, 2]");
  const double c = std::pow(static_cast<double>(m), 1.0 / alpha);
  return {scale_law(limit_law_stable(alpha), c), 1.0 / c};
}

}  // namespace freelim
