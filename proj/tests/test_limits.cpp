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

#include <catch2/catch.hpp>

#include <cmath>

#include "freelim/limits.hpp"
#include "freelim/quadrature.hpp"

using namespace freelim;

TEST_CASE("closed psi values") {
  CHECK(psi_closed(0, 0.5) == 0.25);
  CHECK(psi_closed(0, 2.0) == 1.0);
  CHECK(std::abs(psi_closed(1, 1.0) - 0.5) < 1e-15);
  CHECK(std::abs(psi_closed(2, 1.0) - (3.0 - std::sqrt(5.0)) / 2.0) < 1e-15);
  // l=3: u = 1 - psi solves r^2 u^3 + u - 1 = 0; at r=2 the root is exactly 1/2
  CHECK(std::abs(psi_closed(3, 2.0) - 0.5) < 1e-14);
  for (int l = 0; l <= 3; ++l) CHECK(psi_closed(l, 0.0) == 0.0);
}

TEST_CASE("closed psi satisfies its fixed point equation") {
  for (int l = 1; l <= 3; ++l) {
    for (double r = 0.05; r <= 10.0; r += 0.35) {
      const double psi = psi_closed(l, r);
      const double residual = psi - r * r * std::pow(1.0 - psi, l);
      CHECK(std::abs(residual) < 1e-12);
    }
  }
}

TEST_CASE("closed densities at the origin equal 1/pi") {
  for (int l = 0; l <= 3; ++l)
    CHECK(std::abs(density_closed(l, 0.0) - 1.0 / kPi) < 1e-12);
}

TEST_CASE("closed density values") {
  // f_2(1) = 2 / (pi sqrt(5) (3 + sqrt(5)))
  const double f2 = 2.0 / (kPi * std::sqrt(5.0) * (3.0 + std::sqrt(5.0)));
  CHECK(std::abs(density_closed(2, 1.0) - f2) < 1e-15);
  CHECK(std::abs(density_closed(1, 1.0) - 1.0 / (4.0 * kPi)) < 1e-15);
  CHECK(density_closed(0, 2.0) == 0.0);
}

TEST_CASE("psi_stable solves the radial equation") {
  CHECK(std::abs(psi_stable(1.0, 1.0) - 0.5) < 1e-12);
  CHECK(std::abs(psi_stable(2.0 / 3.0, 1.0) - 0.3819660112501051) < 1e-12);
  CHECK(psi_stable(1.3, 0.0) == 0.0);
  CHECK(std::abs(psi_stable(2.0, 0.7) - 0.49) < 1e-15);
  CHECK(psi_stable(2.0, 3.0) == 1.0);
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (double r = 0.1; r < 8.0; r += 0.9) {
      const double psi = psi_stable(alpha, r);
      const double residual =
          psi / std::pow(1.0 - psi, 2.0 / alpha - 1.0) - r * r;
      CHECK(std::abs(residual) < 1e-9 * std::max(1.0, r * r));
    }
  }
}

TEST_CASE("psi_stable is strictly increasing with range in [0, 1)") {
  for (double alpha : {0.6, 1.0, 1.7}) {
    double prev = 0.0;
    for (double r = 0.05; r < 12.0; r += 0.2) {
      const double psi = psi_stable(alpha, r);
      CHECK(psi > prev);
      CHECK(psi < 1.0);
      prev = psi;
    }
  }
}

TEST_CASE("cross-solver agreement with the closed forms") {
  for (int l = 0; l <= 3; ++l) {
    const double alpha = 2.0 / (l + 1);
    for (double r = 0.0; r <= 10.0; r += 0.25)
      CHECK(std::abs(psi_stable(alpha, r) - psi_closed(l, r)) < 1e-10);
  }
}

TEST_CASE("density_stable closed values") {
  CHECK(std::abs(density_stable(1.0, 1.0) - 1.0 / (4.0 * kPi)) < 1e-12);
  CHECK(std::abs(density_stable(2.0, 0.3) - 1.0 / kPi) < 1e-15);
  CHECK(density_stable(2.0, 1.5) == 0.0);
  CHECK(std::abs(density_stable(2.0 / 3.0, 1.0) - density_closed(2, 1.0)) < 1e-12);
  CHECK(std::abs(density_stable(0.5, 0.0) - 1.0 / kPi) < 1e-15);
}

TEST_CASE("general solver matches the stable family") {
  for (double alpha : {1.0, 2.0 / 3.0}) {
    const StableLaw law = StableLaw::symmetric(alpha);
    const auto s = [&law](cd z) { return s_stable(law, z); };
    for (double r = 0.1; r <= 6.0; r += 0.5)
      CHECK(std::abs(psi_from_s_transform(s, r) - psi_stable(alpha, r)) < 1e-9);
  }
  CHECK(psi_from_s_transform([](cd z) { return s_stable(StableLaw::symmetric(1.0), z); },
                             0.0) == 0.0);
}

TEST_CASE("general solver accepts the explicit l=2 transform") {
  // S_V(z) = i^l z^{(l-1)/2} with l = 2, powers on the slit domain
  const auto s = [](cd z) { return cd(-1.0, 0.0) * slit_pow(z, 0.5); };
  for (double r = 0.2; r <= 5.0; r += 0.4)
    CHECK(std::abs(psi_from_s_transform(s, r) - psi_closed(2, r)) < 1e-9);
}

TEST_CASE("general solver rejects non-monotone equations") {
  const auto wiggly = [](cd z) {
    const double v = std::abs(z.real());
    return cd(0.0, std::exp(1.5 * std::sin(10.0 * v)));
  };
  CHECK_THROWS_AS(psi_from_s_transform(wiggly, 1.0), non_monotone_error);
}

TEST_CASE("limit law CDF equals psi and integrates the density") {
  // radial CDF identity: psi(r) = int_0^r 2 pi s f(s) ds
  for (int l = 0; l <= 3; ++l) {
    const LimitLaw law = limit_law_closed(l);
    for (double r : {0.5, 1.0, 2.5}) {
      double integral = 0.0;
      // split at the closed-form support edge of l=0
      const double split = std::min(1.0, r);
      const auto f = [&law](double s) { return 2.0 * kPi * s * law.density(s); };
      integral += adaptive_simpson(f, 0.0, split, 1e-10);
      if (r > split) integral += adaptive_simpson(f, split, r, 1e-10);
      CHECK(std::abs(integral - law.psi(r)) < 1e-8);
      CHECK(law.radial_cdf(r) == law.psi(r));
    }
  }
  for (double alpha : {0.8, 1.4}) {
    const LimitLaw law = limit_law_stable(alpha);
    for (double r : {0.5, 2.0, 6.0}) {
      const auto f = [&law](double s) { return 2.0 * kPi * s * law.density(s); };
      const double integral = adaptive_simpson(f, 0.0, r, 1e-10);
      CHECK(std::abs(integral - law.psi(r)) < 1e-8);
    }
  }
}

TEST_CASE("limit laws carry unit total mass") {
  // psi(R) -> 1: total mass of 2 pi r f(r) dr equals the psi limit
  CHECK(std::abs(limit_law_closed(1).psi(3e4) - 1.0) < 1e-6);
  CHECK(std::abs(limit_law_stable(0.7).psi(1e13) - 1.0) < 1e-6);
  CHECK(std::abs(limit_law_stable(1.5).psi(1e6) - 1.0) < 1e-6);
  CHECK(limit_law_closed(0).psi(1.0) == 1.0);
}

TEST_CASE("h_map sends the stable family to its radial laws") {
  const LimitLaw circ = h_map(StableLaw::symmetric(2.0));
  CHECK(std::abs(circ.density(0.5) - 1.0 / kPi) < 1e-15);
  CHECK(std::abs(circ.psi(0.7) - 0.49) < 1e-15);

  const LimitLaw sph = h_map(StableLaw::symmetric(1.0));
  for (double r = 0.0; r <= 4.0; r += 0.5) {
    const double want = 1.0 / (kPi * (1.0 + r * r) * (1.0 + r * r));
    CHECK(std::abs(sph.density(r) - want) < 1e-10);
  }

  for (int l : {2, 3}) {
    const LimitLaw law = h_map(StableLaw::symmetric(2.0 / (l + 1)));
    for (double r = 0.1; r <= 3.0; r += 0.3)
      CHECK(std::abs(law.density(r) - density_closed(l, r)) < 1e-10);
  }

  CHECK_THROWS_AS(h_map(StableLaw::positive(0.5)), config_error);
}

TEST_CASE("scaling laws") {
  const LimitLaw sph = h_map(StableLaw::symmetric(1.0));
  CHECK(scale_law(sph, 1.0).psi(0.7) == sph.psi(0.7));

  // m independent spherical summands rescale to density m^2 / (pi (m^2+r^2)^2)
  const double m = 3.0;
  const LimitLaw scaled = scale_law(sph, m);
  for (double r = 0.0; r <= 5.0; r += 0.5) {
    const double want = m * m / (kPi * std::pow(m * m + r * r, 2.0));
    CHECK(std::abs(scaled.density(r) - want) < 1e-12);
  }
  for (double r : {0.4, 1.3}) CHECK(scaled.radial_cdf(m * r) == sph.radial_cdf(r));

  // the correspondence commutes with dilations
  const StableLaw dilated = scale_law(StableLaw::symmetric(1.0), 2.5);
  const LimitLaw via_line = h_map(dilated);
  const LimitLaw via_plane = scale_law(h_map(StableLaw::symmetric(1.0)), 2.5);
  for (double r : {0.3, 1.0, 4.0})
    CHECK(std::abs(via_line.psi(r) - via_plane.psi(r)) < 1e-12);
}

TEST_CASE("oplus on the stable family") {
  const auto r1 = oplus_stable(1.0, 4);
  CHECK(std::abs(r1.normalizer - 0.25) < 1e-15);
  const auto r2 = oplus_stable(2.0, 9);
  CHECK(std::abs(r2.normalizer - 1.0 / 3.0) < 1e-15);
  const auto r3 = oplus_stable(1.3, 1);
  CHECK(r3.normalizer == 1.0);
  CHECK(r3.law.scale == 1.0);
  // sum law is the dilated base law
  const LimitLaw base = limit_law_stable(1.0);
  for (double r : {0.5, 2.0})
    CHECK(std::abs(r1.law.psi(r) - base.psi(r * r1.normalizer)) < 1e-12);
}
