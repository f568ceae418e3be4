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

#include <set>

#include "freelim/rng.hpp"

using namespace freelim;

TEST_CASE("engines are deterministic per seed") {
  Xoshiro256pp a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    all_equal = all_equal && (va == b.next());
    any_diff = any_diff || (va != c.next());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1)") {
  Xoshiro256pp rng(7);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n - 0.5) < 5e-3);
}

TEST_CASE("stream derivation separates replicates and factors") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t rep = 0; rep < 20; ++rep)
    for (std::uint64_t f = 0; f < 20; ++f)
      seeds.insert(derive_stream_seed(42, rep, f));
  CHECK(seeds.size() == 400);
  CHECK(derive_stream_seed(42, 1, 2) == derive_stream_seed(42, 1, 2));
  CHECK(derive_stream_seed(42, 1, 2) != derive_stream_seed(43, 1, 2));
}

TEST_CASE("entry distributions satisfy the moment normalization") {
  const EntryDist kinds[] = {
      EntryDist::gaussian_real,       EntryDist::gaussian_complex,
      EntryDist::rademacher,          EntryDist::uniform_symmetric,
      EntryDist::centered_exponential, EntryDist::bernoulli_pm_complex};
  const int n = 1000000;
  for (EntryDist d : kinds) {
    INFO("distribution " << entry_dist_name(d));
    Xoshiro256pp rng(1000 + static_cast<int>(d));
    cd mean = 0.0, second = 0.0;
    double abs2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const cd x = sample_entry(d, rng);
      mean += x;
      second += x * x;
      abs2 += std::norm(x);
    }
    mean /= n;
    second /= n;
    abs2 /= n;
    CHECK(std::abs(mean) < 5e-3);
    CHECK(std::abs(abs2 - 1.0) < 5e-3);
    if (is_complex_dist(d)) CHECK(std::abs(second) < 5e-3);
  }
}

TEST_CASE("entry distribution names round trip") {
  const EntryDist kinds[] = {
      EntryDist::gaussian_real,       EntryDist::gaussian_complex,
      EntryDist::rademacher,          EntryDist::uniform_symmetric,
      EntryDist::centered_exponential, EntryDist::bernoulli_pm_complex};
  for (EntryDist d : kinds)
    CHECK(entry_dist_from_name(entry_dist_name(d)) == d);
  CHECK_THROWS_AS(entry_dist_from_name("cauchy"), config_error);
}

TEST_CASE("real kinds have zero imaginary part") {
  Xoshiro256pp rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_entry(EntryDist::gaussian_real, rng).imag() == 0.0);
    CHECK(sample_entry(EntryDist::rademacher, rng).imag() == 0.0);
    CHECK(sample_entry(EntryDist::uniform_symmetric, rng).imag() == 0.0);
    CHECK(sample_entry(EntryDist::centered_exponential, rng).imag() == 0.0);
  }
}
