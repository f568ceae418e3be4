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
#include <cstdint>
#include <string>

#include "freelim/common.hpp"

namespace freelim {

// Self-contained generators so that streams are bit-reproducible across
// platforms and standard libraries.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ engine seeded through splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

/// Derives the seed of an independent substream from (master seed,
/// replicate index, factor id). Distinct triples give distinct streams.
inline std::uint64_t derive_stream_seed(std::uint64_t master,
                                        std::uint64_t replicate,
                                        std::uint64_t factor) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (replicate * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL);
  h = splitmix64(s);
  s = h ^ (factor * 0x8CB92BA72F3D8DD7ULL + 0x2545F4914F6CDD1DULL);
  return splitmix64(s);
}

/// Catalog of normalized matrix-entry distributions: mean 0, E|X|^2 = 1,
/// and E X^2 = 0 for the complex kinds.
enum class EntryDist {
  gaussian_real,
  gaussian_complex,
  rademacher,
  uniform_symmetric,
  centered_exponential,
  bernoulli_pm_complex,
};

inline bool is_complex_dist(EntryDist d) {
  return d == EntryDist::gaussian_complex || d == EntryDist::bernoulli_pm_complex;
}

inline const char* entry_dist_name(EntryDist d) {
  switch (d) {
    case EntryDist::gaussian_real: return "gaussian-real";
    case EntryDist::gaussian_complex: return "gaussian-complex";
    case EntryDist::rademacher: return "rademacher";
    case EntryDist::uniform_symmetric: return "uniform-symmetric";
    case EntryDist::centered_exponential: return "centered-exponential";
    case EntryDist::bernoulli_pm_complex: return "bernoulli-pm-complex";
  }
  return "unknown";
}

inline EntryDist entry_dist_from_name(const std::string& name) {
  if (name == "gaussian-real") return EntryDist::gaussian_real;
  if (name == "gaussian-complex") return EntryDist::gaussian_complex;
  if (name == "rademacher") return EntryDist::rademacher;
  if (name == "uniform-symmetric") return EntryDist::uniform_symmetric;
  if (name == "centered-exponential") return EntryDist::centered_exponential;
  if (name == "bernoulli-pm-complex") return EntryDist::bernoulli_pm_complex;
  throw config_error("unknown entry distribution: " + name);
}

/// One draw of the normalized entry law. Every kind consumes a fixed number
/// of engine words, so consumption patterns are reproducible.
inline cd sample_entry(EntryDist dist, Xoshiro256pp& rng) {
  switch (dist) {
    case EntryDist::gaussian_real: {
      const double u1 = rng.uniform_pos();
      const double u2 = rng.uniform();
      return cd(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2), 0.0);
    }
    case EntryDist::gaussian_complex: {
      // One radius + one phase gives a standard complex normal.
      const double u1 = rng.uniform_pos();
      const double u2 = rng.uniform();
      const double r = std::sqrt(-std::log(u1));
      return cd(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
    }
    case EntryDist::rademacher:
      return cd((rng.next() & 1u) ? 1.0 : -1.0, 0.0);
    case EntryDist::uniform_symmetric:
      return cd(std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0), 0.0);
    case EntryDist::centered_exponential:
      return cd(-std::log(rng.uniform_pos()) - 1.0, 0.0);
    case EntryDist::bernoulli_pm_complex: {
      switch (rng.next() & 3u) {
        case 0: return cd(1.0, 0.0);
        case 1: return cd(-1.0, 0.0);
        case 2: return cd(0.0, 1.0);
        default: return cd(0.0, -1.0);
      }
    }
  }
  throw config_error("unknown entry distribution");
}

}  // namespace freelim
