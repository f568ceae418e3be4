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
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "freelim/ensembles.hpp"
#include "freelim/io.hpp"
#include "freelim/limits.hpp"
#include "freelim/spectra.hpp"

namespace freelim {

using ordered_json = nlohmann::ordered_json;

enum class ExperimentKind {
  law_check,
  stability,
  power_stability,
  universality,
  matrix_model,
  singular_law,
};

inline const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::law_check: return "law-check";
    case ExperimentKind::stability: return "stability";
    case ExperimentKind::power_stability: return "power-stability";
    case ExperimentKind::universality: return "universality";
    case ExperimentKind::matrix_model: return "matrix-model";
    case ExperimentKind::singular_law: return "singular-law";
  }
  return "unknown";
}

inline ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "law-check") return ExperimentKind::law_check;
  if (name == "stability") return ExperimentKind::stability;
  if (name == "power-stability") return ExperimentKind::power_stability;
  if (name == "universality") return ExperimentKind::universality;
  if (name == "matrix-model") return ExperimentKind::matrix_model;
  if (name == "singular-law") return ExperimentKind::singular_law;
  throw config_error("unknown experiment kind: " + name);
}

/// Replicate ids of different lanes never collide (replicates per lane are
/// capped far below the stride).
inline constexpr std::uint64_t kLaneStride = 1ull << 20;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::law_check;
  int n = 0;
  int replicates = 1;
  int l = 0;
  int m = 1;
  double alpha = 1.0;
  std::vector<int> powers;
  MatrixWord word = MatrixWord::single_factor();
  bool word_set = false;
  std::vector<EntryDist> entry_dists{EntryDist::gaussian_complex};
  std::uint64_t master_seed = 0;
  double regularization_t = 0.0;
  int threads = 0;
  std::map<std::string, double> tolerances;

  MatrixWord effective_word() const {
    return word_set ? word : MatrixWord::inverse_product(l);
  }

  void validate() const {
    if (n < 8) throw config_error("config: n must be >= 8");
    if (replicates < 1) throw config_error("config: replicates must be >= 1");
    if (static_cast<std::uint64_t>(replicates) >= kLaneStride)
      throw config_error("config: replicates too large");
    if (regularization_t < 0.0)
      throw config_error("config: regularization_t must be >= 0");
    if (entry_dists.empty())
      throw config_error("config: at least one entry distribution required");
    for (const auto& [key, tol] : tolerances)
      if (!(tol > 0.0))
        throw config_error("config: tolerance for '" + key + "' must be > 0");
    switch (kind) {
      case ExperimentKind::law_check:
      case ExperimentKind::universality:
      case ExperimentKind::singular_law: {
        const MatrixWord w = effective_word();
        w.validate();
        if (w.summands != 1)
          throw config_error("config: this experiment needs a single-summand word");
        if (w.forward_power() != 1)
          throw config_error(
              "config: word must contain exactly one forward factor of power 1");
        break;
      }
      case ExperimentKind::stability:
        if (l < 0) throw config_error("config: l must be >= 0");
        if (m < 1) throw config_error("config: m must be >= 1");
        break;
      case ExperimentKind::power_stability:
        if (powers.empty()) throw config_error("config: powers must be nonempty");
        for (int p : powers)
          if (p < 1) throw config_error("config: powers must be >= 1");
        if (m < 1) throw config_error("config: m must be >= 1");
        break;
      case ExperimentKind::matrix_model:
        if (!(alpha > 0.0 && alpha < 2.0))
          throw config_error("config: alpha must lie in (0, 2)");
        break;
    }
  }
};

struct StatisticResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SpectrumArtifact {
  std::string name;
  EmpiricalSpectrum spectrum;
  std::string word_text;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::law_check;
  ExperimentConfig config;
  std::vector<StatisticResult> statistics;
  std::map<std::string, std::vector<double>> per_replicate;
  std::map<std::string, double> metrics;  // informational, not gated
  int degraded_replicates = 0;
  std::vector<std::string> degradation_notes;
  bool pass = false;
  std::vector<std::string> failures;
  double wall_ms = 0.0;
  std::vector<SpectrumArtifact> spectra;
};

/// Default tolerances, baselined from pilot runs at the documented sizes.
inline const std::map<std::string, double>& default_tolerances(ExperimentKind k) {
  static const std::map<std::string, double> law_check{
      {"radial_ks", 0.08}, {"angular_ks", 0.08}};
  static const std::map<std::string, double> stability{
      {"two_sample_radial_ks", 0.08},
      {"radial_ks_single", 0.08},
      {"radial_ks_sum", 0.08}};
  static const std::map<std::string, double> power_stability{
      {"radial_ks_powered", 0.10},
      {"radial_ks_plain", 0.10},
      {"two_sample_radial_ks", 0.10}};
  static const std::map<std::string, double> universality{
      {"two_sample_ks", 0.08}};
  static const std::map<std::string, double> matrix_model{
      {"radial_ks", 0.10}, {"symmetrized_sv_ks", 0.12}, {"angular_ks", 0.08}};
  static const std::map<std::string, double> singular_law{
      {"squared_sv_mp_ks", 0.04}, {"symmetrized_sv_stable_ks", 0.08}};
  switch (k) {
    case ExperimentKind::law_check: return law_check;
    case ExperimentKind::stability: return stability;
    case ExperimentKind::power_stability: return power_stability;
    case ExperimentKind::universality: return universality;
    case ExperimentKind::matrix_model: return matrix_model;
    case ExperimentKind::singular_law: return singular_law;
  }
  return law_check;
}

inline double resolve_tolerance(const ExperimentConfig& cfg,
                                const std::string& name) {
  if (auto it = cfg.tolerances.find(name); it != cfg.tolerances.end())
    return it->second;
  const auto& defaults = default_tolerances(cfg.kind);
  if (auto it = defaults.find(name); it != defaults.end()) return it->second;
  if (name.rfind("two_sample_ks", 0) == 0) {
    if (auto it = cfg.tolerances.find("two_sample_ks"); it != cfg.tolerances.end())
      return it->second;
    if (auto it = defaults.find("two_sample_ks"); it != defaults.end())
      return it->second;
  }
  throw config_error("no tolerance configured for statistic " + name);
}

// ---------------------------------------------------------------------------
// Replicate execution with degradation accounting.
// ---------------------------------------------------------------------------

namespace detail {

struct ReplicateOutcome {
  bool ok = false;
  EmpiricalSpectrum spec;
  EmpiricalSpectrum secondary;
  bool has_secondary = false;
  std::string note;
};

/// Runs `worker(r, outcome)` for r = 0..count-1, optionally on a thread pool.
/// Numeric failures degrade the replicate; results are slot-ordered, so the
/// aggregation below is independent of scheduling.
template <typename Worker>
std::vector<ReplicateOutcome> run_replicates(int count, int threads,
                                             Worker&& worker) {
  std::vector<ReplicateOutcome> out(static_cast<std::size_t>(count));
  auto task = [&](int r) {
    try {
      worker(r, out[static_cast<std::size_t>(r)]);
      out[static_cast<std::size_t>(r)].ok = true;
    } catch (const numeric_error& e) {
      out[static_cast<std::size_t>(r)].ok = false;
      out[static_cast<std::size_t>(r)].note = e.what();
    }
  };
  int workers = threads <= 0
                    ? static_cast<int>(std::thread::hardware_concurrency())
                    : threads;
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) task(r);
    return out;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error = nullptr;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= count) return;
        try {
          task(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace detail

struct PooledSpectra {
  EmpiricalSpectrum pooled;
  EmpiricalSpectrum pooled_secondary;
  std::vector<EmpiricalSpectrum> each;  // successful replicates, index order
  int degraded = 0;
  std::vector<std::string> notes;
};

inline PooledSpectra pool_outcomes(std::vector<detail::ReplicateOutcome>&& outcomes) {
  PooledSpectra p;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    auto& o = outcomes[r];
    if (!o.ok) {
      ++p.degraded;
      p.notes.push_back("replicate " + std::to_string(r) + ": " + o.note);
      continue;
    }
    p.each.push_back(o.spec);
    p.pooled.merge(o.spec);
    if (o.has_secondary) p.pooled_secondary.merge(o.secondary);
  }
  if (p.pooled.replicate_count == 0)
    throw numeric_error("experiment: every replicate failed");
  return p;
}

/// Pools spectra of a word sampled over `replicates` independent replicates.
inline PooledSpectra collect_word_spectra(const MatrixWord& word, int n,
                                          int replicates, EntryDist dist,
                                          double t, std::uint64_t master_seed,
                                          int lane, double rescale,
                                          SpectrumKind kind, int threads) {
  auto outcomes = detail::run_replicates(
      replicates, threads, [&](int r, detail::ReplicateOutcome& o) {
        const std::uint64_t rid =
            static_cast<std::uint64_t>(lane) * kLaneStride +
            static_cast<std::uint64_t>(r);
        SquareMatrix m = assemble_girko_word(word, n, dist, t, master_seed, rid);
        if (rescale != 1.0) m.values *= rescale;
        o.spec = kind == SpectrumKind::complex_eigenvalues ? eigenvalues(m)
                                                           : singular_values(m);
      });
  return pool_outcomes(std::move(outcomes));
}

// ---------------------------------------------------------------------------
// Experiment runners.
// ---------------------------------------------------------------------------

namespace detail {

inline void add_statistic(ExperimentReport& rep, const ExperimentConfig& cfg,
                          const std::string& name, double value) {
  StatisticResult s{name, value, resolve_tolerance(cfg, name), false};
  s.pass = s.value <= s.tolerance;
  rep.statistics.push_back(std::move(s));
}

inline void absorb_degradation(ExperimentReport& rep, const PooledSpectra& p) {
  rep.degraded_replicates += p.degraded;
  rep.degradation_notes.insert(rep.degradation_notes.end(), p.notes.begin(),
                               p.notes.end());
}

inline void finalize_report(ExperimentReport& rep,
                            std::chrono::steady_clock::time_point start) {
  rep.pass = true;
  for (const auto& s : rep.statistics) {
    if (!s.pass) {
      rep.pass = false;
      rep.failures.push_back(s.name);
    }
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
}

inline double uniform01_cdf(double u) { return std::clamp(u, 0.0, 1.0); }

/// The radial law of index alpha has 1 - psi(r) ~ r^{-2 alpha/(2 - alpha)};
/// the L1 distance to an empirical CDF is finite only when that exponent
/// exceeds 1. Laws at or below the threshold get no W1 metric.
inline bool radial_mean_finite(double alpha) {
  if (alpha >= 2.0) return true;
  return 2.0 * alpha / (2.0 - alpha) > 1.05;
}

}  // namespace detail

/// Pooled radial ESD of a single-summand word against the analytic radial
/// law of its inverse count, plus an angular rotation-invariance guard.
inline ExperimentReport run_law_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::law_check;
  c.validate();
  const MatrixWord word = c.effective_word();
  const int l = word.inverse_power();
  const LimitLaw target = limit_law_stable(2.0 / (l + 1));
  const auto target_cdf = [&target](double r) { return target.radial_cdf(r); };

  PooledSpectra ps = collect_word_spectra(
      word, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 0, 1.0, SpectrumKind::complex_eigenvalues, c.threads);

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  const StepCDF radial = radial_cdf(ps.pooled);
  detail::add_statistic(rep, c, "radial_ks", ks_distance(radial, target_cdf));
  detail::add_statistic(rep, c, "angular_ks",
                        ks_distance(angular_cdf(ps.pooled), detail::uniform01_cdf));
  if (detail::radial_mean_finite(target.alpha))
    rep.metrics["radial_w1"] = wasserstein1(radial, target_cdf);
  for (const auto& spec : ps.each)
    rep.per_replicate["radial_ks"].push_back(
        ks_distance(radial_cdf(spec), target_cdf));
  detail::absorb_degradation(rep, ps);
  rep.spectra.push_back({"eigenvalues_pooled", ps.pooled, word_to_string(word)});
  detail::finalize_report(rep, start);
  return rep;
}

/// Compares a single product word against the rescaled m-fold sum of
/// independent copies; both sides are also checked against the analytic law.
inline ExperimentReport run_stability_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::stability;
  c.validate();
  const double alpha = 2.0 / (c.l + 1);
  const OplusStableResult sum_law = oplus_stable(alpha, c.m);
  const LimitLaw target = limit_law_stable(alpha);
  const auto target_cdf = [&target](double r) { return target.radial_cdf(r); };

  const MatrixWord single = MatrixWord::inverse_product(c.l);
  const MatrixWord summed = MatrixWord::inverse_product(c.l, c.m);
  PooledSpectra a = collect_word_spectra(
      single, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 0, 1.0, SpectrumKind::complex_eigenvalues, c.threads);
  PooledSpectra b = collect_word_spectra(
      summed, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 1, sum_law.normalizer, SpectrumKind::complex_eigenvalues,
      c.threads);

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  const StepCDF ra = radial_cdf(a.pooled);
  const StepCDF rb = radial_cdf(b.pooled);
  detail::add_statistic(rep, c, "two_sample_radial_ks", two_sample_ks(ra, rb));
  detail::add_statistic(rep, c, "radial_ks_single", ks_distance(ra, target_cdf));
  detail::add_statistic(rep, c, "radial_ks_sum", ks_distance(rb, target_cdf));
  for (const auto& spec : a.each)
    rep.per_replicate["radial_ks_single"].push_back(
        ks_distance(radial_cdf(spec), target_cdf));
  for (const auto& spec : b.each)
    rep.per_replicate["radial_ks_sum"].push_back(
        ks_distance(radial_cdf(spec), target_cdf));
  detail::absorb_degradation(rep, a);
  detail::absorb_degradation(rep, b);
  rep.spectra.push_back({"single_pooled", a.pooled, word_to_string(single)});
  rep.spectra.push_back({"rescaled_sum_pooled", b.pooled, word_to_string(summed)});
  detail::finalize_report(rep, start);
  return rep;
}

/// Words with powered inverses: checked against the analytic law, and against
/// the plain word with the same total inverse power.
inline ExperimentReport run_power_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::power_stability;
  c.validate();
  const int l = std::accumulate(c.powers.begin(), c.powers.end(), 0);
  const double alpha = 2.0 / (l + 1);
  const LimitLaw target = limit_law_stable(alpha);
  const auto target_cdf = [&target](double r) { return target.radial_cdf(r); };

  const MatrixWord powered = MatrixWord::inverse_powers(c.powers, c.m);
  const double rescale = oplus_stable(alpha, c.m).normalizer;
  const MatrixWord plain = MatrixWord::inverse_product(l);
  PooledSpectra a = collect_word_spectra(
      powered, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 0, rescale, SpectrumKind::complex_eigenvalues, c.threads);
  PooledSpectra b = collect_word_spectra(
      plain, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 1, 1.0, SpectrumKind::complex_eigenvalues, c.threads);

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  const StepCDF ra = radial_cdf(a.pooled);
  const StepCDF rb = radial_cdf(b.pooled);
  detail::add_statistic(rep, c, "radial_ks_powered", ks_distance(ra, target_cdf));
  detail::add_statistic(rep, c, "radial_ks_plain", ks_distance(rb, target_cdf));
  detail::add_statistic(rep, c, "two_sample_radial_ks", two_sample_ks(ra, rb));
  detail::absorb_degradation(rep, a);
  detail::absorb_degradation(rep, b);
  rep.spectra.push_back({"powered_pooled", a.pooled, word_to_string(powered)});
  rep.spectra.push_back({"plain_pooled", b.pooled, word_to_string(plain)});
  detail::finalize_report(rep, start);
  return rep;
}

/// Pairwise two-sample comparison of the radial ESD across entry laws.
inline ExperimentReport run_universality_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::universality;
  c.validate();
  const MatrixWord word = c.effective_word();

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  std::vector<StepCDF> radials;
  for (std::size_t d = 0; d < c.entry_dists.size(); ++d) {
    PooledSpectra ps = collect_word_spectra(
        word, c.n, c.replicates, c.entry_dists[d], c.regularization_t,
        c.master_seed, static_cast<int>(d), 1.0,
        SpectrumKind::complex_eigenvalues, c.threads);
    radials.push_back(radial_cdf(ps.pooled));
    detail::absorb_degradation(rep, ps);
    rep.spectra.push_back(
        {std::string("eigenvalues_pooled_") + entry_dist_name(c.entry_dists[d]),
         ps.pooled, word_to_string(word)});
  }
  for (std::size_t i = 0; i < radials.size(); ++i)
    for (std::size_t j = i + 1; j < radials.size(); ++j)
      detail::add_statistic(
          rep, c,
          std::string("two_sample_ks_") + entry_dist_name(c.entry_dists[i]) +
              "_vs_" + entry_dist_name(c.entry_dists[j]),
          two_sample_ks(radials[i], radials[j]));
  detail::finalize_report(rep, start);
  return rep;
}

/// Y T U* model against the analytic radial law; the symmetrized singular
/// values are checked against the matching symmetric line law, which
/// exercises the quantile pipeline end to end.
inline ExperimentReport run_matrix_model_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::matrix_model;
  c.validate();
  xi_squared_table(c.alpha);  // build the quantile table before the pool starts
  const LimitLaw target = limit_law_stable(c.alpha);
  const auto target_cdf = [&target](double r) { return target.radial_cdf(r); };

  auto outcomes = detail::run_replicates(
      c.replicates, c.threads, [&](int r, detail::ReplicateOutcome& o) {
        SquareMatrix f = sample_stable_model(
            c.n, c.alpha, c.master_seed, static_cast<std::uint64_t>(r));
        o.spec = eigenvalues(f);
        o.secondary = singular_values(f);
        o.has_secondary = true;
      });
  PooledSpectra ps = pool_outcomes(std::move(outcomes));

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  const StepCDF radial = radial_cdf(ps.pooled);
  detail::add_statistic(rep, c, "radial_ks", ks_distance(radial, target_cdf));
  const DensityTable line_law = make_density_table(StableLaw::symmetric(c.alpha));
  detail::add_statistic(
      rep, c, "symmetrized_sv_ks",
      ks_distance(symmetrize(ps.pooled_secondary),
                  [&line_law](double x) { return line_law.cdf(x); }));
  detail::add_statistic(rep, c, "angular_ks",
                        ks_distance(angular_cdf(ps.pooled), detail::uniform01_cdf));
  if (detail::radial_mean_finite(c.alpha))
    rep.metrics["radial_w1"] = wasserstein1(radial, target_cdf);
  for (const auto& spec : ps.each)
    rep.per_replicate["radial_ks"].push_back(
        ks_distance(radial_cdf(spec), target_cdf));
  detail::absorb_degradation(rep, ps);
  rep.spectra.push_back({"eigenvalues_pooled", ps.pooled, "YTU*"});
  detail::finalize_report(rep, start);
  return rep;
}

/// Singular value laws: squared singular values of a single factor against
/// the Marchenko-Pastur CDF, or symmetrized singular values of an inverse
/// product against the matching symmetric stable CDF.
inline ExperimentReport run_singular_law_check(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = cfg;
  c.kind = ExperimentKind::singular_law;
  c.validate();
  const MatrixWord word = c.effective_word();
  const int l = word.inverse_power();

  PooledSpectra ps = collect_word_spectra(
      word, c.n, c.replicates, c.entry_dists[0], c.regularization_t,
      c.master_seed, 0, 1.0, SpectrumKind::singular_values, c.threads);

  ExperimentReport rep;
  rep.kind = c.kind;
  rep.config = c;
  if (l == 0 && word.factors.size() == 1 && word.factors[0].power == 1) {
    detail::add_statistic(rep, c, "squared_sv_mp_ks",
                          ks_distance(square(ps.pooled), mp_cdf));
  } else {
    const DensityTable line_law =
        make_density_table(StableLaw::symmetric(2.0 / (l + 1)));
    detail::add_statistic(
        rep, c, "symmetrized_sv_stable_ks",
        ks_distance(symmetrize(ps.pooled),
                    [&line_law](double x) { return line_law.cdf(x); }));
  }
  detail::absorb_degradation(rep, ps);
  rep.spectra.push_back({"singular_values_pooled", ps.pooled, word_to_string(word)});
  detail::finalize_report(rep, start);
  return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::law_check: return run_law_check(cfg);
    case ExperimentKind::stability: return run_stability_check(cfg);
    case ExperimentKind::power_stability: return run_power_check(cfg);
    case ExperimentKind::universality: return run_universality_check(cfg);
    case ExperimentKind::matrix_model: return run_matrix_model_check(cfg);
    case ExperimentKind::singular_law: return run_singular_law_check(cfg);
  }
  throw config_error("run_experiment: unknown kind");
}

// Positional conveniences mirroring the experiment surfaces.

inline ExperimentReport run_stability_check(int l, int m, int n, int replicates,
                                            std::uint64_t seed, int threads = 0) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::stability;
  cfg.l = l;
  cfg.m = m;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return run_stability_check(cfg);
}

inline ExperimentReport run_power_check(const std::vector<int>& powers, int m,
                                        int n, int replicates,
                                        std::uint64_t seed, int threads = 0) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::power_stability;
  cfg.powers = powers;
  cfg.m = m;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return run_power_check(cfg);
}

inline ExperimentReport run_universality_check(const MatrixWord& word,
                                               const std::vector<EntryDist>& dists,
                                               int n, int replicates,
                                               std::uint64_t seed,
                                               int threads = 0) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::universality;
  cfg.word = word;
  cfg.word_set = true;
  cfg.entry_dists = dists;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return run_universality_check(cfg);
}

inline ExperimentReport run_matrix_model_check(double alpha, int n,
                                               int replicates,
                                               std::uint64_t seed,
                                               int threads = 0) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::matrix_model;
  cfg.alpha = alpha;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return run_matrix_model_check(cfg);
}

inline ExperimentReport run_singular_law_check(const MatrixWord& word, int n,
                                               int replicates,
                                               std::uint64_t seed,
                                               int threads = 0) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::singular_law;
  cfg.word = word;
  cfg.word_set = true;
  cfg.n = n;
  cfg.replicates = replicates;
  cfg.master_seed = seed;
  cfg.threads = threads;
  return run_singular_law_check(cfg);
}

/// Self-calibration harness: repeated two-sample comparisons of independent
/// draws of the same word; reports how often the statistic stays below the
/// null threshold.
struct NullConsistencyResult {
  int runs = 0;
  int below_threshold = 0;
  double threshold = 0.0;
  std::vector<double> values;
};

inline NullConsistencyResult run_null_consistency(int l, int n,
                                                  int replicates_per_side,
                                                  int runs, std::uint64_t seed,
                                                  double threshold,
                                                  int threads = 0) {
  NullConsistencyResult res;
  res.runs = runs;
  res.threshold = threshold;
  const MatrixWord word = MatrixWord::inverse_product(l);
  for (int k = 0; k < runs; ++k) {
    PooledSpectra a = collect_word_spectra(
        word, n, replicates_per_side, EntryDist::gaussian_complex, 0.0, seed,
        2 * k, 1.0, SpectrumKind::complex_eigenvalues, threads);
    PooledSpectra b = collect_word_spectra(
        word, n, replicates_per_side, EntryDist::gaussian_complex, 0.0, seed,
        2 * k + 1, 1.0, SpectrumKind::complex_eigenvalues, threads);
    const double d = two_sample_ks(radial_cdf(a.pooled), radial_cdf(b.pooled));
    res.values.push_back(d);
    if (d <= threshold) ++res.below_threshold;
  }
  return res;
}

// ---------------------------------------------------------------------------
// JSON / CSV serialization.
// ---------------------------------------------------------------------------

inline ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = experiment_kind_name(cfg.kind);
  j["n"] = cfg.n;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.master_seed;
  j["l"] = cfg.l;
  j["m"] = cfg.m;
  j["alpha"] = cfg.alpha;
  j["powers"] = cfg.powers;
  j["word"] = word_to_string(cfg.effective_word());
  j["summands"] = cfg.effective_word().summands;
  ordered_json dists = ordered_json::array();
  for (EntryDist d : cfg.entry_dists) dists.push_back(entry_dist_name(d));
  j["entry_dists"] = dists;
  j["regularization_t"] = cfg.regularization_t;
  j["tolerances"] = cfg.tolerances;
  return j;
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) throw config_error("config: expected a JSON object");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
    throw config_error("config: schema_version must be 1");
  if (!j.contains("experiment"))
    throw config_error("config: missing 'experiment'");
  if (!j.contains("seed"))
    throw config_error("config: missing 'seed' (seeds must be explicit)");
  ExperimentConfig cfg;
  try {
    cfg.kind = experiment_kind_from_name(j.at("experiment").get<std::string>());
    cfg.master_seed = j.at("seed").get<std::uint64_t>();
    cfg.n = j.value("n", 0);
    cfg.replicates = j.value("replicates", 1);
    cfg.l = j.value("l", 0);
    cfg.m = j.value("m", 1);
    cfg.alpha = j.value("alpha", 1.0);
    if (j.contains("powers"))
      cfg.powers = j.at("powers").get<std::vector<int>>();
    if (j.contains("word")) {
      cfg.word = word_from_string(j.at("word").get<std::string>(),
                                  j.value("summands", 1));
      cfg.word_set = true;
    }
    if (j.contains("entry_dist"))
      cfg.entry_dists = {entry_dist_from_name(j.at("entry_dist").get<std::string>())};
    if (j.contains("entry_dists")) {
      cfg.entry_dists.clear();
      for (const auto& name : j.at("entry_dists"))
        cfg.entry_dists.push_back(entry_dist_from_name(name.get<std::string>()));
    }
    cfg.regularization_t = j.value("regularization_t", 0.0);
    cfg.threads = j.value("threads", 0);
    if (j.contains("tolerances"))
      for (const auto& [key, value] : j.at("tolerances").items())
        cfg.tolerances[key] = value.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline ordered_json report_to_json(const ExperimentReport& rep,
                                   bool include_timings = true) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = experiment_kind_name(rep.kind);
  j["config"] = config_to_json(rep.config);
  ordered_json stats = ordered_json::array();
  for (const auto& s : rep.statistics) {
    ordered_json e;
    e["name"] = s.name;
    e["value"] = s.value;
    e["tolerance"] = s.tolerance;
    e["pass"] = s.pass;
    stats.push_back(e);
  }
  j["statistics"] = stats;
  j["metrics"] = rep.metrics;
  j["per_replicate"] = rep.per_replicate;
  j["degraded_replicates"] = rep.degraded_replicates;
  j["degradation_notes"] = rep.degradation_notes;
  j["pass"] = rep.pass;
  j["failures"] = rep.failures;
  if (include_timings) j["timings"] = {{"wall_ms", rep.wall_ms}};
  return j;
}

/// Long-format summary rows for batch sweeps.
inline std::string report_summary_csv(const ExperimentReport& rep,
                                      bool with_header = true) {
  std::string out;
  if (with_header)
    out += "kind,n,replicates,seed,degraded,statistic,value,tolerance,pass\n";
  for (const auto& s : rep.statistics) {
    out += std::string(experiment_kind_name(rep.kind)) + "," +
           std::to_string(rep.config.n) + "," +
           std::to_string(rep.config.replicates) + "," +
           std::to_string(rep.config.master_seed) + "," +
           std::to_string(rep.degraded_replicates) + "," + s.name + "," +
           format_double(s.value) + "," + format_double(s.tolerance) + "," +
           (s.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace freelim
