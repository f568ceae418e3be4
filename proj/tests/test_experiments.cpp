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

#include "freelim/experiments.hpp"

using namespace freelim;

TEST_CASE("law check runs and is deterministic") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.l = 0;
  cfg.n = 256;
  cfg.replicates = 2;
  cfg.master_seed = 101;
  const ExperimentReport a = run_law_check(cfg);
  REQUIRE(a.statistics.size() == 2);
  CHECK(a.statistics[0].name == "radial_ks");
  CHECK(a.statistics[0].value < 0.1);
  CHECK(a.pass);
  CHECK(a.per_replicate.at("radial_ks").size() == 2);
  CHECK(a.metrics.count("radial_w1") == 1);
  CHECK(a.degraded_replicates == 0);

  const ExperimentReport b = run_law_check(cfg);
  for (std::size_t i = 0; i < a.statistics.size(); ++i)
    CHECK(a.statistics[i].value == b.statistics[i].value);
  CHECK(a.metrics.at("radial_w1") == b.metrics.at("radial_w1"));
}

TEST_CASE("law check accepts an explicit word") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.word = word_from_string("x0 x1^-1");
  cfg.word_set = true;
  cfg.n = 128;
  cfg.replicates = 2;
  cfg.master_seed = 102;
  const ExperimentReport rep = run_law_check(cfg);
  CHECK(rep.statistics[0].value < 0.12);
  CHECK(rep.spectra[0].spectrum.eigvals.size() == 256);
}

TEST_CASE("law check for two inverse factors") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.l = 2;
  cfg.n = 256;
  cfg.replicates = 4;
  cfg.master_seed = 115;
  cfg.tolerances = {{"radial_ks", 0.1}, {"angular_ks", 0.1}};
  const ExperimentReport rep = run_law_check(cfg);
  CHECK(rep.statistics[0].value < 0.1);
  CHECK(rep.pass);
  // the l=2 radial law has no first moment, so no W1 metric is reported
  CHECK(rep.metrics.count("radial_w1") == 0);
}

TEST_CASE("stability with m=1 behaves like a null comparison") {
  const ExperimentReport rep = run_stability_check(1, 1, 512, 2, 103);
  REQUIRE(rep.statistics.size() == 3);
  CHECK(rep.statistics[0].name == "two_sample_radial_ks");
  CHECK(rep.statistics[0].value < 0.1);
  CHECK(rep.pass);
}

TEST_CASE("stability with m=2 rescales the sum") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::stability;
  cfg.l = 1;
  cfg.m = 2;
  cfg.n = 128;
  cfg.replicates = 2;
  cfg.master_seed = 104;
  cfg.tolerances = {{"two_sample_radial_ks", 0.2},
                    {"radial_ks_single", 0.2},
                    {"radial_ks_sum", 0.2}};
  const ExperimentReport rep = run_stability_check(cfg);
  CHECK(rep.pass);
  // two independent pooled spectra of 2 * 128 eigenvalues each
  CHECK(rep.spectra.size() == 2);
  CHECK(rep.spectra[1].spectrum.eigvals.size() == 256);
}

TEST_CASE("power stability compares against the plain word") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::power_stability;
  cfg.powers = {2};
  cfg.m = 1;
  cfg.n = 128;
  cfg.replicates = 2;
  cfg.master_seed = 105;
  cfg.tolerances = {{"radial_ks_powered", 0.25},
                    {"radial_ks_plain", 0.25},
                    {"two_sample_radial_ks", 0.25}};
  const ExperimentReport rep = run_power_check(cfg);
  REQUIRE(rep.statistics.size() == 3);
  CHECK(rep.pass);
}

TEST_CASE("universality with one distribution passes trivially") {
  const ExperimentReport rep = run_universality_check(
      MatrixWord::inverse_product(0), {EntryDist::gaussian_complex}, 64, 1, 106);
  CHECK(rep.statistics.empty());
  CHECK(rep.pass);
}

TEST_CASE("universality compares radial laws pairwise") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::universality;
  cfg.l = 0;
  cfg.n = 192;
  cfg.replicates = 2;
  cfg.master_seed = 107;
  cfg.entry_dists = {EntryDist::gaussian_complex, EntryDist::rademacher,
                     EntryDist::centered_exponential};
  cfg.tolerances = {{"two_sample_ks", 0.15}};
  const ExperimentReport rep = run_universality_check(cfg);
  CHECK(rep.statistics.size() == 3);  // three unordered pairs
  CHECK(rep.pass);
}

TEST_CASE("matrix model check runs at small size") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::matrix_model;
  cfg.alpha = 1.5;
  cfg.n = 128;
  cfg.replicates = 2;
  cfg.master_seed = 108;
  cfg.tolerances = {{"radial_ks", 0.2},
                    {"symmetrized_sv_ks", 0.2},
                    {"angular_ks", 0.2}};
  const ExperimentReport rep = run_matrix_model_check(cfg);
  REQUIRE(rep.statistics.size() == 3);
  CHECK(rep.pass);
}

TEST_CASE("singular law check: single factor against Marchenko-Pastur") {
  const ExperimentReport rep =
      run_singular_law_check(MatrixWord::single_factor(), 256, 2, 109);
  REQUIRE(rep.statistics.size() == 1);
  CHECK(rep.statistics[0].name == "squared_sv_mp_ks");
  CHECK(rep.statistics[0].value < 0.08);
  CHECK(rep.pass);
}

TEST_CASE("singular law check: inverse product against the stable line law") {
  // symmetrized singular values of X0 X1^{-1} follow the alpha=1 line law,
  // whose CDF is 1/2 + atan(x)/pi
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::singular_law;
  cfg.word = word_from_string("x0 x1^-1");
  cfg.word_set = true;
  cfg.n = 384;
  cfg.replicates = 2;
  cfg.master_seed = 110;
  const ExperimentReport rep = run_singular_law_check(cfg);
  CHECK(rep.statistics[0].name == "symmetrized_sv_stable_ks");
  CHECK(rep.statistics[0].value < 0.08);
  CHECK(rep.pass);

  const StepCDF sym = symmetrize(rep.spectra[0].spectrum);
  const double d = ks_distance(
      sym, [](double x) { return 0.5 + std::atan(x) / kPi; });
  CHECK(d < 0.08);
}

TEST_CASE("degraded replicates are counted, not dropped silently") {
  auto outcomes = detail::run_replicates(4, 1, [](int r, detail::ReplicateOutcome& o) {
    if (r == 2) throw numeric_error("synthetic failure");
    EmpiricalSpectrum s;
    s.kind = SpectrumKind::complex_eigenvalues;
    s.eigvals = {cd(r, 0)};
    s.n = 1;
    s.replicate_count = 1;
    o.spec = s;
  });
  const PooledSpectra pooled = pool_outcomes(std::move(outcomes));
  CHECK(pooled.degraded == 1);
  CHECK(pooled.pooled.replicate_count == 3);
  REQUIRE(pooled.notes.size() == 1);
  CHECK(pooled.notes[0].find("replicate 2") != std::string::npos);

  auto all_fail = detail::run_replicates(2, 1, [](int, detail::ReplicateOutcome&) {
    throw numeric_error("synthetic failure");
  });
  CHECK_THROWS_AS(pool_outcomes(std::move(all_fail)), numeric_error);
}

TEST_CASE("non-numeric worker errors propagate") {
  CHECK_THROWS_AS(detail::run_replicates(
                      2, 1, [](int, detail::ReplicateOutcome&) {
                        throw config_error("bug, not degradation");
                      }),
                  config_error);
}

TEST_CASE("thread count does not change the statistics") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.l = 0;
  cfg.n = 96;
  cfg.replicates = 4;
  cfg.master_seed = 111;
  cfg.threads = 1;
  const ExperimentReport serial = run_law_check(cfg);
  cfg.threads = 4;
  const ExperimentReport parallel = run_law_check(cfg);
  for (std::size_t i = 0; i < serial.statistics.size(); ++i)
    CHECK(serial.statistics[i].value == parallel.statistics[i].value);
}

TEST_CASE("null consistency harness") {
  const NullConsistencyResult res =
      run_null_consistency(0, 512, 1, 20, 112, /*threshold=*/0.08);
  CHECK(res.runs == 20);
  CHECK(res.values.size() == 20);
  // two independent samples of the same law stay below the null threshold
  CHECK(res.below_threshold >= 18);
}

TEST_CASE("radial KS shrinks with dimension") {
  const LimitLaw target = limit_law_stable(1.0);
  const auto target_cdf = [&target](double r) { return target.radial_cdf(r); };
  std::vector<double> ks;
  for (int n : {128, 256, 512}) {
    const PooledSpectra ps = collect_word_spectra(
        MatrixWord::inverse_product(1), n, 4, EntryDist::gaussian_complex, 0.0,
        113, 0, 1.0, SpectrumKind::complex_eigenvalues, 0);
    ks.push_back(ks_distance(radial_cdf(ps.pooled), target_cdf));
  }
  const int decreasing = (ks[1] <= ks[0] ? 1 : 0) + (ks[2] <= ks[1] ? 1 : 0);
  CHECK(decreasing >= 1);
  CHECK(ks[2] < ks[0]);
}

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::stability;
  cfg.l = 1;
  cfg.m = 2;
  cfg.n = 64;
  cfg.replicates = 3;
  cfg.master_seed = 2024;
  cfg.tolerances = {{"two_sample_radial_ks", 0.5}};
  const ordered_json j = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(j);
  CHECK(back.kind == cfg.kind);
  CHECK(back.l == cfg.l);
  CHECK(back.m == cfg.m);
  CHECK(back.n == cfg.n);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.tolerances.at("two_sample_radial_ks") == 0.5);

  ordered_json missing_seed = j;
  missing_seed.erase("seed");
  CHECK_THROWS_AS(config_from_json(missing_seed), config_error);

  ordered_json bad_version = j;
  bad_version["schema_version"] = 2;
  CHECK_THROWS_AS(config_from_json(bad_version), config_error);

  ExperimentConfig tiny;
  tiny.kind = ExperimentKind::law_check;
  tiny.n = 4;  // below the minimum
  tiny.replicates = 1;
  CHECK_THROWS_AS(tiny.validate(), config_error);

  ExperimentConfig bad_tol;
  bad_tol.kind = ExperimentKind::law_check;
  bad_tol.n = 64;
  bad_tol.tolerances = {{"radial_ks", -1.0}};
  CHECK_THROWS_AS(bad_tol.validate(), config_error);
}

TEST_CASE("tolerance resolution prefers the config") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.n = 64;
  CHECK(resolve_tolerance(cfg, "radial_ks") == 0.08);
  cfg.tolerances["radial_ks"] = 0.02;
  CHECK(resolve_tolerance(cfg, "radial_ks") == 0.02);
  CHECK_THROWS_AS(resolve_tolerance(cfg, "no_such_statistic"), config_error);
}

TEST_CASE("report JSON carries the gating data") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::law_check;
  cfg.l = 0;
  cfg.n = 64;
  cfg.replicates = 1;
  cfg.master_seed = 114;
  const ExperimentReport rep = run_law_check(cfg);
  const ordered_json j = report_to_json(rep);
  CHECK(j.at("kind") == "law-check");
  CHECK(j.at("statistics").size() == rep.statistics.size());
  CHECK(j.at("pass") == rep.pass);
  CHECK(j.contains("timings"));
  const ordered_json no_timing = report_to_json(rep, false);
  CHECK_FALSE(no_timing.contains("timings"));

  const std::string csv = report_summary_csv(rep);
  // header plus one row per statistic
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + rep.statistics.size());
}
