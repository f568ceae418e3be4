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

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "freelim/freelim.hpp"

namespace fs = std::filesystem;
using namespace freelim;

namespace {

// Exit codes: 0 pass, 1 experiment failure, 2 config/usage error,
// 3 numeric failure. Stable across versions.
constexpr int kExitPass = 0;
constexpr int kExitExperimentFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct ManifestEntry {
  std::string path;
  std::size_t bytes;
  std::string hash;
};

class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {}

  void emit(const std::string& relative, const std::string& content) {
    const fs::path full = fs::path(dir_) / relative;
    fs::create_directories(full.parent_path());
    write_file(full.string(), content);
    entries_.push_back({relative, content.size(), fnv1a64_hex(content)});
  }

  ordered_json manifest(const std::string& config_path,
                        const std::string& config_hash,
                        std::uint64_t seed) const {
    ordered_json m;
    m["schema_version"] = 1;
    m["tool_version"] = kVersion;
    m["config_path"] = config_path;
    m["config_hash"] = config_hash;
    m["seed"] = seed;
    m["out_dir"] = dir_;
    ordered_json artifacts = ordered_json::array();
    for (const auto& e : entries_) {
      ordered_json a;
      a["path"] = e.path;
      a["bytes"] = e.bytes;
      a["hash"] = e.hash;
      artifacts.push_back(a);
    }
    m["artifacts"] = artifacts;
    return m;
  }

  void write_manifest(const ordered_json& manifest) {
    const fs::path full = fs::path(dir_) / "manifest.json";
    write_file(full.string(), manifest.dump(2) + "\n");
  }

 private:
  std::string dir_;
  std::vector<ManifestEntry> entries_;
};

std::vector<double> parse_grid(double r_min, double r_max, int count) {
  if (!(r_min >= 0.0) || !(r_max > r_min) || count < 2)
    throw config_error("invalid grid: need r_min >= 0, r_max > r_min, count >= 2");
  return uniform_grid(r_min, r_max, count);
}

int cmd_densities(const std::vector<int>& l_list,
                  const std::vector<double>& alpha_list, double r_min,
                  double r_max, int count, const std::string& out_dir) {
  if (l_list.empty() && alpha_list.empty())
    throw config_error("densities: need at least one --l or --alpha");
  const std::vector<double> grid = parse_grid(r_min, r_max, count);
  OutputDir out(out_dir);
  for (int l : l_list) {
    const LimitLaw law = limit_law_closed(l);
    out.emit("f" + std::to_string(l) + ".csv", limit_law_csv(law, grid));
  }
  for (double alpha : alpha_list) {
    const LimitLaw law = limit_law_stable(alpha);
    out.emit("alpha_" + format_double(alpha) + ".csv", limit_law_csv(law, grid));
  }
  out.write_manifest(out.manifest("", "", 0));
  return kExitPass;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override, int threads,
            const std::vector<std::string>& tolerance_overrides) {
  // Validate everything before any file is created.
  std::string config_text;
  try {
    config_text = read_file(config_path);
  } catch (const error& e) {
    throw config_error(e.what());
  }
  ordered_json config_json;
  try {
    config_json = ordered_json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg = config_from_json(config_json);
  if (seed_override) cfg.master_seed = *seed_override;
  if (threads > 0) cfg.threads = threads;
  for (const auto& kv : tolerance_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw config_error("bad --tolerance-override '" + kv + "' (expected KEY=VAL)");
    try {
      cfg.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw config_error("bad --tolerance-override value in '" + kv + "'");
    }
  }
  cfg.validate();

  const ExperimentReport report = run_experiment(cfg);

  OutputDir out(out_dir);
  ordered_json rj = report_to_json(report);
  for (auto& artifact : report.spectra) {
    const std::string rel = "spectra/" + artifact.name + ".csv";
    out.emit(rel, spectrum_csv(artifact.spectrum));
    ordered_json meta;
    meta["word"] = artifact.word_text;
    meta["n"] = artifact.spectrum.n;
    meta["seed"] = cfg.master_seed;
    meta["replicates"] = artifact.spectrum.replicate_count;
    meta["file"] = rel;
    out.emit("spectra/" + artifact.name + ".json", meta.dump(2) + "\n");
  }
  out.emit("report.json", rj.dump(2) + "\n");
  out.emit("summary.csv", report_summary_csv(report));
  out.write_manifest(out.manifest(config_path, fnv1a64_hex(config_text),
                                  cfg.master_seed));

  for (const auto& s : report.statistics)
    std::cout << (s.pass ? "pass" : "FAIL") << "  " << s.name << " = "
              << format_double(s.value) << "  (tolerance "
              << format_double(s.tolerance) << ")\n";
  if (report.degraded_replicates > 0)
    std::cout << "degraded replicates: " << report.degraded_replicates << "\n";
  std::cout << (report.pass ? "PASS" : "FAIL") << "\n";
  return report.pass ? kExitPass : kExitExperimentFail;
}

int cmd_sample(const std::string& word_text, int summands, int n,
               std::uint64_t seed, const std::string& dist_name, double t,
               const std::string& out_prefix) {
  const MatrixWord word = word_from_string(word_text, summands);
  if (n < 1) throw config_error("sample: n must be >= 1");
  const EntryDist dist = entry_dist_from_name(dist_name);

  const SquareMatrix m = assemble_girko_word(word, n, dist, t, seed, 0);
  const EmpiricalSpectrum eig = eigenvalues(m);
  const EmpiricalSpectrum sv = singular_values(m);

  const fs::path prefix(out_prefix);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  write_file(out_prefix + "_eigenvalues.csv", spectrum_csv(eig));
  write_file(out_prefix + "_singular_values.csv", spectrum_csv(sv));
  std::cout << "wrote " << out_prefix << "_eigenvalues.csv and "
            << out_prefix << "_singular_values.csv\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  // our own replicate pool provides the parallelism; keep BLAS single-threaded
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"freelim: limiting spectral laws of sums of products of "
               "non-Hermitian random matrices"};
  app.set_version_flag("--version", std::string("freelim ") + kVersion);
  app.require_subcommand(1);

  // densities
  auto* densities = app.add_subcommand(
      "densities", "Write radial law tables (r, psi, pdf, radial_cdf) as CSV");
  std::vector<int> l_list;
  std::vector<double> alpha_list;
  double r_min = 0.0, r_max = 3.0;
  int grid_count = 301;
  std::string densities_out = "densities_out";
  densities->add_option("--l", l_list, "closed-form law indices (0..3)");
  densities->add_option("--alpha", alpha_list, "stable law indices in (0, 2]");
  densities->add_option("--rmin", r_min, "grid start");
  densities->add_option("--rmax", r_max, "grid end");
  densities->add_option("--count", grid_count, "grid points");
  densities->add_option("--out", densities_out, "output directory");

  // run
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path, run_out = "run_out";
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  int threads = 0;
  std::vector<std::string> tol_overrides;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--seed", seed_value, "override the config seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  run->add_option("--threads", threads, "cap worker parallelism");
  run->add_option("--tolerance-override", tol_overrides,
                  "KEY=VAL tolerance override (repeatable)");

  // sample
  auto* sample = app.add_subcommand(
      "sample", "Sample one word realization and write its spectra as CSV");
  std::string word_text = "x0", sample_dist = "gaussian-complex",
              sample_out = "sample";
  int sample_n = 0, summands = 1;
  std::uint64_t sample_seed = 0;
  double sample_t = 0.0;
  sample->add_option("--word", word_text, "word, e.g. 'x0 x1^-1' or 'x0*x1^-2'");
  sample->add_option("--summands", summands, "independent summands (m)");
  sample->add_option("--n", sample_n, "matrix dimension")->required();
  sample->add_option("--seed", sample_seed, "master seed")->required();
  sample->add_option("--dist", sample_dist, "entry distribution");
  sample->add_option("--t", sample_t, "inverse regularization t >= 0");
  sample->add_option("--out", sample_out, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (densities->parsed())
      return cmd_densities(l_list, alpha_list, r_min, r_max, grid_count,
                           densities_out);
    if (run->parsed())
      return cmd_run(config_path, run_out,
                     seed_given ? std::optional<std::uint64_t>(seed_value)
                                : std::nullopt,
                     threads, tol_overrides);
    if (sample->parsed())
      return cmd_sample(word_text, summands, sample_n, sample_seed,
                        sample_dist, sample_t, sample_out);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericError;
  }
  return kExitConfigError;
}
