#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "enaqt/optimizer.hpp"

namespace enaqt::cli {

inline constexpr const char* kConfigSchema = "enaqt.config/1";

struct GridSpec {
  double min = 1e-4;
  double max = 10.0;
  int points = 101;
};

struct Analytic3Settings {
  /// Landscape chain: three-site ramp with this gap, run at the global
  /// gamma_l and j_max.
  double delta = 0.3;
  int points = 41;
  double gamma_min = 1e-4;
  double gamma_max = 1.0;
  /// Oracle table: closed forms vs the numeric solve over
  /// [oracle_min, oracle_max]^2 for each tunneling value in j_sweep.
  double oracle_gamma_l = 1e-4;
  std::vector<double> j_sweep{1e-2, 1e-3, 1e-4};
  double oracle_min = 0.1;
  double oracle_max = 1.0;
  int oracle_points = 5;
};

struct RunConfig {
  std::string command;
  std::string system = "ramp";  // ramp | disorder | file
  int n_sites = 12;
  double delta = 1.0 / 12.0;
  double offset = 0.0;
  bool half_bias = false;
  std::string chain_file;  // system == file: JSON chain spec
  std::vector<double> alphas{1.0, 3.0, 5.0};
  double j_max = 0.1;
  double gamma_l = 0.1;
  std::uint64_t seed = 2024;
  int starts = 100;
  /// Disorder realization used by scan/optimize; its energies match the
  /// ensemble record with the same index and seed.
  int realization = 0;
  int n_realizations = 500;
  /// Ensemble chain lengths; empty means {n_sites}.
  std::vector<int> sizes;
  std::string out_dir = ".";
  /// Unset: strict for disorder runs, non-strict otherwise.
  std::optional<bool> strict_paper_stopping;
  unsigned threads = 0;
  GridSpec grid;
  OptimizerConfig optimizer;
  Analytic3Settings analytic3;

  /// Throws InvalidArgument on any precondition violation. No solves and no
  /// file-system writes happen before this passes.
  void validate() const;
  bool strict() const;
  /// Effective delta (halved under half_bias).
  double ramp_delta() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Overlays the keys present in `j` onto `c`; unknown keys are rejected.
void from_json(const nlohmann::json& j, RunConfig& c);

/// Chain for one alpha under the configured system.
ChainSpec make_chain(const RunConfig& c, double alpha, int n_sites);

std::vector<std::filesystem::path> cmd_scan(const RunConfig& c);
std::vector<std::filesystem::path> cmd_optimize(const RunConfig& c);
std::vector<std::filesystem::path> cmd_ensemble(const RunConfig& c);
std::vector<std::filesystem::path> cmd_analytic3(const RunConfig& c);

/// Re-reads every artifact; throws if one is missing or malformed.
void verify_artifacts(const std::vector<std::filesystem::path>& files);

/// Exit codes: 0 success, 1 run failure (error.json written to the output
/// directory when it exists), 2 usage or configuration error (nothing written).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace enaqt::cli
