#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "enaqt/optimizer.hpp"

namespace enaqt {

/// Uniform-peak and site-optimized results of one realization at one alpha.
struct AlphaBlock {
  double alpha = 0.0;
  double gamma_u = 0.0;
  double eta_u = 0.0;
  std::vector<double> gammas_opt;
  double eta_opt = 0.0;
  double ell_u = 0.0;
  double ell_opt = 0.0;
  Termination termination = Termination::max_steps;
  int steps = 0;
};

struct RealizationRecord {
  int index = 0;
  std::uint64_t seed = 0;
  std::vector<double> energies;
  std::vector<AlphaBlock> blocks;
  /// Set when the realization failed; `blocks` is then incomplete.
  std::optional<std::string> error;

  const AlphaBlock* block(double alpha) const;
};

inline constexpr const char* kRecordSchema = "enaqt.realization/1";

void to_json(nlohmann::json& j, const RealizationRecord& r);
void from_json(const nlohmann::json& j, RealizationRecord& r);

struct EnsembleConfig {
  int n_realizations = 500;
  int n_sites = 12;
  std::vector<double> alphas{1.0, 3.0, 5.0};
  double gamma_l = 0.1;
  double j_max = 0.1;
  std::uint64_t master_seed = 2024;
  OptimizerConfig optimizer = [] {
    OptimizerConfig c;
    c.strict_boundary_stop = true;
    return c;
  }();
  /// Uniform-dephasing scan grid used to find Gamma_u.
  std::vector<double> scan_grid = log_grid(1e-4, 10.0, 101);
  unsigned threads = 0;

  void validate() const;
};

/// Realization i draws energies with derive_seed(master_seed, i), finds
/// Gamma_u per alpha by scan_uniform, then runs optimize_local from Gamma_u.
/// Failures are recorded in the realization's `error` field.
RealizationRecord run_realization(const EnsembleConfig& cfg, int index);
std::vector<RealizationRecord> run_ensemble(const EnsembleConfig& cfg);

/// Spearman rank correlation with average ranks for ties. Throws
/// InvalidArgument on a length mismatch or fewer than two points and
/// UndefinedCorrelation when either input is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties sharing the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

/// Five-number summary with linearly interpolated quartiles; whiskers reach
/// the most extreme data points within 1.5 IQR of the quartiles and points
/// beyond are outliers.
struct BoxplotStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;
};

BoxplotStats boxplot_stats(std::span<const double> values);

/// Linear-interpolation quantile of sorted data, p in [0,1].
double quantile_sorted(std::span<const double> sorted, double p);

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<int> counts;
  int below = 0;  // values < lo
  int above = 0;  // values > lo + width * counts.size()
};

/// Fixed-width bins [lo + k w, lo + (k+1) w); the last bin includes its
/// upper edge.
Histogram histogram(std::span<const double> values, double lo, double hi, double width);

struct BinnedBoxplot {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::optional<BoxplotStats> stats;  // empty bins carry no stats
};

/// Groups y by the bin of x and summarizes each group.
std::vector<BinnedBoxplot> binned_boxplots(std::span<const double> x, std::span<const double> y, double lo,
                                           double hi, double width);

struct MismatchCorrelation {
  std::vector<double> mismatch;  // pooled inner-site delta_n
  std::vector<double> gammas;    // matching optimized Gamma_n
  std::vector<BinnedBoxplot> bins;
  double spearman = 0.0;
};

/// Pools (Gamma_n, delta_n) over inner sites of every successful record at
/// `alpha`, bins delta in widths of 0.25 over [0, 2].
MismatchCorrelation correlate_mismatch(std::span<const RealizationRecord> records, double alpha);

struct AlphaSummary {
  double alpha = 0.0;
  int count = 0;
  double mean_flux_improvement = 0.0;  // mean of eta_opt / eta_u - 1
  double std_flux_improvement = 0.0;
  double mean_ell_improvement = 0.0;   // mean of ell_opt / ell_u - 1
  double std_ell_improvement = 0.0;
  double mean_eta_u = 0.0, std_eta_u = 0.0;
  double mean_eta_opt = 0.0, std_eta_opt = 0.0;
  double mean_ell_u = 0.0, std_ell_u = 0.0;
  double mean_ell_opt = 0.0, std_ell_opt = 0.0;
  double mean_gamma_u = 0.0;
  double fraction_improved = 0.0;      // share with eta_opt >= eta_u
  double spearman_gamma_mismatch = 0.0;
  double spearman_flux_ell = 0.0;      // flux ratio vs coherence-length ratio
  int converged = 0;
  int boundary_hit = 0;
  int max_steps = 0;
};

struct EnsembleSummary {
  int n_sites = 0;
  int n_records = 0;
  int failures = 0;
  std::vector<AlphaSummary> alphas;
};

/// Statistics are computed after sorting by realization index, so the input
/// order never changes the result.
EnsembleSummary summarize(std::span<const RealizationRecord> records, std::span<const double> alphas);

void to_json(nlohmann::json& j, const AlphaSummary& s);
void to_json(nlohmann::json& j, const EnsembleSummary& s);
void to_json(nlohmann::json& j, const BoxplotStats& s);

double mean(std::span<const double> v);
/// Population standard deviation.
double stddev(std::span<const double> v);

}  // namespace enaqt
