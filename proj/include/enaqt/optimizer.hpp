#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "enaqt/lindblad.hpp"
#include "enaqt/model.hpp"

namespace enaqt {

/// Adamax ascent on log10(Gamma_n) inside the box [lower_bound, upper_bound].
struct OptimizerConfig {
  double learning_rate = 0.02;  // log10 units
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int min_steps = 30;
  int max_steps = 100000;
  double grad_tol = 1e-8;  // on |d eta / d log10 Gamma_n|
  double lower_bound = 1e-7;
  double upper_bound = 1.0;
  /// Stop on the first step after min_steps at which any Gamma_n sits on a
  /// bound. Otherwise bound-pinned coordinates are held and the remaining ones
  /// keep ascending until the projected gradient vanishes.
  bool strict_boundary_stop = false;
  bool record_trajectory = false;
  int trajectory_stride = 1;

  void validate() const;
};

enum class Termination { converged, boundary_hit, max_steps };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& s);

struct TrajectoryPoint {
  int step = 0;
  double flux = 0.0;
  std::vector<double> gammas;
};

struct OptimizationResult {
  std::vector<double> gammas;
  double flux = 0.0;
  Termination termination = Termination::max_steps;
  int steps = 0;
  /// Set when the last iterate fell below the starting flux and the best
  /// iterate seen was returned instead.
  bool reverted_to_best = false;
  std::vector<TrajectoryPoint> trajectory;
};

struct ScanPoint {
  double gamma = 0.0;
  double flux = 0.0;
};

struct UniformScan {
  std::vector<ScanPoint> curve;
  double gamma_u = 0.0;
  double eta_u = 0.0;
};

/// `count` points log-spaced over [lo, hi] inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

/// Flux with every Gamma_n equal to each grid value. The discrete maximum is
/// refined by golden-section search over the neighbouring grid interval (to
/// 1e-3 relative in Gamma), then polished by bisection on the exact
/// uniform-direction derivative.
UniformScan scan_uniform(const ChainSpec& spec, double gamma_l, std::span<const double> grid);
UniformScan scan_uniform(const TransportSystem& system, std::span<const double> grid);

/// Sum over n of d eta / d log10 Gamma_n at uniform Gamma.
double uniform_direction_derivative(const TransportSystem& system, double gamma);

OptimizationResult optimize_local(const TransportSystem& system, std::span<const double> init,
                                  const OptimizerConfig& cfg);
OptimizationResult optimize_local(const ChainSpec& spec, double gamma_l, std::span<const double> init,
                                  const OptimizerConfig& cfg);

/// Initial rates of start `index`: log-uniform over the config bounds, drawn
/// from a stream derived from (seed, index).
std::vector<double> multi_start_init(int n_sites, std::uint64_t seed, int index, const OptimizerConfig& cfg);

/// Best of `n_starts` optimize_local runs; ties go to the lowest start index.
/// Throws NumericalError if every start fails.
OptimizationResult multi_start(const ChainSpec& spec, double gamma_l, int n_starts, std::uint64_t seed,
                               const OptimizerConfig& cfg, unsigned threads = 0);

}  // namespace enaqt
