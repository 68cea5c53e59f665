#include "enaqt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "enaqt/errors.hpp"
#include "enaqt/gradient.hpp"
#include "enaqt/parallel.hpp"

namespace enaqt {

namespace {

constexpr double kGoldenRelTol = 1e-3;
constexpr double kPolishLogTol = 1e-10;

double pow10(double x) { return std::pow(10.0, x); }

void validate_grid(std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("scan_uniform: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw InvalidArgument("scan_uniform: grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidArgument("scan_uniform: grid must be strictly increasing");
  }
}

double uniform_flux(const TransportSystem& system, double gamma) {
  const std::vector<double> gammas(system.n_sites(), gamma);
  return system.flux(gammas);
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("OptimizerConfig: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw InvalidArgument("OptimizerConfig: beta1, beta2 must lie in [0, 1)");
  }
  if (!(epsilon >= 0.0)) throw InvalidArgument("OptimizerConfig: epsilon must be >= 0");
  if (!(lower_bound > 0.0 && lower_bound < upper_bound) || !std::isfinite(upper_bound)) {
    throw InvalidArgument("OptimizerConfig: need 0 < lower_bound < upper_bound");
  }
  if (min_steps < 0 || min_steps > max_steps) throw InvalidArgument("OptimizerConfig: need 0 <= min_steps <= max_steps");
  if (!(grad_tol > 0.0)) throw InvalidArgument("OptimizerConfig: grad_tol must be > 0");
  if (trajectory_stride < 1) throw InvalidArgument("OptimizerConfig: trajectory_stride must be >= 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::boundary_hit: return "boundary_hit";
    case Termination::max_steps: return "max_steps";
  }
  return "unknown";
}

Termination termination_from_string(const std::string& s) {
  if (s == "converged") return Termination::converged;
  if (s == "boundary_hit") return Termination::boundary_hit;
  if (s == "max_steps") return Termination::max_steps;
  throw InvalidArgument("unknown termination '" + s + "'");
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count == 1 && lo > 0.0 && hi == lo) return {lo};
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw InvalidArgument("log_grid: need 0 < lo < hi and count >= 2 (or lo == hi and count == 1)");
  }
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) out[i] = pow10(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double uniform_direction_derivative(const TransportSystem& system, double gamma) {
  const std::vector<double> gammas(system.n_sites(), gamma);
  const auto fg = flux_and_gradient(system, gammas);
  double sum = 0.0;
  for (double g : fg.gradient.values) sum += g;
  return sum;
}

UniformScan scan_uniform(const TransportSystem& system, std::span<const double> grid) {
  validate_grid(grid);
  UniformScan out;
  out.curve.reserve(grid.size());
  for (double g : grid) out.curve.push_back({g, uniform_flux(system, g)});

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.curve.size(); ++i) {
    if (out.curve[i].flux > out.curve[best].flux) best = i;
  }
  out.gamma_u = out.curve[best].gamma;
  out.eta_u = out.curve[best].flux;
  if (grid.size() < 2) return out;

  // Golden-section on log10(Gamma) over the neighbouring grid interval.
  double a = std::log10(grid[best == 0 ? 0 : best - 1]);
  double b = std::log10(grid[std::min(best + 1, grid.size() - 1)]);
  const double tol = std::log10(1.0 + kGoldenRelTol);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = uniform_flux(system, pow10(c));
  double fd = uniform_flux(system, pow10(d));
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = uniform_flux(system, pow10(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = uniform_flux(system, pow10(d));
    }
  }
  double peak = fc >= fd ? c : d;

  // Bisection on the sign of the exact derivative, when the golden bracket
  // (widened by one tolerance on each side) straddles a stationary point.
  double lo = std::max(a - tol, std::log10(grid.front()));
  double hi = std::min(b + tol, std::log10(grid.back()));
  if (uniform_direction_derivative(system, pow10(lo)) > 0.0 &&
      uniform_direction_derivative(system, pow10(hi)) < 0.0) {
    while (hi - lo > kPolishLogTol) {
      const double mid = 0.5 * (lo + hi);
      if (uniform_direction_derivative(system, pow10(mid)) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    peak = 0.5 * (lo + hi);
  }

  const double peak_flux = uniform_flux(system, pow10(peak));
  if (peak_flux >= out.eta_u) {
    out.gamma_u = pow10(peak);
    out.eta_u = peak_flux;
  }
  return out;
}

UniformScan scan_uniform(const ChainSpec& spec, double gamma_l, std::span<const double> grid) {
  spec.validate();
  return scan_uniform(TransportSystem(spec, gamma_l), grid);
}

OptimizationResult optimize_local(const TransportSystem& system, std::span<const double> init,
                                  const OptimizerConfig& cfg) {
  cfg.validate();
  const int n = system.n_sites();
  if (init.size() != static_cast<std::size_t>(n)) throw InvalidArgument("optimize_local: init has wrong length");
  for (double g : init) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("optimize_local: initial rates must be > 0");
  }

  const double log_lo = std::log10(cfg.lower_bound);
  const double log_hi = std::log10(cfg.upper_bound);
  std::vector<double> theta(n);
  std::vector<double> gammas(n);
  const auto set_point = [&](int k, double value) {
    theta[k] = std::clamp(value, log_lo, log_hi);
    // Bounds are hit exactly so the box test below is reliable.
    if (theta[k] == log_lo) {
      gammas[k] = cfg.lower_bound;
    } else if (theta[k] == log_hi) {
      gammas[k] = cfg.upper_bound;
    } else {
      gammas[k] = pow10(theta[k]);
    }
  };
  for (int k = 0; k < n; ++k) set_point(k, std::log10(init[k]));

  std::vector<double> m(n, 0.0);
  std::vector<double> u(n, 0.0);
  double beta1_power = 1.0;

  OptimizationResult result;
  double initial_flux = 0.0;
  double best_flux = -std::numeric_limits<double>::infinity();
  std::vector<double> best_gammas;

  for (int step = 0;; ++step) {
    const auto fg = flux_and_gradient(system, gammas);
    const auto& grad = fg.gradient.values;
    if (step == 0) initial_flux = fg.flux;
    if (fg.flux > best_flux) {
      best_flux = fg.flux;
      best_gammas = gammas;
    }
    if (cfg.record_trajectory && step % cfg.trajectory_stride == 0) {
      result.trajectory.push_back({step, fg.flux, gammas});
    }

    bool on_bound = false;
    bool all_small = true;
    bool free_small = true;
    for (int k = 0; k < n; ++k) {
      const bool at_lo = theta[k] <= log_lo;
      const bool at_hi = theta[k] >= log_hi;
      on_bound = on_bound || at_lo || at_hi;
      const bool small = std::abs(grad[k]) < cfg.grad_tol;
      all_small = all_small && small;
      const bool held = (at_lo && grad[k] < 0.0) || (at_hi && grad[k] > 0.0);
      free_small = free_small && (small || held);
    }

    std::optional<Termination> stop;
    if (step >= cfg.min_steps) {
      if (all_small) {
        stop = Termination::converged;
      } else if (on_bound && (cfg.strict_boundary_stop || free_small)) {
        stop = Termination::boundary_hit;
      } else if (step >= cfg.max_steps) {
        stop = Termination::max_steps;
      }
    }
    if (stop) {
      result.gammas = gammas;
      result.flux = fg.flux;
      result.termination = *stop;
      result.steps = step;
      if (cfg.record_trajectory && step % cfg.trajectory_stride != 0) {
        result.trajectory.push_back({step, fg.flux, gammas});
      }
      break;
    }

    // Below tolerance everywhere: hold the point until min_steps is reached.
    // Adamax normalizes by max(|g|) + epsilon, so tiny gradients near an
    // optimum would otherwise be amplified into steps of order lr.
    if (all_small) continue;

    beta1_power *= cfg.beta1;
    const double rate = cfg.learning_rate / (1.0 - beta1_power);
    for (int k = 0; k < n; ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * grad[k];
      u[k] = std::max(cfg.beta2 * u[k], std::abs(grad[k]) + cfg.epsilon);
      if (u[k] > 0.0) set_point(k, theta[k] + rate * m[k] / u[k]);
    }
  }

  if (result.flux < initial_flux) {
    result.gammas = best_gammas;
    result.flux = best_flux;
    result.reverted_to_best = true;
  }
  return result;
}

OptimizationResult optimize_local(const ChainSpec& spec, double gamma_l, std::span<const double> init,
                                  const OptimizerConfig& cfg) {
  spec.validate();
  return optimize_local(TransportSystem(spec, gamma_l), init, cfg);
}

std::vector<double> multi_start_init(int n_sites, std::uint64_t seed, int index, const OptimizerConfig& cfg) {
  std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(index)));
  const double lo = std::log10(cfg.lower_bound);
  const double hi = std::log10(cfg.upper_bound);
  std::vector<double> out(n_sites);
  for (double& g : out) {
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    g = pow10(lo + (hi - lo) * unit);
  }
  return out;
}

OptimizationResult multi_start(const ChainSpec& spec, double gamma_l, int n_starts, std::uint64_t seed,
                               const OptimizerConfig& cfg, unsigned threads) {
  if (n_starts < 1) throw InvalidArgument("multi_start: n_starts must be >= 1");
  spec.validate();
  cfg.validate();
  const TransportSystem system(spec, gamma_l);

  std::vector<std::optional<OptimizationResult>> runs(n_starts);
  std::vector<std::string> errors(n_starts);
  parallel_for(static_cast<std::size_t>(n_starts), threads, [&](std::size_t i) {
    try {
      const auto init = multi_start_init(spec.n_sites, seed, static_cast<int>(i), cfg);
      runs[i] = optimize_local(system, init, cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i] && (!best || runs[i]->flux > runs[*best]->flux)) best = i;
  }
  if (!best) throw NumericalError("multi_start: all " + std::to_string(n_starts) + " starts failed; first error: " + errors[0]);
  return std::move(*runs[*best]);
}

}  // namespace enaqt
