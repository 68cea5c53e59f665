#include "enaqt/gradient.hpp"

#include <cmath>
#include <numbers>

#include "enaqt/errors.hpp"

namespace enaqt {

namespace {

void require_positive(std::span<const double> gammas, const char* where) {
  for (double g : gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InvalidArgument(std::string(where) + ": log-space derivatives need every Gamma_n > 0");
    }
  }
}

}  // namespace

FluxAndGradient flux_and_gradient(const TransportSystem& system, std::span<const double> gammas) {
  require_positive(gammas, "flux_and_gradient");
  const auto solution = system.solve(gammas);
  const HermitianBasis& basis = system.basis();
  const int n = system.n_sites();

  Eigen::VectorXd seed = Eigen::VectorXd::Zero(basis.dim());
  seed(basis.diag(n - 1)) = system.gamma_l();
  const Eigen::VectorXd adjoint = solution.lu.transpose().solve(seed);

  FluxAndGradient out;
  out.flux = solution.flux;
  out.gradient.values.assign(n, 0.0);
  for (int m = 0; m < n; ++m) {
    for (int k = m + 1; k < n; ++k) {
      const double contraction = adjoint(basis.re(m, k)) * solution.x(basis.re(m, k)) +
                                 adjoint(basis.im(m, k)) * solution.x(basis.im(m, k));
      out.gradient.values[m] += 0.5 * contraction;
      out.gradient.values[k] += 0.5 * contraction;
    }
  }
  for (int m = 0; m < n; ++m) out.gradient.values[m] *= gammas[m] * std::numbers::ln10;
  return out;
}

FluxGradient flux_gradient(const ChainSpec& spec, const NoiseProfile& noise) {
  spec.validate();
  noise.validate(spec.n_sites);
  const TransportSystem system(spec, noise.gamma_l);
  return flux_and_gradient(system, noise.gammas).gradient;
}

FluxGradient fd_gradient(const ChainSpec& spec, const NoiseProfile& noise, double step) {
  spec.validate();
  noise.validate(spec.n_sites);
  require_positive(noise.gammas, "fd_gradient");
  if (!(step > 0.0)) throw InvalidArgument("fd_gradient: step must be > 0");

  // Goes through the complex superoperator route so the oracle shares no
  // code with the cached real-coordinate solver.
  const ComplexMatrix h = hamiltonian(spec);
  const auto eta = [&](const NoiseProfile& p) { return flux(steady_state(build_liouvillian(h, p)), p.gamma_l); };

  FluxGradient out;
  out.values.resize(spec.n_sites);
  NoiseProfile probe = noise;
  for (int site = 0; site < spec.n_sites; ++site) {
    const double log_g = std::log10(noise.gammas[site]);
    probe.gammas[site] = std::pow(10.0, log_g + step);
    const double up = eta(probe);
    probe.gammas[site] = std::pow(10.0, log_g - step);
    const double down = eta(probe);
    probe.gammas[site] = noise.gammas[site];
    out.values[site] = (up - down) / (2.0 * step);
  }
  return out;
}

}  // namespace enaqt
