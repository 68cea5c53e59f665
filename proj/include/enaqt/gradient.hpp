#pragma once

#include <span>
#include <vector>

#include "enaqt/lindblad.hpp"
#include "enaqt/model.hpp"

namespace enaqt {

/// d(eta) / d(log10 Gamma_n), one entry per site.
struct FluxGradient {
  std::vector<double> values;
};

struct FluxAndGradient {
  double flux = 0.0;
  FluxGradient gradient;
};

/// Exact sensitivity of the steady-state flux. With A x = e_1 the
/// trace-constrained steady-state system and A^T w = gamma_l e_N, the
/// derivative is -w^T (dA/dGamma_n) x; dA/dGamma_n is diagonal (-1/2 on every
/// coherence touching site n), so each component costs O(N).
FluxAndGradient flux_and_gradient(const TransportSystem& system, std::span<const double> gammas);

/// Requires every Gamma_n > 0.
FluxGradient flux_gradient(const ChainSpec& spec, const NoiseProfile& noise);

/// Central differences of eta in log10(Gamma_n), one pair of solves per site.
/// Validation oracle only.
FluxGradient fd_gradient(const ChainSpec& spec, const NoiseProfile& noise, double step = 1e-4);

}  // namespace enaqt
