#include "enaqt/observables.hpp"

#include <cmath>
#include <limits>

#include "enaqt/errors.hpp"

namespace enaqt {

namespace {
constexpr double kTiny = 1e-14;
}

std::vector<double> populations(const DensityMatrix& rho) {
  std::vector<double> out(rho.n_sites());
  for (int n = 0; n < rho.n_sites(); ++n) out[n] = rho.rho(n, n).real();
  return out;
}

CoherenceMap coherence_map(const DensityMatrix& rho) {
  CoherenceMap out{rho.rho.cwiseAbs()};
  out.magnitudes.diagonal().setZero();
  return out;
}

double coherence_length(const DensityMatrix& rho) {
  const int n = rho.n_sites();
  double weighted = 0.0;
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double mag = std::abs(rho.rho(a, b));
      weighted += std::abs(a - b) * mag;
      total += mag;
    }
  }
  return total < kTiny ? 0.0 : weighted / total;
}

RealMatrix ratio_map(const DensityMatrix& rho_o, const DensityMatrix& rho_u) {
  if (rho_o.rho.rows() != rho_u.rho.rows() || rho_o.rho.cols() != rho_u.rho.cols()) {
    throw InvalidArgument("ratio_map: density matrices differ in size");
  }
  const int n = rho_o.n_sites();
  RealMatrix out = RealMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      const double den = std::abs(rho_u.rho(a, b));
      out(a, b) = den < kTiny ? std::numeric_limits<double>::quiet_NaN() : std::abs(rho_o.rho(a, b)) / den;
    }
  }
  return out;
}

std::vector<double> local_mismatch(const std::vector<double>& energies) {
  if (energies.size() < 3) throw InvalidArgument("local_mismatch: need at least 3 sites");
  std::vector<double> out;
  out.reserve(energies.size() - 2);
  for (std::size_t n = 1; n + 1 < energies.size(); ++n) {
    out.push_back(std::abs(energies[n] - energies[n - 1]) + std::abs(energies[n] - energies[n + 1]));
  }
  return out;
}

}  // namespace enaqt
