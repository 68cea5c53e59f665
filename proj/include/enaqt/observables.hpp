#pragma once

#include <vector>

#include "enaqt/lindblad.hpp"
#include "enaqt/model.hpp"

namespace enaqt {

/// |rho_mn| with the diagonal zeroed.
struct CoherenceMap {
  RealMatrix magnitudes;
};

/// Re(rho_nn) for every site.
std::vector<double> populations(const DensityMatrix& rho);

CoherenceMap coherence_map(const DensityMatrix& rho);

/// sum_{m!=n} |m-n| |rho_mn| / sum_{m!=n} |rho_mn|. A state without
/// coherences (denominator below 1e-14) has length 0.
double coherence_length(const DensityMatrix& rho);

/// |rho_o|/|rho_u| element-wise, zero diagonal, NaN where |rho_u| < 1e-14.
RealMatrix ratio_map(const DensityMatrix& rho_o, const DensityMatrix& rho_u);

/// |e_n - e_{n-1}| + |e_n - e_{n+1}| for the inner sites 2..N-1 only.
std::vector<double> local_mismatch(const std::vector<double>& energies);

}  // namespace enaqt
