#pragma once

#include "enaqt/model.hpp"

namespace enaqt {

/// Three-site ramp eps = (0, -delta, -2 delta) with Gamma_1 = 0. `j1` is the
/// nearest-neighbour tunneling of the NN case (J_2 = 0); `j` is the common
/// tunneling of the long-range case (J_1 = J_2 = j).
struct ThreeSiteParams {
  double j1 = 0.0;
  double j = 0.0;
  double delta = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;

  void validate() const;
};

enum class ThreeSiteMode { nearest_neighbor, long_range };

/// Second-order (in J_1) flux with nearest-neighbour tunneling only:
///   J1^2 4 G2 (G2 + G3) / [4 D^2 (3 G2 + G3) + G2 (3 G2^2 + 5 G2 G3 + 2 G3^2)].
double eta_nn(const ThreeSiteParams& p);

/// Second-order (in J) flux with equal tunneling between all three sites:
///   8 [G2 G3 (G2+G3)^2 + 2 D^2 (4 G2^2 + 6 G2 G3 + G3^2)] J^2
///   / ((16 D^2 + G3^2) [4 D^2 (3 G2 + G3) + G2 (3 G2^2 + 5 G2 G3 + 2 G3^2)]).
double eta_lr(const ThreeSiteParams& p);

/// Hamiltonian of the three-site chain for the given mode.
ComplexMatrix three_site_hamiltonian(const ThreeSiteParams& p, ThreeSiteMode mode);

/// Flux from the full steady-state solve with trapping rate `gamma_l`.
double three_site_numeric(const ThreeSiteParams& p, ThreeSiteMode mode, double gamma_l);

/// |eta_numeric - eta_analytic| / eta_analytic. gamma_l must be small against
/// delta and the dephasing rates for the closed forms to apply.
double compare_to_numeric(const ThreeSiteParams& p, ThreeSiteMode mode, double gamma_l = 1e-4);

}  // namespace enaqt
