#include "enaqt/analytic3.hpp"

#include <cmath>

#include "enaqt/errors.hpp"
#include "enaqt/lindblad.hpp"

namespace enaqt {

namespace {

// Shared bracket of both closed forms.
double middle_denominator(const ThreeSiteParams& p) {
  const double d2 = p.delta * p.delta;
  const double g2 = p.gamma2;
  const double g3 = p.gamma3;
  return 4.0 * d2 * (3.0 * g2 + g3) + g2 * (3.0 * g2 * g2 + 5.0 * g2 * g3 + 2.0 * g3 * g3);
}

}  // namespace

void ThreeSiteParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("ThreeSiteParams: delta must be > 0");
  if (!(gamma2 >= 0.0) || !(gamma3 >= 0.0) || !std::isfinite(gamma2) || !std::isfinite(gamma3)) {
    throw InvalidArgument("ThreeSiteParams: dephasing rates must be finite and >= 0");
  }
  if (!std::isfinite(j1) || !std::isfinite(j)) throw InvalidArgument("ThreeSiteParams: non-finite tunneling");
}

double eta_nn(const ThreeSiteParams& p) {
  p.validate();
  const double den = middle_denominator(p);
  if (den == 0.0) throw DegenerateInput("eta_nn: zero denominator (Gamma_2 = 0)");
  return p.j1 * p.j1 * 4.0 * p.gamma2 * (p.gamma2 + p.gamma3) / den;
}

double eta_lr(const ThreeSiteParams& p) {
  p.validate();
  const double d2 = p.delta * p.delta;
  const double g2 = p.gamma2;
  const double g3 = p.gamma3;
  const double den = (16.0 * d2 + g3 * g3) * middle_denominator(p);
  if (den == 0.0) throw DegenerateInput("eta_lr: zero denominator (Gamma_2 = 0)");
  const double num = 8.0 * (g2 * g3 * (g2 + g3) * (g2 + g3) + 2.0 * d2 * (4.0 * g2 * g2 + 6.0 * g2 * g3 + g3 * g3));
  return num * p.j * p.j / den;
}

ComplexMatrix three_site_hamiltonian(const ThreeSiteParams& p, ThreeSiteMode mode) {
  p.validate();
  const double t = mode == ThreeSiteMode::nearest_neighbor ? p.j1 : p.j;
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = 0.0;
  h(1, 1) = -p.delta;
  h(2, 2) = -2.0 * p.delta;
  h(0, 1) = h(1, 0) = t;
  h(1, 2) = h(2, 1) = t;
  if (mode == ThreeSiteMode::long_range) h(0, 2) = h(2, 0) = t;
  return h;
}

double three_site_numeric(const ThreeSiteParams& p, ThreeSiteMode mode, double gamma_l) {
  const NoiseProfile noise{{0.0, p.gamma2, p.gamma3}, gamma_l};
  return flux(steady_state(build_liouvillian(three_site_hamiltonian(p, mode), noise)), gamma_l);
}

double compare_to_numeric(const ThreeSiteParams& p, ThreeSiteMode mode, double gamma_l) {
  const double analytic = mode == ThreeSiteMode::nearest_neighbor ? eta_nn(p) : eta_lr(p);
  if (!(analytic > 0.0)) throw DegenerateInput("compare_to_numeric: analytic flux is not positive");
  const double numeric = three_site_numeric(p, mode, gamma_l);
  return std::abs(numeric - analytic) / analytic;
}

}  // namespace enaqt
