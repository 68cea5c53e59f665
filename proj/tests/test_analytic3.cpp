#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "enaqt/analytic3.hpp"
#include "enaqt/errors.hpp"
#include "enaqt/optimizer.hpp"

using namespace enaqt;

namespace {

ThreeSiteParams params(double j, double delta, double g2, double g3) { return {j, j, delta, g2, g3}; }

}  // namespace

TEST_CASE("nearest-neighbour closed form") {
  CHECK(eta_nn(params(0.01, 0.5, 0.2, 0.2)) == doctest::Approx(1e-4 * 0.32 / 0.88).epsilon(1e-12));
  // Equal rates reduce to 4 G J^2 / (8 D^2 + 5 G^2).
  for (double g : {0.05, 0.3, 2.0}) {
    CHECK(eta_nn(params(0.01, 0.4, g, g)) ==
          doctest::Approx(4.0 * g * 1e-4 / (8.0 * 0.16 + 5.0 * g * g)).epsilon(1e-12));
  }
  // Gamma_3 = 0 reduces to 4 G2 J^2 / (3 (4 D^2 + G2^2)).
  CHECK(eta_nn(params(0.01, 0.3, 0.7, 0.0)) ==
        doctest::Approx(4.0 * 0.7 * 1e-4 / (3.0 * (4.0 * 0.09 + 0.49))).epsilon(1e-12));
  CHECK(eta_nn(params(0.01, 0.3, 1e-12, 0.5)) < 1e-14);
  CHECK_THROWS_AS(eta_nn(params(0.01, 0.3, 0.0, 0.0)), DegenerateInput);
  CHECK_THROWS_AS(eta_nn(params(0.01, 0.0, 0.1, 0.1)), InvalidArgument);
}

TEST_CASE("long-range closed form limits") {
  const double j = 1e-3, d = 0.3;
  double prev = INFINITY;
  for (double ratio : {20.0, 50.0, 200.0, 1000.0}) {
    const double g = ratio * d;
    const double e12 = std::abs(eta_lr(params(j, d, g, g)) / (16.0 * j * j / (5.0 * g)) - 1.0);
    CHECK(e12 < prev);
    prev = e12;
  }
  CHECK(prev < 1e-4);
  const double g = 20.0 * d;
  CHECK(eta_lr(params(j, d, g, 1e-9 * g)) == doctest::Approx(4.0 * j * j / (3.0 * g)).epsilon(0.02));
  // Dephasing both sites helps when Delta < Gamma.
  for (double g2 : {0.5, 1.0, 3.0}) CHECK(eta_lr(params(j, d, g2, g2)) > eta_lr(params(j, d, g2, 1e-3 * g2)));
  CHECK_THROWS_AS(eta_lr(params(j, d, 0.0, 0.0)), DegenerateInput);
}

TEST_CASE("optimal ordering for nearest-neighbour tunneling") {
  const double d = 0.2;
  for (double g2 = 2.0 * d; g2 <= 10.0 * d + 1e-12; g2 += 0.5 * d) {
    CHECK(eta_nn(params(1e-3, d, g2, g2)) < eta_nn(params(1e-3, d, g2, 0.0)));
  }
}

TEST_CASE("linear Gamma_3 coefficient changes sign at Gamma_2 = 2 Delta") {
  const double d = 0.25, h = 1e-7;
  auto slope_nn = [&](double g2) { return (eta_nn(params(1.0, d, g2, h)) - eta_nn(params(1.0, d, g2, 0.0))) / h; };
  CHECK(slope_nn(1.5 * d) > 0.0);
  CHECK(slope_nn(1.9 * d) > 0.0);
  CHECK(slope_nn(2.1 * d) < 0.0);
  CHECK(slope_nn(4.0 * d) < 0.0);

  auto slope_lr = [&](double dd, double g2) {
    return (eta_lr(params(1.0, dd, g2, h)) - eta_lr(params(1.0, dd, g2, 0.0))) / h;
  };
  for (double dd : {0.05, 0.3, 1.0})
    for (double g2 : {0.01, 0.1, 0.6, 2.0, 10.0}) CHECK(slope_lr(dd, g2) > 0.0);
}

TEST_CASE("closed forms agree with the numeric solve") {
  CHECK(compare_to_numeric(params(1e-3, 0.3, 0.3, 0.3), ThreeSiteMode::nearest_neighbor) < 0.05);
  CHECK(compare_to_numeric(params(1e-3, 0.3, 0.3, 0.3), ThreeSiteMode::long_range) < 0.05);
  for (auto mode : {ThreeSiteMode::nearest_neighbor, ThreeSiteMode::long_range}) {
    double prev = INFINITY;
    for (double j : {1e-2, 1e-3, 1e-4}) {
      const double err = compare_to_numeric(params(j, 0.3, 0.5, 0.2), mode, 0.1 * j);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("three-site hamiltonian") {
  const auto p = params(0.02, 0.3, 0.1, 0.1);
  const auto nn = three_site_hamiltonian(p, ThreeSiteMode::nearest_neighbor);
  const auto lr = three_site_hamiltonian(p, ThreeSiteMode::long_range);
  CHECK(nn(0, 2) == std::complex<double>(0.0));
  CHECK(lr(0, 2).real() == 0.02);
  CHECK(nn(2, 2).real() == doctest::Approx(-0.6));
}

TEST_CASE("three-site landscapes") {
  // Short-range tunneling favours dephasing the middle site only; long-range
  // tunneling favours dephasing both.
  const auto grid = log_grid(1e-4, 1.0, 41);
  auto argmax = [&](double alpha) {
    const TransportSystem sys(build_ramp(3, 0.3, 0.0, alpha), 0.1);
    double best = -1, b2 = 0, b3 = 0;
    for (double g2 : grid)
      for (double g3 : grid) {
        const double e = sys.flux(std::vector<double>{0.0, g2, g3});
        if (e > best) best = e, b2 = g2, b3 = g3;
      }
    return std::pair{b2, b3};
  };
  const auto [a5_2, a5_3] = argmax(5.0);
  CHECK(a5_2 > 0.1);
  CHECK(a5_3 < 1e-3);
  const auto [a1_2, a1_3] = argmax(1.0);
  CHECK(a1_2 > 0.1);
  CHECK(a1_3 > 0.1);
}
