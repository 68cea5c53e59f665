#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "enaqt/errors.hpp"
#include "enaqt/gradient.hpp"
#include "enaqt/optimizer.hpp"

using namespace enaqt;

namespace {

double max_excess(const FluxGradient& adj, const FluxGradient& fd) {
  double worst = 0.0;
  for (std::size_t i = 0; i < adj.values.size(); ++i) {
    const double tol = std::max(1e-4 * std::abs(fd.values[i]), 1e-6);
    worst = std::max(worst, std::abs(adj.values[i] - fd.values[i]) / tol);
  }
  return worst;
}

NoiseProfile random_noise(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lg(-4.0, 0.0);
  NoiseProfile p{{}, 0.1};
  for (int i = 0; i < n; ++i) p.gammas.push_back(std::pow(10.0, lg(rng)));
  return p;
}

}  // namespace

TEST_CASE("adjoint gradient matches central differences") {
  std::mt19937_64 rng(42);
  int cases = 0;
  for (int k = 0; k < 60; ++k) {
    const double alpha = std::array{1.0, 3.0, 5.0}[k % 3];
    const int n = 4 + k % 9;
    const ChainSpec spec = (k / 3) % 2 ? build_disordered(n, 1000 + k, alpha) : build_ramp(n, 1.0 / 12, 0.0, alpha);
    const auto noise = random_noise(n, rng);
    const auto adj = flux_gradient(spec, noise);
    const auto fd = fd_gradient(spec, noise);
    CHECK(max_excess(adj, fd) <= 1.0);
    ++cases;
  }
  CHECK(cases >= 50);
}

TEST_CASE("finite differences converge to the adjoint gradient at second order") {
  std::mt19937_64 rng(7);
  const auto spec = build_disordered(6, 77, 3.0);
  const auto noise = random_noise(6, rng);
  const auto adj = flux_gradient(spec, noise);
  auto err = [&](double step) {
    const auto fd = fd_gradient(spec, noise, step);
    double e = 0.0;
    for (int i = 0; i < 6; ++i) e = std::max(e, std::abs(fd.values[i] - adj.values[i]));
    return e;
  };
  CHECK(err(1e-4) < err(1e-3));
  CHECK(err(1e-3) < err(1e-2) / 20.0);
}

TEST_CASE("log-derivative obeys the chain rule") {
  const auto spec = build_ramp(7, 0.1, 0.0, 2.0);
  const NoiseProfile noise{{0.02, 0.3, 0.005, 0.1, 0.6, 0.04, 0.2}, 0.1};
  const auto adj = flux_gradient(spec, noise);
  const TransportSystem sys(spec, 0.1);
  const double h = 1e-5;
  for (int n = 0; n < 7; ++n) {
    auto up = noise.gammas, down = noise.gammas;
    up[n] += h * noise.gammas[n];
    down[n] -= h * noise.gammas[n];
    const double raw = (sys.flux(up) - sys.flux(down)) / (2.0 * h * noise.gammas[n]);
    CHECK(adj.values[n] == doctest::Approx(noise.gammas[n] * std::log(10.0) * raw).epsilon(1e-6));
  }
}

TEST_CASE("equivalent inner sites share a gradient") {
  ChainSpec spec{6, std::vector<double>(6, 0.0), 0.0, 0.1};
  const auto g = flux_gradient(spec, NoiseProfile::uniform(6, 0.05, 0.1)).values;
  for (int n = 2; n < 5; ++n) CHECK(g[n] == doctest::Approx(g[1]).epsilon(1e-9));
}

TEST_CASE("gradient vanishes as the chain decouples") {
  auto largest = [](double j_max) {
    ChainSpec spec = build_ramp(6, 0.1, 0.0, 2.0, j_max);
    double m = 0.0;
    for (double g : flux_gradient(spec, NoiseProfile::uniform(6, 0.1, 0.1)).values) m = std::max(m, std::abs(g));
    return m;
  };
  const double coupled = largest(1e-1);
  CHECK(coupled > 1e-6);
  CHECK(largest(1e-3) < 1e-3 * coupled);
  CHECK(largest(1e-5) < 1e-7 * coupled);
}

TEST_CASE("gradient requires positive rates") {
  const auto spec = build_ramp(3, 0.1);
  CHECK_THROWS_AS(flux_gradient(spec, NoiseProfile{{0.1, 0.0, 0.1}, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(fd_gradient(spec, NoiseProfile{{0.1, -1.0, 0.1}, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(fd_gradient(spec, NoiseProfile{{0.1, 0.1, 0.1}, 0.1}, 0.0), InvalidArgument);
}

TEST_CASE("flux_and_gradient reports the solved flux") {
  const auto spec = build_disordered(5, 3, 1.0);
  const TransportSystem sys(spec, 0.1);
  const std::vector<double> g{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(flux_and_gradient(sys, g).flux == sys.flux(g));
}

TEST_CASE("uniform-direction derivative vanishes at scanned peaks") {
  for (double alpha : {1.0, 3.0, 5.0}) {
    const TransportSystem sys(build_ramp(12, 1.0 / 12, 0.0, alpha), 0.1);
    const auto scan = scan_uniform(sys, log_grid(1e-4, 10.0, 101));
    CHECK(std::abs(uniform_direction_derivative(sys, scan.gamma_u)) < 1e-5 * scan.eta_u);
  }
}
