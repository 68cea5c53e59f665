#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "enaqt/errors.hpp"
#include "enaqt/model.hpp"

using namespace enaqt;

TEST_CASE("ramp energies descend from the offset") {
  const auto s = build_ramp(12, 1.0 / 12);
  CHECK(s.energies.front() == 0.0);
  CHECK(s.energies.back() == doctest::Approx(-11.0 / 12).epsilon(1e-15));

  const auto half = build_ramp(12, 0.5 / 12);
  CHECK(half.energies.front() - half.energies.back() == doctest::Approx(0.458333).epsilon(1e-5));

  const auto two = build_ramp(2, 1.0, 5.0);
  CHECK(two.energies == std::vector<double>{5.0, 4.0});
}

TEST_CASE("ramp rejects bad arguments") {
  CHECK_THROWS_AS(build_ramp(1, 0.1), InvalidArgument);
  CHECK_THROWS_AS(build_ramp(4, 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_ramp(4, -1.0), InvalidArgument);
}

TEST_CASE("disorder is deterministic and uniform on [0,1)") {
  CHECK(sample_disorder(12, 7) == sample_disorder(12, 7));
  CHECK(sample_disorder(12, 7) != sample_disorder(12, 8));

  const auto e = sample_disorder(12, 123);
  REQUIRE(e.size() == 12);
  for (double v : e) CHECK((v >= 0.0 && v < 1.0));

  const auto big = sample_disorder(100000, 99);
  double sum = 0.0;
  for (double v : big) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    sum += v;
  }
  CHECK(std::abs(sum / big.size() - 0.5) < 0.01);
  CHECK_THROWS_AS(sample_disorder(1, 0), InvalidArgument);
}

TEST_CASE("derived seeds are distinct and order independent") {
  CHECK(derive_seed(2024, 3) == derive_seed(2024, 3));
  CHECK(derive_seed(2024, 3) != derive_seed(2024, 4));
  CHECK(derive_seed(2024, 3) != derive_seed(2025, 3));
}

TEST_CASE("power-law tunneling") {
  ChainSpec s{3, {0, 0, 0}, 1.0, 0.1};
  auto t = tunneling_matrix(s);
  CHECK(t(0, 1) == doctest::Approx(0.1));
  CHECK(t(0, 2) == doctest::Approx(0.05));
  CHECK(t(0, 0) == 0.0);

  s.alpha = 5.0;
  t = tunneling_matrix(s);
  CHECK(t(0, 2) == doctest::Approx(3.125e-3));
  CHECK(t(0, 2) / t(0, 1) < 0.04);

  s.alpha = 0.0;
  t = tunneling_matrix(s);
  CHECK(t(0, 2) == 0.1);
  CHECK(t(1, 2) == 0.1);

  const auto r = tunneling_matrix(build_ramp(9, 0.1, 0.0, 2.5));
  CHECK((r - r.transpose()).norm() == 0.0);
  CHECK(r.minCoeff() >= 0.0);
}

TEST_CASE("hamiltonian") {
  const auto h = hamiltonian(build_ramp(2, 0.3, 0.0, 4.0, 0.1));
  CHECK(h(0, 0) == std::complex<double>(0.0));
  CHECK(h(1, 1).real() == doctest::Approx(-0.3));
  CHECK(h(0, 1).real() == doctest::Approx(0.1));
  CHECK(h(1, 0).real() == doctest::Approx(0.1));

  auto spec = build_disordered(8, 5, 1.5);
  const auto hd = hamiltonian(spec);
  CHECK((hd - hd.adjoint()).norm() == 0.0);

  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hd).eigenvalues();
  for (double& e : spec.energies) e += 0.7;
  const Eigen::VectorXd shifted = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(hamiltonian(spec)).eigenvalues();
  CHECK((shifted - ev - Eigen::VectorXd::Constant(8, 0.7)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chain spec validation") {
  CHECK_THROWS_AS((ChainSpec{3, {0, 1}, 1.0, 0.1}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ChainSpec{2, {0, 1}, 1.0, 0.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ChainSpec{2, {0, 1}, NAN, 0.1}.validate()), InvalidArgument);
}

TEST_CASE("chain spec json round trip") {
  const auto s = build_disordered(6, 11, 3.0);
  const nlohmann::json j = s;
  const auto back = j.get<ChainSpec>();
  CHECK(back.energies == s.energies);
  CHECK(back.alpha == s.alpha);
  CHECK(back.j_max == s.j_max);
  CHECK(nlohmann::json::parse(j.dump()).get<ChainSpec>().energies == s.energies);

  auto extra = j;
  extra["colour"] = "red";
  CHECK_THROWS(extra.get<ChainSpec>());
}
