// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

double symplectic_defect(const Eigen::MatrixXd& s) {
  const auto w = omega<double>(s.rows() / 2);
  return (s * w * s.transpose() - w).cwiseAbs().maxCoeff();
}

Description squeezed_vacuum(double z) {
  Description d{Eigen::MatrixXd::Identity(2, 2), cvec({0.0}), 1 / std::sqrt(std::cosh(z))};
  d.cov(0, 0) = std::exp(-2 * z);
  d.cov(1, 1) = std::exp(2 * z);
  return d;
}

}  // namespace

TEST_CASE("core: symplectic form") {
  const auto w = omega<double>(2);
  CHECK(w(0, 1) == 1.0);
  CHECK(w(1, 0) == -1.0);
  CHECK(w(2, 3) == 1.0);
  CHECK(w(0, 3) == 0.0);
  CHECK((w * w + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(4, 1, 4);
  CHECK((omega_times(x) - w * x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("core: hat_d and its inverse") {
  CHECK(hat_d<double>(cvec({0.0})).cwiseAbs().maxCoeff() == 0.0);
  const auto d = hat_d<double>(cvec({cd(1, 2)}));
  CHECK(d(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(d(1) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
  Eigen::VectorXd v(4);
  v << std::sqrt(2.0), 0, 0, std::sqrt(2.0);
  const Eigen::VectorXcd a = hat_d_inv(v);
  CHECK(std::abs(a(0) - 1.0) < 1e-15);
  CHECK(std::abs(a(1) - cd(0, 1)) < 1e-15);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto al = random_cvec(rng, 3, 4.0);
    const auto h = hat_d<double>(al);
    CHECK(std::abs(h.squaredNorm() - 2 * al.squaredNorm()) < 1e-12);
    CHECK((Eigen::VectorXcd(hat_d_inv(h)) - al).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("core: validate_description") {
  const auto vac = validate_description(vacuum_description<double>(1));
  CHECK(vac.valid);
  CHECK(vac.pure);
  CHECK(vac.r_consistent);

  CHECK(validate_description(squeezed_vacuum(1.0)).ok());

  Description below{0.1 * Eigen::MatrixXd::Identity(2, 2), cvec({0.0}), 1.0};
  const auto rep = validate_description(below);
  CHECK_FALSE(rep.valid);
  CHECK(rep.min_eigenvalue < 0);

  Description wrong_r = vacuum_description<double>(1);
  wrong_r.r = 0.5;
  CHECK_FALSE(validate_description(wrong_r).r_consistent);
  CHECK(validate_description(wrong_r).valid);

  Description zero_r = vacuum_description<double>(1);
  zero_r.r = 0;
  CHECK_FALSE(validate_description(zero_r).r_consistent);

  Description mixed{2 * Eigen::MatrixXd::Identity(2, 2), cvec({0.0}), std::sqrt(2.0 / 3)};
  CHECK(validate_description(mixed).valid);
  CHECK_FALSE(validate_description(mixed).pure);

  Description bad_shape{Eigen::MatrixXd::Identity(4, 4), cvec({0.0}), 1.0};
  CHECK_THROWS_AS(validate_description(bad_shape), ValidationError);
}

TEST_CASE("core: gate symplectics") {
  const auto id = gate_symplectic<double>(PhaseShift<double>{0.0, 1}, 1);
  CHECK((id.S - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(id.s.cwiseAbs().maxCoeff() == 0.0);

  const auto sq = gate_symplectic<double>(Squeeze<double>{0.7, 2}, 2);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(4, 4);
  expect(2, 2) = std::exp(-0.7);
  expect(3, 3) = std::exp(0.7);
  CHECK((sq.S - expect).cwiseAbs().maxCoeff() < 1e-15);

  const auto bs = gate_symplectic<double>(Beamsplitter<double>{std::numbers::pi / 2, 1, 2}, 2);
  Eigen::MatrixXd b(4, 4);
  b << 0, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  CHECK((bs.S - b).cwiseAbs().maxCoeff() < 1e-15);

  const auto disp = gate_symplectic<double>(Displacement<double>{cvec({cd(1, -1), 0.5})}, 2);
  CHECK((disp.S - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((disp.s - hat_d<double>(cvec({cd(1, -1), 0.5}))).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto g = random_gate(rng, 2, 2.0);
    CHECK(symplectic_defect(gate_symplectic<double>(g, 2).S) <= 1e-12);
  }
  const auto bs13 = gate_symplectic<double>(Beamsplitter<double>{0.3, 3, 1}, 3);
  CHECK(symplectic_defect(bs13.S) <= 1e-12);
  CHECK(bs13.S(2, 2) == 1.0);
}

TEST_CASE("core: gate validation") {
  CHECK_THROWS_AS(validate_gate<double>(Squeeze<double>{0.0, 1}, 1), ValidationError);
  CHECK_THROWS_AS(validate_gate<double>(Squeeze<double>{std::nan(""), 1}, 1), ValidationError);
  CHECK_THROWS_AS(validate_gate<double>(PhaseShift<double>{0.1, 0}, 1), ValidationError);
  CHECK_THROWS_AS(validate_gate<double>(PhaseShift<double>{0.1, 2}, 1), ValidationError);
  CHECK_THROWS_AS(validate_gate<double>(Beamsplitter<double>{0.1, 1, 1}, 2), ValidationError);
  CHECK_THROWS_AS(validate_gate<double>(Displacement<double>{cvec({1.0})}, 2), ValidationError);
  CHECK_NOTHROW(validate_gate<double>(Squeeze<double>{-0.5, 2}, 2));
}

TEST_CASE("core: energy of Gaussian states") {
  CHECK(energy_of_gaussian<double>(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)) == doctest::Approx(2));
  CHECK(energy_of_gaussian<double>(Eigen::MatrixXd::Identity(2, 2), hat_d<double>(cvec({1.0}))) == doctest::Approx(4));
  const auto s = squeezed_vacuum(1.0);
  CHECK(energy_of_gaussian<double>(s.cov, Eigen::VectorXd::Zero(2)) == doctest::Approx(4.76220).epsilon(1e-6));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto d = random_description(rng, 2, 1.0, 1.0);
    const auto dv = hat_d<double>(d.alpha);
    const double e = energy_of_gaussian<double>(d.cov, dv);
    for (const GateSpec& g : {GateSpec{PhaseShift<double>{1.1, 2}}, GateSpec{Beamsplitter<double>{0.7, 1, 2}}}) {
      const auto a = gate_symplectic<double>(g, 2);
      CHECK(std::abs(energy_of_gaussian<double>(a.S * d.cov * a.S.transpose(), a.S * dv) - e) < 1e-10);
    }
    const double z = 0.8;
    const auto a = gate_symplectic<double>(Squeeze<double>{z, 1}, 2);
    CHECK(energy_of_gaussian<double>(a.S * d.cov * a.S.transpose(), a.S * dv) <= std::exp(2 * z) * e + 1e-10);
  }
}

TEST_CASE("core: coherent and random descriptions") {
  const auto c0 = coherent_description<double>(cvec({0.0}));
  CHECK((c0.cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c0.r == cd(1));
  const auto c = coherent_description<double>(cvec({1.0, cd(0, 1)}));
  CHECK(c.cov.rows() == 4);
  CHECK(c.alpha(1) == cd(0, 1));
  CHECK(validate_description(c).ok());

  const auto flat = random_pure_description<double>(3, 0.0, 9);
  CHECK((flat.cov - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = random_pure_description<double>(1 + seed % 3, 2.0, seed);
    CHECK(validate_description(d, 1e-9).ok());
  }
  const auto a = random_pure_description<double>(2, 1.0, 77), b = random_pure_description<double>(2, 1.0, 77);
  CHECK(a.cov == b.cov);
  CHECK(a.alpha == b.alpha);
  CHECK(a.r == b.r);

  std::mt19937_64 rng(4);
  const auto u = random_unitary<double>(3, rng);
  CHECK(symplectic_defect(unitary_to_symplectic<double>(u)) < 1e-12);
  const auto k = unitary_to_symplectic<double>(u);
  CHECK((k * k.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("core: purity is preserved by gates") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto d = random_description(rng, 2, 2.0, 1.0);
    const auto a = gate_symplectic<double>(random_gate(rng, 2, 1.0), 2);
    const Eigen::MatrixXd g = a.S * d.cov * a.S.transpose();
    const auto w = omega<double>(2);
    CHECK((g * w * g - w).cwiseAbs().maxCoeff() <= 1e-9);
  }
}
