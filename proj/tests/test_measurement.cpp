// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "support.hpp"

using namespace testing;

namespace {

HeterodyneOutcome<double> at(std::initializer_list<cd> beta) { return {cvec(beta)}; }

/// Trapezoid rule over the square [-h, h]^2 of the complex plane.
template <typename F>
double integrate_plane(F f, double h, int steps) {
  const double dx = 2 * h / steps;
  double sum = 0;
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; j <= steps; ++j) {
      const double w = (i == 0 || i == steps ? 0.5 : 1.0) * (j == 0 || j == steps ? 0.5 : 1.0);
      sum += w * f(cd(-h + i * dx, -h + j * dx));
    }
  return sum * dx * dx;
}

}  // namespace

TEST_CASE("measurement: heterodyne density") {
  const auto vac = vacuum_description<double>(1);
  CHECK(std::abs(heterodyne_density(vac, at({0.0})) - 1 / std::numbers::pi) < 1e-15);
  CHECK(std::abs(heterodyne_density(vac, at({1.0})) - 0.11709) < 1e-5);
  CHECK_THROWS_AS(heterodyne_density(vac, at({0.0, 0.0})), ValidationError);
  CHECK_THROWS_AS(heterodyne_density(vac, HeterodyneOutcome<double>{Eigen::VectorXcd(0)}), ValidationError);

  std::mt19937_64 rng(30);
  for (int t = 0; t < 4; ++t) {
    const auto d = random_description(rng, 1, 0.6, 1.0);
    const double total = integrate_plane([&](cd b) { return heterodyne_density(d, at({b})); }, 6.0, 240);
    CHECK(std::abs(total - 1) < 1e-3);
  }
  for (int t = 0; t < 6; ++t) {
    const auto d = random_description(rng, 2, 0.8, 1.0);
    const auto b = random_cvec(rng, 1, 1.5);
    CHECK(std::abs(heterodyne_density(d, {b}) - fock_heterodyne_density(oracle(d), b)) < 1e-9);
    const auto b2 = random_cvec(rng, 2, 1.5);
    CHECK(std::abs(heterodyne_density(d, {b2}) - fock_heterodyne_density(oracle(d), b2)) < 1e-9);
  }
}

TEST_CASE("measurement: post-measurement descriptions") {
  const auto r = postmeasure(vacuum_description<double>(2), at({0.0}));
  CHECK((r.state.cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(r.state.alpha.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(r.state.r - 1.0) < 1e-12);
  CHECK(std::abs(r.density - 1 / std::numbers::pi) < 1e-15);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 8; ++t) {
    // squeezed then beamsplit
    auto d = vacuum_description<double>(2);
    d = apply_squeeze(d, 0.7, 1);
    d = apply_squeeze(d, -0.4, 2);
    d = apply_displacement(d, random_cvec(rng, 2, 1.0));
    d = apply_beamsplitter(d, 0.3 + 0.5 * t, 1, 2);
    const auto beta = random_cvec(rng, 1, 1.2);
    const auto pm = postmeasure(d, {beta});
    CHECK(validate_description(pm.state, 1e-7).ok());
    CHECK((pm.state.cov.topLeftCorner(2, 2) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pm.state.cov.topRightCorner(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(pm.state.alpha(0) - beta(0)) < 1e-12);

    const auto v = oracle(d);
    const auto fp = fock_project(v, beta);
    CHECK(std::abs(fp.density - pm.density) < 1e-9);
    // the oracle projection keeps the global phase of Pi_beta psi, which is what the description tracks
    CHECK(std::abs(fock_overlap(oracle(pm.state, v.cutoff), fp.state) - 1.0) < 1e-6);
    CHECK(std::abs(overlap(d, pm.state) - std::sqrt(std::numbers::pi * pm.density)) < 1e-8);
  }
}

TEST_CASE("measurement: product inputs and idempotence") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_description(rng, 1, 0.8, 1.0);
    const auto b = random_description(rng, 1, 0.8, 1.0);
    Description prod{Eigen::MatrixXd::Zero(4, 4), cvec({a.alpha(0), b.alpha(0)}), a.r * b.r};
    prod.cov.topLeftCorner(2, 2) = a.cov;
    prod.cov.bottomRightCorner(2, 2) = b.cov;
    const auto beta = random_cvec(rng, 1, 1.0);
    const auto pm = postmeasure(prod, {beta});
    CHECK(std::abs(pm.density - heterodyne_density(a, {beta})) < 1e-9);
    CHECK((pm.state.cov.bottomRightCorner(2, 2) - b.cov).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(pm.state.alpha(1) - b.alpha(0)) < 1e-9);

    const auto again = postmeasure(pm.state, {beta});
    CHECK(std::abs(again.density - 1 / std::numbers::pi) < 1e-9);
    CHECK((again.state.cov - pm.state.cov).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((again.state.alpha - pm.state.alpha).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(again.state.r - pm.state.r) < 1e-9);
  }
}

TEST_CASE("measurement: density floor") {
  const auto far = coherent_description<double>(cvec({40.0}));
  CHECK_THROWS_AS(postmeasure(far, at({0.0})), NumericError);
}
