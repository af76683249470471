// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "cvgauss/circuit.hpp"
#include "cvgauss/fock.hpp"

namespace testing {

using namespace cvgauss;
using cd = std::complex<double>;

inline Eigen::VectorXcd cvec(std::initializer_list<cd> xs) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (cd x : xs) v(j++) = x;
  return v;
}

inline Eigen::VectorXcd random_cvec(std::mt19937_64& rng, Eigen::Index n, double radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u;
  Eigen::VectorXd x(2 * n);
  for (Eigen::Index j = 0; j < 2 * n; ++j) x(j) = g(rng);
  x *= radius * std::pow(u(rng), 1.0 / double(2 * n)) / x.norm();
  Eigen::VectorXcd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v(j) = cd(x(2 * j), x(2 * j + 1));
  return v;
}

/// Random description with an arbitrary phase on r.
inline Description random_description(std::mt19937_64& rng, Eigen::Index n, double z_max, double alpha_max) {
  auto d = random_pure_description<double>(n, z_max, rng(), alpha_max);
  d.r *= std::polar(1.0, std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(rng));
  return d;
}

inline GateSpec random_gate(std::mt19937_64& rng, int n, double z_max = 1.0, double alpha_max = 1.0) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> mode(1, n);
  const int kinds = n > 1 ? 4 : 3;
  switch (std::uniform_int_distribution<int>(0, kinds - 1)(rng)) {
    case 0:
      return Displacement<double>{random_cvec(rng, n, alpha_max)};
    case 1:
      return PhaseShift<double>{2 * std::numbers::pi * u(rng), mode(rng)};
    case 2: {
      double z = z_max * (2 * u(rng) - 1);
      if (z == 0) z = 0.1;
      return Squeeze<double>{z, mode(rng)};
    }
    default:
      return Beamsplitter<double>{2 * std::numbers::pi * u(rng), 1, 2};
  }
}

inline FockVector oracle(const Description& d, int cutoff = 0) {
  FockOptions o;
  o.cutoff = cutoff;
  return fock_from_description(d, o);
}

}  // namespace testing
