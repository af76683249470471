// SPDX-License-Identifier: Apache-2.0
//
// Description updates under the generating Gaussian unitaries.
#pragma once

#include <array>
#include <cmath>

#include "cvgauss/overlaps.hpp"

namespace cvgauss {

namespace detail {

/// Gamma <- B Gamma B^T where B acts on the phase-space coordinates idx.
template <typename Scalar, int K>
void conjugate_local(Mat<Scalar>& cov, const Eigen::Matrix<Scalar, K, K>& b, const std::array<Index, K>& idx) {
  Mat<Scalar> rows(K, cov.cols());
  for (int a = 0; a < K; ++a) rows.row(a) = cov.row(idx[a]);
  rows = (b * rows).eval();
  for (int a = 0; a < K; ++a) cov.row(idx[a]) = rows.row(a);
  Mat<Scalar> cols(cov.rows(), K);
  for (int a = 0; a < K; ++a) cols.col(a) = cov.col(idx[a]);
  cols = (cols * b.transpose()).eval();
  for (int a = 0; a < K; ++a) cov.col(idx[a]) = cols.col(a);
}

}  // namespace detail

/// Description of D(beta) psi, with D(beta) = exp(i hat_d(beta)^T Omega R).
/// D(beta)|alpha> = exp(i Im(alpha^T conj(beta))) |alpha - beta>, and that
/// phase is moved into r so that the label stays a plain coherent label.
template <typename Scalar>
GaussianDescription<Scalar> apply_displacement(const GaussianDescription<Scalar>& d, const CVec<Scalar>& beta) {
  validate_gate<Scalar>(Displacement<Scalar>{beta}, d.modes());
  GaussianDescription<Scalar> out = d;
  const Scalar theta = (d.alpha.transpose() * beta.conjugate())(0).imag();
  out.alpha = d.alpha - beta;
  out.r = std::polar(Scalar(1), theta) * d.r;
  return out;
}

/// F_j(phi) = exp(-i phi a_j^dagger a_j).
template <typename Scalar>
GaussianDescription<Scalar> apply_phaseshift(const GaussianDescription<Scalar>& d, Scalar phi, int mode) {
  validate_gate<Scalar>(PhaseShift<Scalar>{phi, mode}, d.modes());
  const Index j = mode_index(mode, d.modes());
  const Scalar c = std::cos(phi), s = std::sin(phi);
  Eigen::Matrix<Scalar, 2, 2> b;
  b << c, s, -s, c;
  GaussianDescription<Scalar> out = d;
  detail::conjugate_local<Scalar, 2>(out.cov, b, {2 * j, 2 * j + 1});
  out.alpha(j) = std::polar(Scalar(1), -phi) * d.alpha(j);
  return out;
}

/// B_jk(omega) = exp(-i omega (Q_j Q_k + P_j P_k)).
template <typename Scalar>
GaussianDescription<Scalar> apply_beamsplitter(const GaussianDescription<Scalar>& d, Scalar omega_, int mode_j,
                                               int mode_k) {
  validate_gate<Scalar>(Beamsplitter<Scalar>{omega_, mode_j, mode_k}, d.modes());
  const Index j = mode_index(mode_j, d.modes()), k = mode_index(mode_k, d.modes());
  const Scalar c = std::cos(omega_), s = std::sin(omega_);
  Eigen::Matrix<Scalar, 4, 4> b;
  b << c, 0, 0, s,
       0, c, -s, 0,
       0, s, c, 0,
       -s, 0, 0, c;
  GaussianDescription<Scalar> out = d;
  detail::conjugate_local<Scalar, 4>(out.cov, b, {2 * j, 2 * j + 1, 2 * k, 2 * k + 1});
  const Complex<Scalar> is(0, s);
  out.alpha(j) = c * d.alpha(j) - is * d.alpha(k);
  out.alpha(k) = -is * d.alpha(j) + c * d.alpha(k);
  out.cov = (out.cov + out.cov.transpose()).eval() / Scalar(2);
  return out;
}

/// S_j(z) = exp(z/2 (a_j^2 - a_j^dagger^2)); r is recovered from the triple
/// (S|alpha>, |alpha'>, S psi) where <S alpha, alpha'> = 1/sqrt(cosh z).
template <typename Scalar>
GaussianDescription<Scalar> apply_squeeze(const GaussianDescription<Scalar>& d, Scalar z, int mode) {
  validate_gate<Scalar>(Squeeze<Scalar>{z, mode}, d.modes());
  const Index n = d.modes();
  const Index j = mode_index(mode, n);
  Eigen::Matrix<Scalar, 2, 2> b;
  b << std::exp(-z), 0, 0, std::exp(z);

  GaussianDescription<Scalar> out = d;
  detail::conjugate_local<Scalar, 2>(out.cov, b, {2 * j, 2 * j + 1});
  out.alpha(j) = d.alpha(j) * std::cosh(z) - std::conj(d.alpha(j)) * std::sinh(z);

  Mat<Scalar> squeezed_coherent = Mat<Scalar>::Identity(2 * n, 2 * n);
  squeezed_coherent(2 * j, 2 * j) = std::exp(-2 * z);
  squeezed_coherent(2 * j + 1, 2 * j + 1) = std::exp(2 * z);
  const Vec<Scalar> dp = hat_d<Scalar>(out.alpha);
  out.r = overlaptriple<Scalar>(squeezed_coherent, dp, Mat<Scalar>::Identity(2 * n, 2 * n), dp, out.cov, dp,
                                std::conj(d.r), Complex<Scalar>(Scalar(1) / std::sqrt(std::cosh(z))),
                                CVec<Scalar>::Zero(n));
  return out;
}

template <typename Scalar>
GaussianDescription<Scalar> apply_unitary(const GaussianDescription<Scalar>& d, const Gate<Scalar>& g) {
  return std::visit(
      [&](const auto& gate) {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<Scalar>>)
          return apply_displacement(d, gate.alpha);
        else if constexpr (std::is_same_v<G, PhaseShift<Scalar>>)
          return apply_phaseshift(d, gate.phi, gate.mode);
        else if constexpr (std::is_same_v<G, Beamsplitter<Scalar>>)
          return apply_beamsplitter(d, gate.omega, gate.mode_j, gate.mode_k);
        else
          return apply_squeeze(d, gate.z, gate.mode);
      },
      g);
}

}  // namespace cvgauss
