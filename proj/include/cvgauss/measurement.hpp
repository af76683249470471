// SPDX-License-Identifier: Apache-2.0
//
// Heterodyne measurement of the leading k modes of a Gaussian state.
#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "cvgauss/overlaps.hpp"

namespace cvgauss {

/// Outcome densities below this are treated as numerically zero.
inline constexpr double kDensityFloor = 1e-280;

template <typename Scalar>
struct HeterodyneOutcome {
  CVec<Scalar> beta;  ///< outcome for modes 1..k

  Index k() const { return beta.size(); }
};

template <typename Scalar>
void validate_outcome(const HeterodyneOutcome<Scalar>& out, Index n) {
  if (out.k() < 1 || out.k() > n)
    throw ValidationError("measured mode count " + std::to_string(out.k()) + " outside [1, " + std::to_string(n) + "]",
                          "k");
  if (!out.beta.allFinite()) throw ValidationError("non-finite outcome", "beta");
}

/// Density of outcome beta with respect to Lebesgue measure on C^k.
template <typename Scalar>
Scalar heterodyne_density(const GaussianDescription<Scalar>& d, const HeterodyneOutcome<Scalar>& out) {
  check_shapes(d);
  validate_outcome(out, d.modes());
  const Index k = out.k();
  const Mat<Scalar> ga = d.cov.topLeftCorner(2 * k, 2 * k) + Mat<Scalar>::Identity(2 * k, 2 * k);
  Eigen::LLT<Mat<Scalar>> llt(ga);
  if (llt.info() != Eigen::Success) throw NumericError("heterodyne_density: Gamma_A + I is not positive definite");
  const Vec<Scalar> diff = hat_d<Scalar>(out.beta) - hat_d<Scalar>(d.alpha).head(2 * k);
  const Mat<Scalar> half = ga / Scalar(2);
  return std::exp(-diff.dot(llt.solve(diff))) /
         (std::pow(std::numbers::pi_v<Scalar>, Scalar(k)) * std::sqrt(half.determinant()));
}

template <typename Scalar>
struct PostMeasurement {
  GaussianDescription<Scalar> state;
  Scalar density;
};

/// Description of (|beta><beta| (x) I) psi normalised, together with the outcome density.
template <typename Scalar>
PostMeasurement<Scalar> postmeasure(const GaussianDescription<Scalar>& d, const HeterodyneOutcome<Scalar>& out) {
  const Scalar p = heterodyne_density(d, out);
  if (!(p > Scalar(kDensityFloor))) throw NumericError("postmeasure: outcome density below floor");
  const Index n = d.modes(), k = out.k(), m = n - k;

  const Mat<Scalar> ga = d.cov.topLeftCorner(2 * k, 2 * k) + Mat<Scalar>::Identity(2 * k, 2 * k);
  Eigen::LLT<Mat<Scalar>> llt(ga);
  const Vec<Scalar> s = hat_d<Scalar>(d.alpha);
  const Vec<Scalar> db = hat_d<Scalar>(out.beta);

  Mat<Scalar> cov = Mat<Scalar>::Identity(2 * n, 2 * n);
  Vec<Scalar> sp(2 * n);
  sp.head(2 * k) = db;
  if (m > 0) {
    const Mat<Scalar> gab = d.cov.topRightCorner(2 * k, 2 * m);
    const Mat<Scalar> x = llt.solve(gab);
    Mat<Scalar> gb = d.cov.bottomRightCorner(2 * m, 2 * m) - gab.transpose() * x;
    cov.bottomRightCorner(2 * m, 2 * m) = (gb + gb.transpose()) / Scalar(2);
    sp.tail(2 * m) = s.tail(2 * m) + x.transpose() * (db - s.head(2 * k));
  }

  GaussianDescription<Scalar> post{cov, hat_d_inv(sp), Complex<Scalar>(1)};
  const CVec<Scalar> lambda = d.alpha - post.alpha;
  const Scalar theta = (post.alpha.transpose() * d.alpha.conjugate())(0).imag();
  const Complex<Scalar> u = std::polar(Scalar(1), theta) * d.r;
  const Complex<Scalar> v(std::sqrt(std::pow(std::numbers::pi_v<Scalar>, Scalar(k)) * p));
  // v is exact and bounded below through the density floor, so the reference floor does not apply
  post.r = std::conj(triple_overlap_product<Scalar>(d.cov, s, cov, sp, Mat<Scalar>::Identity(2 * n, 2 * n), sp, lambda) /
                     (u * v));
  return {std::move(post), p};
}

}  // namespace cvgauss
