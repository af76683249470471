// SPDX-License-Identifier: Apache-2.0
//
// Phase-exact inner products between pure Gaussian states.
#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "cvgauss/core.hpp"

namespace cvgauss {

/// Smallest |u|, |v| accepted when dividing a triple product.
inline constexpr double kPhaseReferenceFloor = 1e-12;

template <typename Scalar>
Complex<Scalar> coherent_overlap(const CVec<Scalar>& a1, const CVec<Scalar>& a2) {
  return std::exp(-a1.squaredNorm() / Scalar(2) - a2.squaredNorm() / Scalar(2) + a1.dot(a2));
}

/// |<psi1, psi2>|^2 for pure states, or tr(rho1 rho2) in general.
template <typename Scalar>
Scalar pair_fidelity(const Mat<Scalar>& g1, const Vec<Scalar>& d1, const Mat<Scalar>& g2,
                     const Vec<Scalar>& d2) {
  const Mat<Scalar> sum = g1 + g2;
  Eigen::LLT<Mat<Scalar>> llt(sum);
  if (llt.info() != Eigen::Success) throw NumericError("pair_fidelity: Gamma1 + Gamma2 is not positive definite");
  const Vec<Scalar> diff = d2 - d1;
  const Scalar q = diff.dot(llt.solve(diff));
  const Mat<Scalar> half = sum / Scalar(2);
  return std::exp(-q) / std::sqrt(half.determinant());
}

template <typename Scalar>
struct BranchedSqrtDet {
  Complex<Scalar> value;
  int steps = 0;
};

/// sqrt(det(A + iB)) continued along the path A + i t B, t in [0, 1].
template <typename Scalar>
BranchedSqrtDet<Scalar> branched_sqrt_det(const CMat<Scalar>& m) {
  using C = Complex<Scalar>;
  const Mat<Scalar> a = m.real();
  const Mat<Scalar> b = m.imag();
  const Scalar det_a = a.determinant();
  if (!(std::abs(det_a) > Scalar(0)) || !std::isfinite(det_a))
    throw NumericError("branched_sqrt_det: real part is singular");

  BranchedSqrtDet<Scalar> out;
  Scalar log_mag = std::log(std::abs(det_a));
  Scalar phase = det_a < 0 ? std::numbers::pi_v<Scalar> : Scalar(0);
  if (b.cwiseAbs().maxCoeff() == Scalar(0)) {
    out.value = std::polar(std::exp(log_mag / 2), phase / 2);
    return out;
  }

  const Scalar min_step = std::ldexp(Scalar(1), -20);
  const Scalar max_increment = std::numbers::pi_v<Scalar> / 2;
  Scalar t = 0;
  Scalar h = Scalar(1) / 16;
  C det_prev = det_a;
  CMat<Scalar> mt(m.rows(), m.cols());
  while (t < Scalar(1)) {
    const Scalar t_next = std::min(Scalar(1), t + h);
    mt = a.template cast<C>() + C(0, t_next) * b.template cast<C>();
    const C det_next = mt.partialPivLu().determinant();
    if (det_next == C(0)) throw NumericError("branched_sqrt_det: singular point on the path");
    const C ratio = det_next / det_prev;
    if (std::abs(std::arg(ratio)) > max_increment) {
      h /= 2;
      if (h < min_step) throw NumericError("branched_sqrt_det: path refinement did not converge");
      continue;
    }
    log_mag += std::log(std::abs(ratio));
    phase += std::arg(ratio);
    det_prev = det_next;
    t = t_next;
    ++out.steps;
    h = std::min(Scalar(2) * h, Scalar(1) / 4);
  }
  out.value = std::polar(std::exp(log_mag / 2), phase / 2);
  return out;
}

/// Intermediate matrices of the triple-overlap formula.
template <typename Scalar>
struct TripleOverlapWorkspace {
  CMat<Scalar> gamma4, gamma5;
  CMat<Scalar> w1, w2, w3, w4, w5;
  Vec<Scalar> d1p, d2p;
  Complex<Scalar> sqrt_det_23, sqrt_det_14;
};

template <typename Scalar>
TripleOverlapWorkspace<Scalar> make_triple_workspace(const Mat<Scalar>& g1, const Vec<Scalar>& d1,
                                                     const Mat<Scalar>& g2, const Vec<Scalar>& d2,
                                                     const Mat<Scalar>& g3, const Vec<Scalar>& d3) {
  using C = Complex<Scalar>;
  const Index dim = g1.rows();
  const CMat<Scalar> iw = C(0, 1) * omega<Scalar>(dim / 2).template cast<C>();
  const CMat<Scalar> eye = CMat<Scalar>::Identity(dim, dim);
  const CMat<Scalar> g1c = g1.template cast<C>();
  const CMat<Scalar> g3c = g3.template cast<C>();

  const Mat<Scalar> g23 = g2 + g3;
  Eigen::LLT<Mat<Scalar>> llt23(g23);
  if (llt23.info() != Eigen::Success) throw NumericError("triple overlap: Gamma2 + Gamma3 is not positive definite");
  const CMat<Scalar> g23_inv = llt23.solve(Mat<Scalar>::Identity(dim, dim)).template cast<C>();

  TripleOverlapWorkspace<Scalar> ws;
  ws.gamma4 = g3c - (g3c + iw) * g23_inv * (g3c - iw);
  const CMat<Scalar> g14 = g1c + ws.gamma4;
  Eigen::PartialPivLU<CMat<Scalar>> lu14(g14);
  if (!(std::abs(lu14.determinant()) > Scalar(0))) throw NumericError("triple overlap: Gamma1 + Gamma4 is singular");

  ws.gamma5 = g1c / Scalar(4) - (g1c - iw) * lu14.solve(g1c + iw) / Scalar(4);
  ws.w1 = lu14.solve(eye);
  const CMat<Scalar> y = lu14.solve((g3c + iw) * g23_inv);
  ws.w2 = g23_inv + g23_inv * (g3c - iw) * y;
  ws.w3 = Scalar(2) * y;
  ws.w4 = eye - (g1c - iw) * ws.w1;
  ws.w5 = (g1c - iw) * y;
  ws.d1p = d1 - d3;
  ws.d2p = d2 - d3;
  const Mat<Scalar> half23 = g23 / Scalar(2);
  ws.sqrt_det_23 = std::sqrt(half23.determinant());
  ws.sqrt_det_14 = branched_sqrt_det<Scalar>(g14 / Scalar(2)).value;
  return ws;
}

/// <psi3, D(alpha) psi1> <psi1, psi2> <psi2, psi3> for pure Gaussian states
/// with covariances gj and displacements dj, where D(alpha) = exp(i hat_d(alpha)^T Omega R).
template <typename Scalar>
Complex<Scalar> triple_overlap_product(const Mat<Scalar>& g1, const Vec<Scalar>& d1, const Mat<Scalar>& g2,
                                       const Vec<Scalar>& d2, const Mat<Scalar>& g3, const Vec<Scalar>& d3,
                                       const CVec<Scalar>& alpha) {
  using C = Complex<Scalar>;
  const auto ws = make_triple_workspace(g1, d1, g2, d2, g3, d3);
  const CVec<Scalar> e1 = ws.d1p.template cast<C>();
  const CVec<Scalar> e2 = ws.d2p.template cast<C>();
  const CVec<Scalar> u = omega_times(hat_d<Scalar>(alpha)).template cast<C>();

  C exponent = -(e1.transpose() * ws.w1 * e1)(0) - (e2.transpose() * ws.w2 * e2)(0) +
               (e1.transpose() * ws.w3 * e2)(0) - (u.transpose() * ws.gamma5 * u)(0);
  const CVec<Scalar> lin = ws.w4 * e1 + ws.w5 * e2 + d3.template cast<C>();
  exponent -= C(0, 1) * (u.transpose() * lin)(0);
  return std::exp(exponent) / (ws.sqrt_det_23 * ws.sqrt_det_14);
}

/// Recovers <psi2, psi3> from u = <psi3, D(lambda) psi1> and v = <psi1, psi2>.
template <typename Scalar>
Complex<Scalar> overlaptriple(const Mat<Scalar>& g1, const Vec<Scalar>& d1, const Mat<Scalar>& g2,
                              const Vec<Scalar>& d2, const Mat<Scalar>& g3, const Vec<Scalar>& d3,
                              Complex<Scalar> u, Complex<Scalar> v, const CVec<Scalar>& lambda) {
  if (std::abs(u) < Scalar(kPhaseReferenceFloor) || std::abs(v) < Scalar(kPhaseReferenceFloor))
    throw NumericError("overlaptriple: reference overlap below floor");
  return triple_overlap_product(g1, d1, g2, d2, g3, d3, lambda) / (u * v);
}

template <typename Scalar>
void require_same_modes(const GaussianDescription<Scalar>& a, const GaussianDescription<Scalar>& b) {
  check_shapes(a);
  check_shapes(b);
  if (a.modes() != b.modes()) throw ValidationError("descriptions have different mode counts", "modes");
}

/// <psi(a), psi(b)>.
template <typename Scalar>
Complex<Scalar> overlap(const GaussianDescription<Scalar>& a, const GaussianDescription<Scalar>& b) {
  require_same_modes(a, b);
  const Index n = a.modes();
  const Vec<Scalar> da = hat_d<Scalar>(a.alpha);
  const Vec<Scalar> db = hat_d<Scalar>(b.alpha);
  const CVec<Scalar> lambda = a.alpha - b.alpha;
  const Scalar theta = (a.alpha.transpose() * b.alpha.conjugate())(0).imag();
  const Complex<Scalar> u = std::polar(Scalar(1), -theta) * std::conj(b.r);
  return overlaptriple<Scalar>(Mat<Scalar>::Identity(2 * n, 2 * n), da, a.cov, da, b.cov, db, u, a.r, lambda);
}

/// The function xi -> <psi(k), D(hat_d^{-1}(xi)) psi(l)> written as
/// value * exp(-xi^T quad xi - i xi^T lin). Its derivatives at xi = 0 give the
/// mixed moments <psi(k), R psi(l)> and <psi(k), {R_a, R_b} psi(l)>.
template <typename Scalar>
struct CrossCharacteristic {
  Complex<Scalar> value;
  CMat<Scalar> quad;
  CVec<Scalar> lin;
};

template <typename Scalar>
CrossCharacteristic<Scalar> cross_characteristic(const GaussianDescription<Scalar>& k,
                                                 const GaussianDescription<Scalar>& l) {
  using C = Complex<Scalar>;
  require_same_modes(k, l);
  const Vec<Scalar> dk = hat_d<Scalar>(k.alpha);
  const Vec<Scalar> dl = hat_d<Scalar>(l.alpha);
  const auto ws = make_triple_workspace(l.cov, dl, l.cov, dl, k.cov, dk);
  const Mat<Scalar> w = omega<Scalar>(k.modes());
  const CMat<Scalar> wc = w.template cast<C>();

  CrossCharacteristic<Scalar> out;
  out.value = overlap(k, l);
  CMat<Scalar> q = wc.transpose() * ws.gamma5 * wc;
  out.quad = (q + q.transpose()) / Scalar(2);
  const CVec<Scalar> e1 = ws.d1p.template cast<C>();
  out.lin = wc.transpose() * (ws.w4 * e1 + ws.w5 * e1 + dk.template cast<C>());
  return out;
}

template <typename Scalar>
struct CrossMoments {
  Complex<Scalar> overlap;
  CVec<Scalar> first;   ///< <psi(k), R psi(l)>
  CMat<Scalar> second;  ///< <psi(k), (R_a R_b + R_b R_a)/2 psi(l)>
};

template <typename Scalar>
CrossMoments<Scalar> cross_moments(const GaussianDescription<Scalar>& k, const GaussianDescription<Scalar>& l) {
  using C = Complex<Scalar>;
  const auto f = cross_characteristic(k, l);
  const CMat<Scalar> wc = omega<Scalar>(k.modes()).template cast<C>();
  // With m = Omega R, f(xi) = <exp(i xi^T m)>, so <m> = i grad f and
  // <sym(m m^T)> = -hess f, both evaluated at zero.
  const CVec<Scalar> m1 = -f.value * f.lin;
  const CMat<Scalar> m2 = f.value * (f.lin * f.lin.transpose() + Scalar(2) * f.quad);
  CrossMoments<Scalar> out;
  out.overlap = f.value;
  out.first = wc.transpose() * m1;
  out.second = wc.transpose() * m2 * wc;
  return out;
}

}  // namespace cvgauss
