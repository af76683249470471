// SPDX-License-Identifier: Apache-2.0
//
// Non-Gaussian states written as superpositions of Gaussian states.
#pragma once

#include <cmath>

#include "cvgauss/superposition.hpp"

namespace cvgauss {

enum class Parity { Even, Odd };

/// N (|alpha> + |-alpha>) or N (|alpha> - |-alpha>) on one mode.
template <typename Scalar>
GaussianSuperposition<Scalar> cat_state(Complex<Scalar> alpha, Parity parity) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) throw ValidationError("non-finite amplitude", "alpha");
  const Scalar sign = parity == Parity::Even ? Scalar(1) : Scalar(-1);
  const Scalar overlap_sq = std::exp(Scalar(-2) * std::norm(alpha));
  const Scalar norm_sq = Scalar(2) * (Scalar(1) + sign * overlap_sq);
  if (!(norm_sq > 0)) throw ValidationError("odd cat state at alpha = 0 is the zero vector", "alpha");
  const Scalar c = Scalar(1) / std::sqrt(norm_sq);
  CVec<Scalar> a(1);
  a(0) = alpha;
  GaussianSuperposition<Scalar> psi;
  psi.terms.push_back({Complex<Scalar>(c), coherent_description<Scalar>(a)});
  psi.terms.push_back({Complex<Scalar>(sign * c), coherent_description<Scalar>(CVec<Scalar>(-a))});
  return psi;
}

/// Finite comb sum_t w_t D(t step) S(z)|0> with Gaussian envelope
/// w_t = exp(-(t step)^2 / (2 envelope^2)), renormalised.
template <typename Scalar>
GaussianSuperposition<Scalar> gkp_comb(Scalar z, int half_width, Scalar step, Scalar envelope) {
  if (!(z > 0)) throw ValidationError("comb squeezing must be positive", "z");
  if (half_width < 0) throw ValidationError("half width must be non-negative", "m");
  if (!(envelope > 0)) throw ValidationError("envelope width must be positive", "envelope");
  if (!std::isfinite(step)) throw ValidationError("non-finite lattice step", "step");
  const auto peak = apply_squeeze(vacuum_description<Scalar>(1), z, 1);
  GaussianSuperposition<Scalar> psi;
  for (int t = -half_width; t <= half_width; ++t) {
    const Scalar x = Scalar(t) * step;
    CVec<Scalar> shift(1);
    shift(0) = x;
    psi.terms.push_back({Complex<Scalar>(std::exp(-x * x / (Scalar(2) * envelope * envelope))),
                         apply_displacement(peak, shift)});
  }
  return normalized(std::move(psi));
}

/// sqrt(1 - p) |0>|0> + i sqrt(p) |r> S(z)|0>.
template <typename Scalar>
GaussianSuperposition<Scalar> appendix_d_state(Scalar p, Scalar r, Scalar z) {
  if (!(p >= 0 && p <= 1)) throw ValidationError("p must lie in [0, 1]", "p");
  if (!std::isfinite(r) || !std::isfinite(z)) throw ValidationError("non-finite parameter", "r");
  auto branch = vacuum_description<Scalar>(2);
  if (z != Scalar(0)) branch = apply_squeeze(branch, z, 2);
  CVec<Scalar> shift = CVec<Scalar>::Zero(2);
  shift(0) = -r;
  branch = apply_displacement(branch, shift);
  GaussianSuperposition<Scalar> psi;
  psi.terms.push_back({Complex<Scalar>(std::sqrt(Scalar(1) - p)), vacuum_description<Scalar>(2)});
  psi.terms.push_back({Complex<Scalar>(0, std::sqrt(p)), branch});
  return psi;
}

/// Psi (x) |0>^{extra}.
template <typename Scalar>
GaussianSuperposition<Scalar> tensor_vacuum(const GaussianSuperposition<Scalar>& psi, Index extra) {
  if (extra < 0) throw ValidationError("negative mode padding", "modes");
  if (extra == 0) return psi;
  GaussianSuperposition<Scalar> out;
  for (const auto& t : psi.terms) {
    const Index n = t.state.modes();
    GaussianDescription<Scalar> d;
    d.cov = Mat<Scalar>::Identity(2 * (n + extra), 2 * (n + extra));
    d.cov.topLeftCorner(2 * n, 2 * n) = t.state.cov;
    d.alpha = CVec<Scalar>::Zero(n + extra);
    d.alpha.head(n) = t.state.alpha;
    d.r = t.state.r;
    out.terms.push_back({t.coeff, std::move(d)});
  }
  return out;
}

}  // namespace cvgauss
