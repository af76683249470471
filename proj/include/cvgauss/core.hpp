// SPDX-License-Identifier: Apache-2.0
//
// Phase-space conventions for n bosonic modes.
//
// Quadratures are ordered (Q1, P1, ..., Qn, Pn). The vacuum has covariance
// matrix I, and a coherent state |alpha> has displacement hat_d(alpha).
// A pure Gaussian state is carried as a description (Gamma, alpha, r) where
// alpha is the coherent label with the same displacement and r = <alpha, psi>
// fixes the global phase.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include <Eigen/Eigenvalues>

#include "cvgauss/common.hpp"

namespace cvgauss {

template <typename Scalar>
struct GaussianDescription {
  Mat<Scalar> cov;
  CVec<Scalar> alpha;
  Complex<Scalar> r{1};

  Index modes() const { return alpha.size(); }
};

using Description = GaussianDescription<double>;

/// Block-diagonal symplectic form with n copies of [[0, 1], [-1, 0]].
template <typename Scalar = double>
Mat<Scalar> omega(Index n) {
  Mat<Scalar> w = Mat<Scalar>::Zero(2 * n, 2 * n);
  for (Index j = 0; j < n; ++j) {
    w(2 * j, 2 * j + 1) = Scalar(1);
    w(2 * j + 1, 2 * j) = Scalar(-1);
  }
  return w;
}

/// Multiply by the symplectic form without materialising it.
template <typename Derived>
auto omega_times(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  Eigen::Matrix<S, Eigen::Dynamic, Derived::ColsAtCompileTime> y(x.rows(), x.cols());
  for (Index j = 0; j + 1 < x.rows(); j += 2) {
    y.row(j) = x.row(j + 1);
    y.row(j + 1) = -x.row(j);
  }
  return y;
}

template <typename Scalar>
Vec<Scalar> hat_d(const CVec<Scalar>& alpha) {
  const Scalar s = std::sqrt(Scalar(2));
  Vec<Scalar> d(2 * alpha.size());
  for (Index j = 0; j < alpha.size(); ++j) {
    d(2 * j) = s * alpha(j).real();
    d(2 * j + 1) = s * alpha(j).imag();
  }
  return d;
}

template <typename Derived>
auto hat_d_inv(const Eigen::MatrixBase<Derived>& d) {
  using Scalar = typename Derived::Scalar;
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  CVec<Scalar> alpha(d.size() / 2);
  for (Index j = 0; j < alpha.size(); ++j)
    alpha(j) = Complex<Scalar>(s * d(2 * j), s * d(2 * j + 1));
  return alpha;
}

/// Expected |r|^2 of a description: 2^n / sqrt(det(I + Gamma)).
template <typename Scalar>
Scalar reference_weight(const Mat<Scalar>& cov) {
  const Index n = cov.rows() / 2;
  const Mat<Scalar> m = (Mat<Scalar>::Identity(2 * n, 2 * n) + cov) / Scalar(2);
  return Scalar(1) / std::sqrt(m.determinant());
}

struct ValidityReport {
  bool valid = false;
  bool pure = false;
  bool r_consistent = false;
  double min_eigenvalue = 0;
  double purity_defect = 0;
  double r_defect = 0;

  bool ok() const { return valid && pure && r_consistent; }
};

template <typename Scalar>
void check_shapes(const GaussianDescription<Scalar>& d) {
  const Index n = d.alpha.size();
  if (n < 1) throw ValidationError("description has no modes", "alpha");
  if (d.cov.rows() != 2 * n || d.cov.cols() != 2 * n)
    throw ValidationError("covariance matrix must be " + std::to_string(2 * n) + "x" +
                              std::to_string(2 * n),
                          "cov");
}

template <typename Scalar>
ValidityReport validate_description(const GaussianDescription<Scalar>& d, Scalar tol = Scalar(1e-8)) {
  check_shapes(d);
  const Index n = d.modes();
  const Mat<Scalar> w = omega<Scalar>(n);
  ValidityReport rep;

  CMat<Scalar> h = d.cov.template cast<Complex<Scalar>>();
  h += Complex<Scalar>(0, 1) * w.template cast<Complex<Scalar>>();
  Eigen::SelfAdjointEigenSolver<CMat<Scalar>> es(h, Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
  rep.valid = d.cov.allFinite() && (d.cov - d.cov.transpose()).cwiseAbs().maxCoeff() <= tol &&
              rep.min_eigenvalue >= -tol;

  rep.purity_defect = static_cast<double>((d.cov * w * d.cov - w).cwiseAbs().maxCoeff());
  rep.pure = rep.purity_defect <= tol;

  rep.r_defect = static_cast<double>(std::abs(std::norm(d.r) - reference_weight(d.cov)));
  rep.r_consistent = std::isfinite(rep.r_defect) && rep.r_defect <= tol && d.r != Complex<Scalar>(0);
  return rep;
}

// ---------------------------------------------------------------------------
// Gates

template <typename Scalar>
struct Displacement {
  CVec<Scalar> alpha;
};

template <typename Scalar>
struct PhaseShift {
  Scalar phi;
  int mode;
};

template <typename Scalar>
struct Beamsplitter {
  Scalar omega;
  int mode_j;
  int mode_k;
};

template <typename Scalar>
struct Squeeze {
  Scalar z;
  int mode;
};

/// Gate with 1-based mode indices.
template <typename Scalar>
using Gate = std::variant<Displacement<Scalar>, PhaseShift<Scalar>, Beamsplitter<Scalar>, Squeeze<Scalar>>;

using GateSpec = Gate<double>;

/// Converts a 1-based mode index into the 0-based mode offset.
inline Index mode_index(int mode, Index n, const std::string& field = "mode") {
  if (mode < 1 || mode > n)
    throw ValidationError("mode index " + std::to_string(mode) + " outside [1, " + std::to_string(n) + "]",
                          field);
  return mode - 1;
}

template <typename Scalar>
void validate_gate(const Gate<Scalar>& g, Index n) {
  std::visit(
      [n](const auto& gate) {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<Scalar>>) {
          if (gate.alpha.size() != n)
            throw ValidationError("displacement needs " + std::to_string(n) + " amplitudes", "alpha");
          if (!gate.alpha.allFinite()) throw ValidationError("non-finite displacement", "alpha");
        } else if constexpr (std::is_same_v<G, PhaseShift<Scalar>>) {
          mode_index(gate.mode, n);
          if (!std::isfinite(gate.phi)) throw ValidationError("non-finite phase", "phi");
        } else if constexpr (std::is_same_v<G, Beamsplitter<Scalar>>) {
          mode_index(gate.mode_j, n, "modes");
          mode_index(gate.mode_k, n, "modes");
          if (gate.mode_j == gate.mode_k) throw ValidationError("beamsplitter modes must differ", "modes");
          if (!std::isfinite(gate.omega)) throw ValidationError("non-finite angle", "omega");
        } else {
          mode_index(gate.mode, n);
          if (!std::isfinite(gate.z)) throw ValidationError("non-finite squeezing", "z");
          if (gate.z == Scalar(0)) throw ValidationError("squeezing z = 0 is degenerate", "z");
        }
      },
      g);
}

template <typename Scalar>
struct AffineSymplectic {
  Mat<Scalar> S;
  Vec<Scalar> s;
};

/// Table data (S, s) of a gate on n modes. Moments of the output state are
/// Gamma' = S Gamma S^T and d' = S d for the passive gates and squeezing;
/// a displacement D(beta) with s = hat_d(beta) moves the state to d - s.
template <typename Scalar>
AffineSymplectic<Scalar> gate_symplectic(const Gate<Scalar>& g, Index n) {
  validate_gate(g, n);
  AffineSymplectic<Scalar> out{Mat<Scalar>::Identity(2 * n, 2 * n), Vec<Scalar>::Zero(2 * n)};
  std::visit(
      [&](const auto& gate) {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<Scalar>>) {
          out.s = hat_d<Scalar>(gate.alpha);
        } else if constexpr (std::is_same_v<G, PhaseShift<Scalar>>) {
          const Index j = 2 * mode_index(gate.mode, n);
          const Scalar c = std::cos(gate.phi), s = std::sin(gate.phi);
          out.S(j, j) = c;
          out.S(j, j + 1) = s;
          out.S(j + 1, j) = -s;
          out.S(j + 1, j + 1) = c;
        } else if constexpr (std::is_same_v<G, Beamsplitter<Scalar>>) {
          const Index j = 2 * mode_index(gate.mode_j, n), k = 2 * mode_index(gate.mode_k, n);
          const Scalar c = std::cos(gate.omega), s = std::sin(gate.omega);
          out.S(j, j) = c;
          out.S(j, k + 1) = s;
          out.S(j + 1, j + 1) = c;
          out.S(j + 1, k) = -s;
          out.S(k, j + 1) = s;
          out.S(k, k) = c;
          out.S(k + 1, j) = -s;
          out.S(k + 1, k + 1) = c;
        } else {
          const Index j = 2 * mode_index(gate.mode, n);
          out.S(j, j) = std::exp(-gate.z);
          out.S(j + 1, j + 1) = std::exp(gate.z);
        }
      },
      g);
  return out;
}

/// <H> for H = sum_j (Q_j^2 + P_j^2 + 1).
template <typename Scalar>
Scalar energy_of_gaussian(const Mat<Scalar>& cov, const Vec<Scalar>& d) {
  return cov.trace() / Scalar(2) + d.squaredNorm() + Scalar(cov.rows() / 2);
}

template <typename Scalar>
GaussianDescription<Scalar> coherent_description(const CVec<Scalar>& alpha) {
  const Index n = alpha.size();
  return {Mat<Scalar>::Identity(2 * n, 2 * n), alpha, Complex<Scalar>(1)};
}

template <typename Scalar = double>
GaussianDescription<Scalar> vacuum_description(Index n) {
  return coherent_description<Scalar>(CVec<Scalar>::Zero(n));
}

/// Real 2n x 2n representation of an n x n unitary acting on coherent labels.
template <typename Scalar>
Mat<Scalar> unitary_to_symplectic(const CMat<Scalar>& u) {
  const Index n = u.rows();
  Mat<Scalar> k(2 * n, 2 * n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      const Scalar re = u(a, b).real(), im = u(a, b).imag();
      k(2 * a, 2 * b) = re;
      k(2 * a, 2 * b + 1) = -im;
      k(2 * a + 1, 2 * b) = im;
      k(2 * a + 1, 2 * b + 1) = re;
    }
  return k;
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
template <typename Scalar, typename Rng>
CMat<Scalar> random_unitary(Index n, Rng& rng) {
  std::normal_distribution<Scalar> gauss;
  CMat<Scalar> g(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) g(a, b) = Complex<Scalar>(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat<Scalar>> qr(g);
  CMat<Scalar> q = qr.householderQ();
  const CMat<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Scalar mag = std::abs(r(j, j));
    if (mag > Scalar(0)) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

/// Random pure description Gamma = K Z K^T with log-squeezing uniform in
/// [-z_max, z_max] and alpha uniform in the complex ball of radius alpha_max.
template <typename Scalar = double>
GaussianDescription<Scalar> random_pure_description(Index n, Scalar z_max, std::uint64_t seed,
                                                    Scalar alpha_max = Scalar(1)) {
  if (n < 1) throw ValidationError("mode count must be positive", "modes");
  if (!(z_max >= 0)) throw ValidationError("z_max must be non-negative", "z_max");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unif(Scalar(0), Scalar(1));
  std::normal_distribution<Scalar> gauss;

  Vec<Scalar> z(2 * n);
  for (Index j = 0; j < n; ++j) {
    const Scalar s = z_max * (Scalar(2) * unif(rng) - Scalar(1));
    z(2 * j) = std::exp(Scalar(-2) * s);
    z(2 * j + 1) = std::exp(Scalar(2) * s);
  }
  const Mat<Scalar> k = unitary_to_symplectic<Scalar>(random_unitary<Scalar>(n, rng));
  Mat<Scalar> cov = k * z.asDiagonal() * k.transpose();
  cov = (cov + cov.transpose()).eval() / Scalar(2);

  Vec<Scalar> dir(2 * n);
  for (Index j = 0; j < 2 * n; ++j) dir(j) = gauss(rng);
  const Scalar radius = alpha_max * std::pow(unif(rng), Scalar(1) / Scalar(2 * n));
  dir *= radius / dir.norm();
  CVec<Scalar> alpha(n);
  for (Index j = 0; j < n; ++j) alpha(j) = Complex<Scalar>(dir(2 * j), dir(2 * j + 1));

  return {cov, alpha, Complex<Scalar>(std::sqrt(reference_weight(cov)))};
}

}  // namespace cvgauss
