// SPDX-License-Identifier: Apache-2.0
//
// Truncated number-basis backend for one or two modes. It is used to
// cross-check the Gaussian formalism in tests and by the CLI oracle check;
// the simulation code never depends on it.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cvgauss/core.hpp"
#include "cvgauss/superposition.hpp"

namespace cvgauss {

struct FockOptions {
  int cutoff = 0;            ///< fixed cutoff per mode, or 0 to choose automatically
  double tail_tol = 1e-10;   ///< accepted truncated mass
  int initial_cutoff = 32;
  int max_cutoff_one_mode = 1024;
  int max_cutoff_two_modes = 512;
};

/// Amplitudes <m|psi> for occupations m_j <= cutoff. Two-mode amplitudes are
/// stored row-major with the first mode as the row index.
struct FockVector {
  int modes = 1;
  int cutoff = 0;
  Eigen::VectorXcd amps;

  Eigen::Index dim() const { return amps.size(); }
  /// Mass on occupations above 90% of the cutoff in any mode.
  double tail_mass() const;
  double norm_squared() const { return amps.squaredNorm(); }
};

int fock_dimension(int modes, int cutoff);

FockVector fock_vacuum(int modes, int cutoff);

/// Standard coherent state with amplitudes e^{-|a|^2/2} a^m / sqrt(m!) per mode.
FockVector fock_coherent(const Eigen::VectorXcd& alpha, int cutoff, double tail_tol = 1e-10);

/// S(z)|0> from the even-occupation series.
FockVector fock_squeezed_vacuum(double z, int cutoff, double tail_tol = 1e-10);

/// Matrix of the gate restricted to the retained block.
Eigen::MatrixXcd fock_gate(const GateSpec& g, int modes, int cutoff);

/// Applies the gate in place; the truncation keeps the retained block.
void apply_fock_gate(FockVector& v, const GateSpec& g);

FockVector fock_resized(const FockVector& v, int cutoff);

/// Number-basis vector of psi(Delta) for n <= 2 with the phase fixed by r.
FockVector fock_from_description(const Description& d, const FockOptions& opt = {});

/// sum_j c_j psi(Delta_j) at a common cutoff.
FockVector fock_superposition(const Superposition& psi, const FockOptions& opt = {});

std::complex<double> fock_overlap(const FockVector& a, const FockVector& b);

/// |<beta| (x) I psi|^2 / pi^k for the leading k = beta.size() modes.
double fock_heterodyne_density(const FockVector& v, const Eigen::VectorXcd& beta);

struct FockProjection {
  FockVector state;  ///< normalised post-measurement vector |beta> (x) phi
  double density;
};

FockProjection fock_project(const FockVector& v, const Eigen::VectorXcd& beta);

struct FockMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double energy;  ///< <H> with H = sum_j (Q_j^2 + P_j^2 + 1)
};

FockMoments fock_moments(const FockVector& v);

/// Prepares psi, applies the gates and doubles the cutoff until the
/// evolved vector keeps its norm within tail_tol.
FockVector fock_run_circuit(const Superposition& psi, const std::vector<GateSpec>& gates, const FockOptions& opt = {});

}  // namespace cvgauss
