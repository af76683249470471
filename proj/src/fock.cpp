// SPDX-License-Identifier: Apache-2.0
#include "cvgauss/fock.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace cvgauss {
namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;
using RowMatrixXcd = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPi = std::numbers::pi;

struct Spectral {
  MatrixXd vectors;
  VectorXd values;
};

/// Thread-safe memo of real symmetric eigendecompositions keyed by size.
class SpectralCache {
 public:
  template <typename Build>
  std::shared_ptr<const Spectral> get(int key, Build build) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(build());
    auto s = std::make_shared<Spectral>(Spectral{es.eigenvectors(), es.eigenvalues()});
    cache_.emplace(key, s);
    return s;
  }

 private:
  std::mutex mu_;
  std::map<int, std::shared_ptr<const Spectral>> cache_;
};

SpectralCache& position_cache() {
  static SpectralCache c;
  return c;
}
SpectralCache& quadratic_cache() {
  static SpectralCache c;
  return c;
}
SpectralCache& sector_cache() {
  static SpectralCache c;
  return c;
}

/// Truncated Q = (a + a^dagger)/sqrt(2) on levels 0..m.
std::shared_ptr<const Spectral> position_spectrum(int m) {
  return position_cache().get(m, [m] {
    MatrixXd q = MatrixXd::Zero(m + 1, m + 1);
    for (int k = 0; k < m; ++k) q(k + 1, k) = q(k, k + 1) = std::sqrt((k + 1) / 2.0);
    return q;
  });
}

/// Truncated (a^2 + a^dagger^2)/2 on levels 0..m.
std::shared_ptr<const Spectral> quadratic_spectrum(int m) {
  return quadratic_cache().get(m, [m] {
    MatrixXd y = MatrixXd::Zero(m + 1, m + 1);
    for (int k = 0; k + 2 <= m; ++k) y(k + 2, k) = y(k, k + 2) = std::sqrt((k + 1.0) * (k + 2.0)) / 2;
    return y;
  });
}

/// a_1^dagger a_2 + a_2^dagger a_1 on the sector m_1 + m_2 = s, basis |m, s - m>.
std::shared_ptr<const Spectral> sector_spectrum(int s) {
  return sector_cache().get(s, [s] {
    MatrixXd t = MatrixXd::Zero(s + 1, s + 1);
    for (int m = 0; m < s; ++m) t(m + 1, m) = t(m, m + 1) = std::sqrt((m + 1.0) * (s - m));
    return t;
  });
}

/// Leading (n+1) x (n+1) block of V diag(exp(-i t lambda)) V^T.
MatrixXcd propagator_block(const Spectral& sp, double t, int n) {
  const MatrixXd top = sp.vectors.topRows(n + 1);
  VectorXcd phases(sp.values.size());
  for (Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, -t * sp.values(k));
  return top.cast<cd>() * phases.asDiagonal() * top.transpose().cast<cd>();
}

/// diag(e^{i a m}) M diag(e^{-i b m}).
void rotate(MatrixXcd& m, double left, double right) {
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) m(r, c) *= std::polar(1.0, left * double(r) - right * double(c));
}

/// exp(gamma a^dagger - conj(gamma) a) on levels 0..n.
MatrixXcd standard_displacement(cd gamma, int n) {
  const double b = std::abs(gamma);
  if (b == 0) return MatrixXcd::Identity(n + 1, n + 1);
  const double theta = std::arg(gamma) + kPi / 2;
  const int m = n + 64 + 16 * static_cast<int>(std::ceil(b));
  MatrixXcd e = propagator_block(*position_spectrum(m), std::sqrt(2.0) * b, n);
  rotate(e, theta, theta);
  return e;
}

/// exp(z/2 (a^2 - a^dagger^2)) on levels 0..n.
MatrixXcd squeeze_matrix(double z, int n) {
  const int m = 2 * n + 64;
  MatrixXcd e = propagator_block(*quadratic_spectrum(m), z, n);
  rotate(e, -kPi / 4, -kPi / 4);
  return e;
}

MatrixXcd phase_matrix(double phi, int n) {
  MatrixXcd f = MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) f(k, k) = std::polar(1.0, -phi * k);
  return f;
}

VectorXcd coherent_amplitudes(cd alpha, int n) {
  VectorXcd c(n + 1);
  c(0) = std::exp(-std::norm(alpha) / 2);
  for (int k = 1; k <= n; ++k) c(k) = c(k - 1) * alpha / std::sqrt(double(k));
  return c;
}

void require_modes(int modes) {
  if (modes < 1 || modes > 2) throw ValidationError("the number-basis backend supports one or two modes", "modes");
}

void require_tail(const FockVector& v, double tol, const char* what) {
  const double deficit = 1.0 - v.norm_squared();
  if (v.tail_mass() > tol || deficit > tol)
    throw NumericError(std::string(what) + ": cutoff " + std::to_string(v.cutoff) + " too small");
}

Eigen::Map<RowMatrixXcd> as_matrix(FockVector& v) {
  return {v.amps.data(), v.cutoff + 1, v.cutoff + 1};
}

/// Single-mode unitary block on one mode of v.
void apply_local(FockVector& v, const MatrixXcd& u, Index mode) {
  if (v.modes == 1) {
    v.amps = u * v.amps;
    return;
  }
  auto c = as_matrix(v);
  if (mode == 0)
    c = (u * c).eval();
  else
    c = (c * u.transpose()).eval();
}

void apply_beamsplitter_sectors(FockVector& v, double omega) {
  const int n = v.cutoff;
  auto c = as_matrix(v);
  for (int s = 0; s <= n; ++s) {
    const MatrixXcd b = propagator_block(*sector_spectrum(s), omega, s);
    VectorXcd x(s + 1);
    for (int m = 0; m <= s; ++m) x(m) = c(m, s - m);
    x = b * x;
    for (int m = 0; m <= s; ++m) c(m, s - m) = x(m);
  }
  for (int m1 = 0; m1 <= n; ++m1)
    for (int m2 = n - m1 + 1; m2 <= n; ++m2) c(m1, m2) = 0;
}

/// Per-mode (a v) for the given mode.
VectorXcd lowered(const FockVector& v, int mode) {
  const int n = v.cutoff;
  VectorXcd out = VectorXcd::Zero(v.dim());
  if (v.modes == 1) {
    for (int m = 0; m < n; ++m) out(m) = std::sqrt(m + 1.0) * v.amps(m + 1);
    return out;
  }
  for (int m1 = 0; m1 <= n; ++m1)
    for (int m2 = 0; m2 <= n; ++m2) {
      const int i = m1 * (n + 1) + m2;
      if (mode == 0 && m1 < n) out(i) = std::sqrt(m1 + 1.0) * v.amps(i + n + 1);
      if (mode == 1 && m2 < n) out(i) = std::sqrt(m2 + 1.0) * v.amps(i + 1);
    }
  return out;
}

/// Gaussian state amplitudes from the annihilator relation a psi = (A a^dagger + b) psi.
FockVector gaussian_amplitudes(const Description& d, int n) {
  const int modes = static_cast<int>(d.modes());
  const Index dim = 2 * modes;
  // <R_k R_l> = (Gamma + i Omega)/2 for the centred state
  const MatrixXcd corr = (d.cov.cast<cd>() + cd(0, 1) * omega<double>(modes).cast<cd>()) / 2.0;
  MatrixXcd t = MatrixXcd::Zero(modes, dim);
  for (int j = 0; j < modes; ++j) {
    t(j, 2 * j) = 1.0 / std::sqrt(2.0);
    t(j, 2 * j + 1) = cd(0, 1.0 / std::sqrt(2.0));
  }
  const MatrixXcd mm = t * corr * t.transpose();            // <a_i a_j>
  const MatrixXcd nn = t.conjugate() * corr * t.transpose();  // <a_i^dagger a_j>
  const MatrixXcd eye = MatrixXcd::Identity(modes, modes);
  MatrixXcd a = (eye + nn).transpose().partialPivLu().solve(mm.transpose()).transpose();
  a = (a + a.transpose()).eval() / 2.0;

  const VectorXcd beta = d.alpha;
  const VectorXcd b = beta - a * beta.conjugate();
  const MatrixXd half = (MatrixXd::Identity(dim, dim) + d.cov) / 2.0;
  const cd c0 = std::exp(-beta.squaredNorm() / 2 + (beta.conjugate().transpose() * a * beta.conjugate())(0) / 2.0) *
                std::pow(half.determinant(), -0.25);

  FockVector v;
  v.modes = modes;
  v.cutoff = n;
  v.amps = VectorXcd::Zero(fock_dimension(modes, n));
  if (modes == 1) {
    v.amps(0) = c0;
    for (int m = 0; m < n; ++m) {
      cd next = b(0) * v.amps(m);
      if (m > 0) next += a(0, 0) * std::sqrt(double(m)) * v.amps(m - 1);
      v.amps(m + 1) = next / std::sqrt(m + 1.0);
    }
    return v;
  }
  // Walk the anti-diagonals and raise the larger occupation, so every
  // recursion coefficient sqrt(m_j / m_i) stays at most one.
  auto c = as_matrix(v);
  c(0, 0) = c0;
  for (int s = 1; s <= 2 * n; ++s)
    for (int m1 = std::max(0, s - n); m1 <= std::min(n, s); ++m1) {
      const int m2 = s - m1;
      const int i = m1 >= m2 ? 0 : 1;
      const int mi = i == 0 ? m1 : m2, mj = i == 0 ? m2 : m1;
      auto at = [&](int di, int dj) { return i == 0 ? c(m1 - di, m2 - dj) : c(m1 - dj, m2 - di); };
      cd next = b(i) * at(1, 0);
      if (mi > 1) next += a(i, i) * std::sqrt(mi - 1.0) * at(2, 0);
      if (mj > 0) next += a(i, 1 - i) * std::sqrt(double(mj)) * at(1, 1);
      c(m1, m2) = next / std::sqrt(double(mi));
    }
  return v;
}

int cutoff_cap(int modes, const FockOptions& opt) {
  return modes == 1 ? opt.max_cutoff_one_mode : opt.max_cutoff_two_modes;
}

}  // namespace

int fock_dimension(int modes, int cutoff) {
  require_modes(modes);
  if (cutoff < 1) throw ValidationError("cutoff must be positive", "cutoff");
  return modes == 1 ? cutoff + 1 : (cutoff + 1) * (cutoff + 1);
}

double FockVector::tail_mass() const {
  const int start = static_cast<int>(std::floor(0.9 * cutoff)) + 1;
  double mass = 0;
  if (modes == 1) {
    for (int m = start; m <= cutoff; ++m) mass += std::norm(amps(m));
    return mass;
  }
  for (int m1 = 0; m1 <= cutoff; ++m1)
    for (int m2 = 0; m2 <= cutoff; ++m2)
      if (m1 >= start || m2 >= start) mass += std::norm(amps(m1 * (cutoff + 1) + m2));
  return mass;
}

FockVector fock_vacuum(int modes, int cutoff) {
  FockVector v{modes, cutoff, VectorXcd::Zero(fock_dimension(modes, cutoff))};
  v.amps(0) = 1;
  return v;
}

FockVector fock_coherent(const VectorXcd& alpha, int cutoff, double tail_tol) {
  const int modes = static_cast<int>(alpha.size());
  FockVector v{modes, cutoff, VectorXcd::Zero(fock_dimension(modes, cutoff))};
  const VectorXcd c1 = coherent_amplitudes(alpha(0), cutoff);
  if (modes == 1) {
    v.amps = c1;
  } else {
    const VectorXcd c2 = coherent_amplitudes(alpha(1), cutoff);
    as_matrix(v) = c1 * c2.transpose();
  }
  require_tail(v, tail_tol, "fock_coherent");
  return v;
}

FockVector fock_squeezed_vacuum(double z, int cutoff, double tail_tol) {
  FockVector v{1, cutoff, VectorXcd::Zero(cutoff + 1)};
  const double t = -std::tanh(z);
  double amp = 1.0 / std::sqrt(std::cosh(z));
  for (int k = 0; 2 * k <= cutoff; ++k) {
    v.amps(2 * k) = amp;
    // ratio of consecutive terms sqrt((2k+2)!)/(2^{k+1}(k+1)!) over sqrt((2k)!)/(2^k k!)
    amp *= t * std::sqrt((2.0 * k + 1) * (2.0 * k + 2)) / (2.0 * (k + 1));
  }
  require_tail(v, tail_tol, "fock_squeezed_vacuum");
  return v;
}

MatrixXcd fock_gate(const GateSpec& g, int modes, int cutoff) {
  validate_gate(g, modes);
  const int n = cutoff;
  const int d1 = n + 1;
  auto embed = [&](const MatrixXcd& u, Index mode) -> MatrixXcd {
    if (modes == 1) return u;
    const MatrixXcd eye = MatrixXcd::Identity(d1, d1);
    MatrixXcd out = MatrixXcd::Zero(d1 * d1, d1 * d1);
    const MatrixXcd& left = mode == 0 ? u : eye;
    const MatrixXcd& right = mode == 0 ? eye : u;
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d1; ++b)
        if (left(a, b) != cd(0)) out.block(a * d1, b * d1, d1, d1) = left(a, b) * right;
    return out;
  };
  return std::visit(
      [&](const auto& gate) -> MatrixXcd {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<double>>) {
          MatrixXcd u = embed(standard_displacement(-gate.alpha(0), n), 0);
          if (modes == 2) u = embed(standard_displacement(-gate.alpha(1), n), 1) * u;
          return u;
        } else if constexpr (std::is_same_v<G, PhaseShift<double>>) {
          return embed(phase_matrix(gate.phi, n), mode_index(gate.mode, modes));
        } else if constexpr (std::is_same_v<G, Squeeze<double>>) {
          return embed(squeeze_matrix(gate.z, n), mode_index(gate.mode, modes));
        } else {
          MatrixXcd u(d1 * d1, d1 * d1);
          for (int col = 0; col < d1 * d1; ++col) {
            FockVector e{2, n, VectorXcd::Unit(d1 * d1, col)};
            apply_beamsplitter_sectors(e, gate.omega);
            u.col(col) = e.amps;
          }
          return u;
        }
      },
      g);
}

void apply_fock_gate(FockVector& v, const GateSpec& g) {
  validate_gate(g, v.modes);
  std::visit(
      [&](const auto& gate) {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<double>>) {
          for (int j = 0; j < v.modes; ++j)
            if (gate.alpha(j) != cd(0)) apply_local(v, standard_displacement(-gate.alpha(j), v.cutoff), j);
        } else if constexpr (std::is_same_v<G, PhaseShift<double>>) {
          apply_local(v, phase_matrix(gate.phi, v.cutoff), mode_index(gate.mode, v.modes));
        } else if constexpr (std::is_same_v<G, Squeeze<double>>) {
          apply_local(v, squeeze_matrix(gate.z, v.cutoff), mode_index(gate.mode, v.modes));
        } else {
          apply_beamsplitter_sectors(v, gate.omega);
        }
      },
      g);
}

FockVector fock_resized(const FockVector& v, int cutoff) {
  FockVector out{v.modes, cutoff, VectorXcd::Zero(fock_dimension(v.modes, cutoff))};
  const int keep = std::min(cutoff, v.cutoff);
  if (v.modes == 1) {
    out.amps.head(keep + 1) = v.amps.head(keep + 1);
    return out;
  }
  for (int m1 = 0; m1 <= keep; ++m1)
    for (int m2 = 0; m2 <= keep; ++m2) out.amps(m1 * (cutoff + 1) + m2) = v.amps(m1 * (v.cutoff + 1) + m2);
  return out;
}

FockVector fock_from_description(const Description& d, const FockOptions& opt) {
  check_shapes(d);
  const int modes = static_cast<int>(d.modes());
  require_modes(modes);
  const int cap = cutoff_cap(modes, opt);
  int n = opt.cutoff > 0 ? opt.cutoff : opt.initial_cutoff;
  for (;;) {
    FockVector v = gaussian_amplitudes(d, n);
    const double deficit = 1.0 - v.norm_squared();
    const bool converged = deficit <= opt.tail_tol && v.tail_mass() <= opt.tail_tol;
    if (converged || opt.cutoff > 0 || 2 * n > cap) {
      if (!converged) throw NumericError("fock_from_description: cutoff " + std::to_string(n) + " too small");
      const cd ref = (fock_coherent(d.alpha, n, 1.0).amps.adjoint() * v.amps)(0);
      if (std::abs(ref) == 0) throw NumericError("fock_from_description: zero reference overlap");
      v.amps *= std::polar(1.0, std::arg(d.r) - std::arg(ref));
      return v;
    }
    n *= 2;
  }
}

FockVector fock_superposition(const Superposition& psi, const FockOptions& opt) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  int n = opt.cutoff;
  if (n == 0)
    for (const auto& t : psi.terms) n = std::max(n, fock_from_description(t.state, opt).cutoff);
  FockOptions fixed = opt;
  fixed.cutoff = n;
  FockVector sum{static_cast<int>(psi.modes()), n, VectorXcd::Zero(fock_dimension(static_cast<int>(psi.modes()), n))};
  for (const auto& t : psi.terms) sum.amps += t.coeff * fock_from_description(t.state, fixed).amps;
  return sum;
}

cd fock_overlap(const FockVector& a, const FockVector& b) {
  if (a.modes != b.modes) throw ValidationError("vectors have different mode counts", "modes");
  if (a.cutoff == b.cutoff) return a.amps.dot(b.amps);
  const int n = std::max(a.cutoff, b.cutoff);
  return fock_resized(a, n).amps.dot(fock_resized(b, n).amps);
}

namespace {

/// (<beta| (x) I) v on the unmeasured modes, or the scalar for k = modes.
VectorXcd contract(const FockVector& v, const VectorXcd& beta) {
  if (beta.size() < 1 || beta.size() > v.modes) throw ValidationError("measured mode count out of range", "k");
  const int n = v.cutoff;
  const VectorXcd c1 = coherent_amplitudes(beta(0), n);
  if (v.modes == 1) return VectorXcd::Constant(1, c1.dot(v.amps));
  const Eigen::Map<const RowMatrixXcd> c(v.amps.data(), n + 1, n + 1);
  const VectorXcd rest = c.transpose() * c1.conjugate();
  if (beta.size() == 1) return rest;
  return VectorXcd::Constant(1, coherent_amplitudes(beta(1), n).dot(rest));
}

}  // namespace

double fock_heterodyne_density(const FockVector& v, const VectorXcd& beta) {
  return contract(v, beta).squaredNorm() / std::pow(kPi, double(beta.size()));
}

FockProjection fock_project(const FockVector& v, const VectorXcd& beta) {
  const VectorXcd w = contract(v, beta);
  const double nrm = w.norm();
  if (!(nrm > 0)) throw NumericError("fock_project: zero projection");
  FockProjection out;
  out.density = w.squaredNorm() / std::pow(kPi, double(beta.size()));
  const int n = v.cutoff;
  out.state = FockVector{v.modes, n, VectorXcd::Zero(v.dim())};
  if (beta.size() == v.modes) {
    // the projection onto a coherent state is that state up to the phase of w
    const double phase = std::arg(w(0));
    VectorXcd full = beta.size() == 1 ? fock_coherent(beta, n, 1.0).amps : fock_coherent(beta, n, 1.0).amps;
    out.state.amps = std::polar(1.0, phase) * full;
    return out;
  }
  const VectorXcd c1 = coherent_amplitudes(beta(0), n);
  as_matrix(out.state) = c1 * (w / nrm).transpose();
  return out;
}

FockMoments fock_moments(const FockVector& v) {
  const int modes = v.modes;
  const double nrm = v.norm_squared();
  std::vector<VectorXcd> low(modes);
  for (int j = 0; j < modes; ++j) low[j] = lowered(v, j);
  VectorXcd mean_a(modes);
  MatrixXcd mm(modes, modes), nn(modes, modes);
  for (int i = 0; i < modes; ++i) {
    mean_a(i) = v.amps.dot(low[i]) / nrm;
    for (int j = 0; j < modes; ++j) {
      const FockVector lj{modes, v.cutoff, low[j]};
      mm(i, j) = v.amps.dot(lowered(lj, i)) / nrm;
      nn(i, j) = low[i].dot(low[j]) / nrm;
    }
  }
  // centred moments of a
  const MatrixXcd cm = mm - mean_a * mean_a.transpose();
  const MatrixXcd cn = nn - mean_a.conjugate() * mean_a.transpose();

  FockMoments out;
  out.mean.resize(2 * modes);
  out.cov.resize(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    out.mean(2 * j) = std::sqrt(2.0) * mean_a(j).real();
    out.mean(2 * j + 1) = std::sqrt(2.0) * mean_a(j).imag();
  }
  // Q = (a + a^dagger)/sqrt 2, P = -i (a - a^dagger)/sqrt 2; symmetrised covariances
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j) {
      const cd m = cm(i, j), nij = cn(i, j), nji = cn(j, i);
      const double delta = i == j ? 1.0 : 0.0;
      // <{da_i, da_j^dagger}> = 2 N_ji + delta
      const cd s_ad = nji + nji + delta;  // <da_i da_j^+> + <da_j^+ da_i>
      const cd s_da = nij + nij + delta;  // <da_i^+ da_j> + <da_j da_i^+>
      const cd s_aa = 2.0 * m;
      const cd s_dd = 2.0 * std::conj(m);
      out.cov(2 * i, 2 * j) = (0.5 * (s_aa + s_ad + s_da + s_dd)).real();
      out.cov(2 * i + 1, 2 * j + 1) = (-0.5 * (s_aa - s_ad - s_da + s_dd)).real();
      out.cov(2 * i, 2 * j + 1) = (cd(0, -0.5) * (s_aa - s_ad + s_da - s_dd)).real();
      out.cov(2 * i + 1, 2 * j) = (cd(0, -0.5) * (s_aa + s_ad - s_da - s_dd)).real();
    }
  out.energy = 2.0 * nn.trace().real() + 2.0 * modes;
  return out;
}

FockVector fock_run_circuit(const Superposition& psi, const std::vector<GateSpec>& gates, const FockOptions& opt) {
  const int modes = static_cast<int>(psi.modes());
  require_modes(modes);
  const int cap = cutoff_cap(modes, opt);
  int n = opt.cutoff;
  if (n == 0) n = fock_superposition(psi, opt).cutoff;
  for (;;) {
    FockOptions fixed = opt;
    fixed.cutoff = n;
    FockVector v = fock_superposition(psi, fixed);
    const double before = v.norm_squared();
    for (const auto& g : gates) apply_fock_gate(v, g);
    const bool converged = std::abs(v.norm_squared() - before) <= opt.tail_tol * std::max(1.0, before) &&
                           v.tail_mass() <= opt.tail_tol * std::max(1.0, before);
    if (converged) return v;
    if (opt.cutoff > 0 || 2 * n > cap)
      throw NumericError("fock_run_circuit: cutoff " + std::to_string(n) + " too small for the circuit");
    n *= 2;
  }
}

}  // namespace cvgauss
