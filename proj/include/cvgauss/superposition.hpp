// SPDX-License-Identifier: Apache-2.0
//
// Superpositions of Gaussian states: norms, measurement densities and energy
// bookkeeping.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "cvgauss/evolution.hpp"
#include "cvgauss/measurement.hpp"

namespace cvgauss {

template <typename Scalar>
struct SuperpositionTerm {
  Complex<Scalar> coeff;
  GaussianDescription<Scalar> state;
};

/// Psi = sum_j c_j psi(Delta_j); not necessarily normalised.
template <typename Scalar>
struct GaussianSuperposition {
  std::vector<SuperpositionTerm<Scalar>> terms;

  Index modes() const { return terms.empty() ? 0 : terms.front().state.modes(); }
  std::size_t size() const { return terms.size(); }
};

using Superposition = GaussianSuperposition<double>;

template <typename Scalar>
void validate_superposition(const GaussianSuperposition<Scalar>& psi, Scalar tol = Scalar(1e-8)) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  const Index n = psi.modes();
  for (std::size_t j = 0; j < psi.terms.size(); ++j) {
    const std::string field = "terms/" + std::to_string(j);
    const auto& t = psi.terms[j];
    if (t.state.modes() != n) throw ValidationError("terms have different mode counts", field);
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
      throw ValidationError("non-finite coefficient", field + "/c");
    const auto rep = validate_description(t.state, tol);
    if (!rep.valid) throw ValidationError("covariance matrix violates Gamma + i Omega >= 0", field + "/cov");
    if (!rep.pure) throw ValidationError("covariance matrix is not pure", field + "/cov");
    if (!rep.r_consistent) throw ValidationError("|r|^2 inconsistent with the covariance matrix", field + "/r");
  }
}

/// G_kl = <psi_k, psi_l>.
template <typename Scalar>
CMat<Scalar> gram_matrix(const GaussianSuperposition<Scalar>& psi) {
  const auto chi = static_cast<Index>(psi.size());
  CMat<Scalar> g(chi, chi);
  for (Index k = 0; k < chi; ++k) {
    g(k, k) = Scalar(1);
    for (Index l = k + 1; l < chi; ++l) {
      g(k, l) = overlap(psi.terms[k].state, psi.terms[l].state);
      g(l, k) = std::conj(g(k, l));
    }
  }
  return g;
}

/// ||Psi||^2 from the pairwise overlaps.
template <typename Scalar>
Scalar exact_norm_squared(const GaussianSuperposition<Scalar>& psi) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  Scalar diag = 0;
  Complex<Scalar> off = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const auto& tk = psi.terms[k];
    diag += std::norm(tk.coeff);
    for (std::size_t l = k + 1; l < psi.size(); ++l) {
      const auto& tl = psi.terms[l];
      off += std::conj(tk.coeff) * tl.coeff * overlap(tk.state, tl.state);
    }
  }
  return std::max(Scalar(0), diag + Scalar(2) * off.real());
}

template <typename Scalar>
Scalar exact_norm(const GaussianSuperposition<Scalar>& psi) {
  return std::sqrt(exact_norm_squared(psi));
}

template <typename Scalar>
GaussianSuperposition<Scalar> normalized(GaussianSuperposition<Scalar> psi) {
  const Scalar nrm = exact_norm(psi);
  if (!(nrm > Scalar(0))) throw NumericError("cannot normalise a zero superposition");
  for (auto& t : psi.terms) t.coeff /= nrm;
  return psi;
}

// ---------------------------------------------------------------------------
// Randomised norm estimation

/// Stateless 64-bit mixer used to key per-sample random streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Generator for sample `index` of the stream `seed`.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Cubic: L = ceil(E / (4 pi p_f eps^3)).
/// Chebyshev: L = ceil(4 R^{2n} / (n! p_f eps^2)), which certifies the
/// (eps, p_f) contract for any number of modes.
enum class SampleRule { Cubic, Chebyshev };

struct FastNormOptions {
  double epsilon = 0.1;
  double p_fail = 0.1;
  double energy = 0;  ///< bound on <H> of the normalised state
  std::uint64_t seed = 0;
  unsigned workers = 1;
  SampleRule rule = SampleRule::Cubic;
};

template <typename Scalar>
struct NormEstimate {
  Scalar value;  ///< estimate of ||Psi||^2
  Scalar epsilon;
  Scalar p_fail;
  Scalar energy;
  Scalar radius;
  std::uint64_t samples;
  std::uint64_t seed;
};

template <typename Scalar>
Scalar sampling_radius(Scalar energy, Scalar epsilon) {
  return std::sqrt(energy / epsilon);
}

template <typename Scalar>
std::uint64_t sample_count(Scalar energy, Scalar epsilon, Scalar p_fail, SampleRule rule = SampleRule::Cubic,
                           Index modes = 1) {
  Scalar l;
  if (rule == SampleRule::Cubic) {
    l = energy / (Scalar(4) * std::numbers::pi_v<Scalar> * p_fail * epsilon * epsilon * epsilon);
  } else {
    const Scalar log_w = Scalar(modes) * std::log(energy / epsilon) - std::lgamma(Scalar(modes + 1));
    l = Scalar(4) * std::exp(log_w) / (p_fail * epsilon * epsilon);
  }
  if (!(l < Scalar(1e12))) throw ValidationError("sample count exceeds 1e12", "epsilon");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(l)));
}

/// Estimates ||Psi||^2 from L coherent probes drawn uniformly from the ball of
/// radius R in C^n. Each sample has its own keyed stream and the samples are
/// summed in index order, so the result does not depend on `workers`.
template <typename Scalar>
NormEstimate<Scalar> fast_norm(const GaussianSuperposition<Scalar>& psi, const FastNormOptions& opt) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  if (!(opt.epsilon > 0)) throw ValidationError("epsilon must be positive", "epsilon");
  if (!(opt.p_fail > 0 && opt.p_fail < 1)) throw ValidationError("p_fail must lie in (0, 1)", "p_fail");
  if (!(opt.energy > 0) || !std::isfinite(opt.energy)) throw ValidationError("energy bound must be positive", "energy_bound");

  const Index n = psi.modes();
  const Scalar eps = Scalar(opt.epsilon), pf = Scalar(opt.p_fail), e = Scalar(opt.energy);
  const Scalar radius = sampling_radius(e, eps);
  const std::uint64_t count = sample_count(e, eps, pf, opt.rule, n);
  // vol(B_R in R^{2n}) / pi^n = R^{2n} / n!
  const Scalar weight = std::exp(Scalar(2 * n) * std::log(radius) - std::lgamma(Scalar(n + 1)));

  std::vector<Scalar> x(count);
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    Vec<Scalar> dir(2 * n);
    for (std::uint64_t s = begin; s < end; ++s) {
      auto rng = sample_rng(opt.seed, s);
      std::normal_distribution<Scalar> gauss;
      std::uniform_real_distribution<Scalar> unif;
      for (Index a = 0; a < 2 * n; ++a) dir(a) = gauss(rng);
      const Scalar rad = radius * std::pow(unif(rng), Scalar(1) / Scalar(2 * n));
      dir *= rad / dir.norm();
      CVec<Scalar> probe(n);
      for (Index j = 0; j < n; ++j) probe(j) = Complex<Scalar>(dir(2 * j), dir(2 * j + 1));
      const auto coherent = coherent_description<Scalar>(probe);
      Complex<Scalar> amp = 0;
      for (const auto& t : psi.terms) amp += t.coeff * overlap(coherent, t.state);
      x[s] = weight * std::norm(amp);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  if (workers == 1) {
    run(0, count);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t b = std::min<std::uint64_t>(count, w * chunk);
      const std::uint64_t en = std::min<std::uint64_t>(count, b + chunk);
      pool.emplace_back(run, b, en);
    }
    for (auto& t : pool) t.join();
  }
  Scalar sum = 0;
  for (const Scalar v : x) sum += v;
  return {sum / Scalar(count), eps, pf, e, radius, count, opt.seed};
}

// ---------------------------------------------------------------------------
// Measurement of superpositions

template <typename Scalar>
struct MeasuredSuperposition {
  GaussianSuperposition<Scalar> state;  ///< Pi_beta Psi, branch-wise normalised descriptions
  std::vector<std::size_t> dropped;      ///< branches whose density fell below the floor
  Scalar dropped_weight = 0;             ///< sum of |c_j|^2 pi^k p_j over dropped branches
};

/// Pi_beta Psi as a superposition with c'_j = c_j (pi^k p_j)^{1/2}.
template <typename Scalar>
MeasuredSuperposition<Scalar> post_measurement_superposition(const GaussianSuperposition<Scalar>& psi,
                                                             const HeterodyneOutcome<Scalar>& out) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  validate_outcome(out, psi.modes());
  const Scalar pik = std::pow(std::numbers::pi_v<Scalar>, Scalar(out.k()));
  MeasuredSuperposition<Scalar> res;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const auto& t = psi.terms[j];
    const Scalar p = heterodyne_density(t.state, out);
    if (!(p > Scalar(kDensityFloor))) {
      res.dropped.push_back(j);
      res.dropped_weight += std::norm(t.coeff) * pik * p;
      continue;
    }
    auto pm = postmeasure(t.state, out);
    res.state.terms.push_back({t.coeff * std::sqrt(pik * pm.density), std::move(pm.state)});
  }
  if (res.state.terms.empty()) throw NumericError("all branches have outcome density below floor");
  return res;
}

/// p_Psi(beta) = ||Pi_beta Psi||^2 / pi^k.
template <typename Scalar>
Scalar measureprob_exact(const GaussianSuperposition<Scalar>& psi, const HeterodyneOutcome<Scalar>& out) {
  const auto post = post_measurement_superposition(psi, out);
  return exact_norm_squared(post.state) / std::pow(std::numbers::pi_v<Scalar>, Scalar(out.k()));
}

template <typename Scalar>
struct ApproxDensity {
  Scalar density;
  NormEstimate<Scalar> estimate;
};

/// Density estimate with multiplicative error epsilon; `opt.energy` must bound
/// the energy of the normalised post-measurement state.
template <typename Scalar>
ApproxDensity<Scalar> measureprob_approx(const GaussianSuperposition<Scalar>& psi,
                                         const HeterodyneOutcome<Scalar>& out, const FastNormOptions& opt) {
  const auto post = post_measurement_superposition(psi, out);
  const auto est = fast_norm(post.state, opt);
  return {est.value / std::pow(std::numbers::pi_v<Scalar>, Scalar(out.k())), est};
}

// ---------------------------------------------------------------------------
// Energy bookkeeping

template <typename Scalar>
struct TypicalityParams {
  Scalar energy;        ///< E
  Scalar delta;
  Scalar post_energy;   ///< 2 (E + 1) / delta
  Scalar radius;        ///< sqrt(E / delta)
};

template <typename Scalar>
TypicalityParams<Scalar> typical_parameters(Scalar energy, Scalar delta) {
  if (!(energy > 0) || !std::isfinite(energy)) throw ValidationError("energy must be positive", "energy_bound");
  if (!(delta > 0 && delta <= 1)) throw ValidationError("delta must lie in (0, 1]", "delta");
  return {energy, delta, Scalar(2) * (energy + Scalar(1)) / delta, std::sqrt(energy / delta)};
}

/// How non-squeezing gates count towards the total squeezing.
enum class SqueezingRule {
  Literal,  ///< every non-squeezing gate contributes 1
  Tight,    ///< non-squeezing gates contribute 0
};

/// Upper bound on <H> after the gates, starting from an energy bound `energy`.
/// Each gate multiplies the bound by e^{2 z_t}; displacements then add
/// (sqrt(E) + ||hat_d(alpha)||)^2 and each measured mode adds 2.
template <typename Scalar>
Scalar circuit_energy_bound(Scalar energy, const std::vector<Gate<Scalar>>& gates,
                            SqueezingRule rule = SqueezingRule::Literal, Index measured_modes = 0) {
  if (!(energy >= 0)) throw ValidationError("energy bound must be non-negative", "energy_bound");
  Scalar e = energy;
  for (const auto& g : gates) {
    std::visit(
        [&](const auto& gate) {
          using G = std::decay_t<decltype(gate)>;
          if constexpr (std::is_same_v<G, Squeeze<Scalar>>) {
            e *= std::exp(Scalar(2) * std::abs(gate.z));
          } else {
            if (rule == SqueezingRule::Literal) e *= std::exp(Scalar(2));
            if constexpr (std::is_same_v<G, Displacement<Scalar>>) {
              const Scalar s = std::sqrt(e) + hat_d<Scalar>(gate.alpha).norm();
              e = s * s;
            }
          }
        },
        g);
  }
  return e + Scalar(2) * Scalar(measured_modes);
}

template <typename Scalar>
struct SuperpositionMoments {
  Scalar norm_squared;
  Vec<Scalar> mean;  ///< first moments d
  Mat<Scalar> cov;   ///< covariance matrix Gamma
  Scalar energy;     ///< <H> of the normalised state
};

/// First and second moments of the normalised superposition from pairwise
/// characteristic functions.
template <typename Scalar>
SuperpositionMoments<Scalar> superposition_moments(const GaussianSuperposition<Scalar>& psi) {
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "terms");
  const Index dim = 2 * psi.modes();
  Complex<Scalar> nrm = 0;
  CVec<Scalar> first = CVec<Scalar>::Zero(dim);
  CMat<Scalar> second = CMat<Scalar>::Zero(dim, dim);
  for (std::size_t k = 0; k < psi.size(); ++k) {
    for (std::size_t l = k; l < psi.size(); ++l) {
      const auto& tk = psi.terms[k];
      const auto& tl = psi.terms[l];
      const auto m = cross_moments(tk.state, tl.state);
      const Complex<Scalar> w = std::conj(tk.coeff) * tl.coeff;
      // the (l, k) term is the complex conjugate of the (k, l) term
      const Scalar mult = k == l ? Scalar(1) : Scalar(2);
      nrm += mult * (w * m.overlap).real();
      first += mult * (w * m.first).real().template cast<Complex<Scalar>>();
      second += mult * (w * m.second).real().template cast<Complex<Scalar>>();
    }
  }
  SuperpositionMoments<Scalar> out;
  out.norm_squared = nrm.real();
  if (!(out.norm_squared > 0)) throw NumericError("superposition has zero norm");
  out.mean = first.real() / out.norm_squared;
  const Mat<Scalar> sym = second.real() / out.norm_squared;
  out.cov = Scalar(2) * (sym - out.mean * out.mean.transpose());
  out.cov = (out.cov + out.cov.transpose()).eval() / Scalar(2);
  out.energy = sym.trace() + Scalar(psi.modes());
  return out;
}

/// <Psi, H Psi> / ||Psi||^2.
template <typename Scalar>
Scalar superposition_energy_exact(const GaussianSuperposition<Scalar>& psi) {
  return superposition_moments(psi).energy;
}

}  // namespace cvgauss
