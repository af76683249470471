// SPDX-License-Identifier: Apache-2.0
//
// Circuits of Gaussian unitaries followed by one heterodyne measurement,
// their JSON documents, and the exact and approximate density drivers.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvgauss/states.hpp"
#include "cvgauss/superposition.hpp"

namespace cvgauss {

using Outcome = HeterodyneOutcome<double>;

struct CircuitSpec {
  int modes = 1;
  std::vector<GateSpec> gates;
  std::optional<Outcome> measurement;
};

void validate_circuit(const CircuitSpec& c);

enum class Method { Exact, Approx };

struct ApproxOptions {
  double epsilon = 0.1;
  double p_fail = 0.1;
  std::optional<double> mean_photons;     ///< N with <n> <= N for the input; else the exact energy is used
  std::optional<double> delta;            ///< atypicality budget, defaults to p_fail
  std::optional<double> energy_override;  ///< energy passed directly to the norm estimator
  std::uint64_t seed = 0;
  unsigned workers = 1;
  SqueezingRule rule = SqueezingRule::Literal;
  SampleRule sample_rule = SampleRule::Cubic;
};

struct SimulationResult {
  double density = 0;
  Method method = Method::Exact;
  std::optional<NormEstimate<double>> estimate;  ///< approximate runs only
  std::vector<std::size_t> dropped_branches;
};

/// Applies the gates branch by branch.
Superposition evolve(const Superposition& psi, const std::vector<GateSpec>& gates);

/// Outcome density of the circuit's measurement, computed exactly.
SimulationResult simulate_exact(const Superposition& psi, const CircuitSpec& circuit, double norm_tol = 1e-6);

/// Outcome density up to multiplicative error epsilon with probability 1 - p_fail.
SimulationResult simulate_approx(const Superposition& psi, const CircuitSpec& circuit, const ApproxOptions& opt);

// ---------------------------------------------------------------------------
// Documents

struct VacuumState {};
struct TermsState {
  Superposition terms;
};
struct CatState {
  std::complex<double> alpha;
  Parity parity = Parity::Even;
};
struct GkpState {
  double z = 1;
  int half_width = 0;
  double step = 1;
  double envelope = 1;
};
struct AppendixDState {
  double p = 0;
  double r = 0;
  double z = 1;
};

using StateSpec = std::variant<VacuumState, TermsState, CatState, GkpState, AppendixDState>;

struct CircuitDocument {
  int modes = 1;
  StateSpec state;
  CircuitSpec circuit;
};

/// Parses and validates a circuit document. Errors carry a JSON pointer to the
/// offending field, or the line and column of a syntax error.
CircuitDocument parse_circuit_document(const std::string& text, double tol = 1e-8);

/// Canonical JSON form; parse_circuit_document(emit_circuit_document(d)) reproduces d.
std::string emit_circuit_document(const CircuitDocument& doc);

/// The initial superposition of a document on doc.modes modes.
Superposition build_state(const CircuitDocument& doc);

std::pair<Superposition, CircuitSpec> parse_circuit(const std::string& text, double tol = 1e-8);

/// Document holding psi as explicit terms.
CircuitDocument terms_document(const Superposition& psi, const CircuitSpec& circuit);

std::string emit_result(const SimulationResult& result);

std::string read_text_file(const std::string& path);

}  // namespace cvgauss
