// SPDX-License-Identifier: Apache-2.0
//
// cvgauss: strong simulation of Gaussian circuits on superpositions of
// Gaussian states, from the command line.
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvgauss/circuit.hpp"
#include "cvgauss/fock.hpp"

namespace {

using namespace cvgauss;
using json = nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;
constexpr double kOracleTolerance = 1e-6;

struct RunConfig {
  std::vector<std::string> circuits;
  std::string method = "exact";
  double epsilon = 0.1;
  double p_fail = 0.1;
  std::optional<double> energy_bound;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  SampleRule sample_rule = SampleRule::Cubic;
  double tol = 1e-8;
  bool oracle_check = false;
};

void add_common(CLI::App* cmd, RunConfig& cfg, bool two_documents = false) {
  auto* c = cmd->add_option("--circuit", cfg.circuits, "circuit document (JSON)")->required();
  if (two_documents)
    c->expected(2)->description("two circuit documents; the overlap of their final states is printed");
  else
    c->expected(1);
  cmd->add_option("--method", cfg.method, "exact or approx")->check(CLI::IsMember({"exact", "approx"}));
  cmd->add_option("--epsilon", cfg.epsilon, "relative error of approximate runs")->check(CLI::PositiveNumber);
  cmd->add_option("--p-fail", cfg.p_fail, "failure probability of approximate runs")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--energy-bound", cfg.energy_bound, "energy passed to the norm estimator instead of the derived bound");
  cmd->add_option("--seed", cfg.seed, "random seed; a fresh seed is drawn and reported if omitted");
  cmd->add_option("--workers", cfg.workers, "sampling threads")->check(CLI::PositiveNumber);
  cmd->add_option("--sample-rule", cfg.sample_rule, "sample count of the norm estimator: cubic or chebyshev")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, SampleRule>{{"cubic", SampleRule::Cubic}, {"chebyshev", SampleRule::Chebyshev}}));
  cmd->add_option("--tol", cfg.tol, "tolerance for validating input descriptions")->check(CLI::PositiveNumber);
  cmd->add_flag("--oracle-check", cfg.oracle_check, "compare with the number-basis backend (at most two modes)");
}

std::uint64_t resolve_seed(RunConfig& cfg) {
  if (!cfg.seed) {
    std::random_device rd;
    cfg.seed = (std::uint64_t(rd()) << 32) ^ rd();
    std::cerr << "seed: " << *cfg.seed << "\n";
  }
  return *cfg.seed;
}

struct Loaded {
  CircuitDocument doc;
  Superposition psi;
};

Loaded load(const std::string& path, double tol) {
  Loaded l{parse_circuit_document(read_text_file(path), tol), {}};
  l.psi = build_state(l.doc);
  return l;
}

ApproxOptions approx_options(RunConfig& cfg) {
  ApproxOptions o;
  o.epsilon = cfg.epsilon;
  o.p_fail = cfg.p_fail;
  o.energy_override = cfg.energy_bound;
  o.seed = resolve_seed(cfg);
  o.workers = cfg.workers;
  o.sample_rule = cfg.sample_rule;
  return o;
}

struct OracleReport {
  json doc;
  bool agree = true;
};

OracleReport oracle_report(const Loaded& l) {
  if (l.doc.modes > 2) throw ValidationError("the oracle check supports at most two modes", "/modes");
  OracleReport rep;
  const auto evolved = evolve(l.psi, l.doc.circuit.gates);
  const auto v = fock_run_circuit(l.psi, l.doc.circuit.gates);
  const double norm_exact = exact_norm(evolved);
  const double norm_oracle = std::sqrt(v.norm_squared());
  double worst = std::abs(norm_exact - norm_oracle);
  rep.doc["cutoff"] = v.cutoff;
  rep.doc["norm_exact"] = norm_exact;
  rep.doc["norm_oracle"] = norm_oracle;
  if (l.doc.circuit.measurement) {
    const auto& out = *l.doc.circuit.measurement;
    const double p_exact = measureprob_exact(evolved, out);
    const double p_oracle = fock_heterodyne_density(v, out.beta);
    rep.doc["p_exact"] = p_exact;
    rep.doc["p_oracle"] = p_oracle;
    worst = std::max(worst, std::abs(p_exact - p_oracle));
  }
  rep.doc["max_abs_discrepancy"] = worst;
  rep.agree = worst <= kOracleTolerance;
  rep.doc["agree"] = rep.agree;
  return rep;
}

int cmd_simulate(RunConfig& cfg) {
  const auto l = load(cfg.circuits.front(), cfg.tol);
  SimulationResult res = cfg.method == "exact" ? simulate_exact(l.psi, l.doc.circuit)
                                               : simulate_approx(l.psi, l.doc.circuit, approx_options(cfg));
  if (!cfg.oracle_check) {
    std::cout << emit_result(res);
    return 0;
  }
  auto doc = json::parse(emit_result(res));
  const auto rep = oracle_report(l);
  doc["oracle"] = rep.doc;
  std::cout << doc.dump() << "\n";
  return rep.agree ? 0 : kExitNumeric;
}

int cmd_norm(RunConfig& cfg) {
  const auto l = load(cfg.circuits.front(), cfg.tol);
  const auto evolved = evolve(l.psi, l.doc.circuit.gates);
  json doc;
  doc["method"] = cfg.method;
  if (cfg.method == "exact") {
    const double n2 = exact_norm_squared(evolved);
    doc["norm"] = std::sqrt(n2);
    doc["norm_squared"] = n2;
  } else {
    FastNormOptions fo;
    fo.epsilon = cfg.epsilon;
    fo.p_fail = cfg.p_fail;
    fo.energy = cfg.energy_bound ? *cfg.energy_bound : superposition_energy_exact(evolved);
    fo.seed = resolve_seed(cfg);
    fo.workers = cfg.workers;
    fo.rule = cfg.sample_rule;
    const auto est = fast_norm(evolved, fo);
    doc["norm_squared"] = est.value;
    doc["epsilon"] = est.epsilon;
    doc["p_fail"] = est.p_fail;
    doc["energy_bound"] = est.energy;
    doc["R"] = est.radius;
    doc["L"] = est.samples;
    doc["seed"] = est.seed;
  }
  std::cout << doc.dump() << "\n";
  return 0;
}

int cmd_overlap(RunConfig& cfg) {
  const auto a = load(cfg.circuits.at(0), cfg.tol);
  const auto b = load(cfg.circuits.at(1), cfg.tol);
  if (a.doc.modes != b.doc.modes) throw ValidationError("documents have different mode counts", "/modes");
  const auto ea = evolve(a.psi, a.doc.circuit.gates);
  const auto eb = evolve(b.psi, b.doc.circuit.gates);
  std::complex<double> ov = 0;
  for (const auto& ta : ea.terms)
    for (const auto& tb : eb.terms) ov += std::conj(ta.coeff) * tb.coeff * overlap(ta.state, tb.state);
  json doc;
  doc["overlap"] = json::array({ov.real(), ov.imag()});
  doc["abs_squared"] = std::norm(ov);
  std::cout << doc.dump() << "\n";
  return 0;
}

int cmd_state(RunConfig& cfg) {
  const auto l = load(cfg.circuits.front(), cfg.tol);
  CircuitSpec rest = l.doc.circuit;
  rest.gates.clear();
  std::cout << emit_circuit_document(terms_document(evolve(l.psi, l.doc.circuit.gates), rest));
  return 0;
}

int cmd_oracle_check(RunConfig& cfg) {
  const auto rep = oracle_report(load(cfg.circuits.front(), cfg.tol));
  std::cout << rep.doc.dump() << "\n";
  return rep.agree ? 0 : kExitNumeric;
}

void diagnose(const char* kind, const std::string& message, const std::string& field = {}) {
  json d;
  d["error"] = message;
  d["kind"] = kind;
  if (!field.empty()) d["field"] = field;
  std::cerr << d.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong simulation of Gaussian circuits acting on superpositions of Gaussian states"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto* sim = app.add_subcommand("simulate", "outcome density of the circuit's heterodyne measurement");
  auto* norm = app.add_subcommand("norm", "norm of the evolved state");
  auto* ovl = app.add_subcommand("overlap", "inner product of the final states of two documents");
  auto* st = app.add_subcommand("state", "evolved state as an explicit terms document");
  auto* orc = app.add_subcommand("oracle-check", "compare with the number-basis backend");
  add_common(sim, cfg);
  add_common(norm, cfg);
  add_common(ovl, cfg, true);
  add_common(st, cfg);
  add_common(orc, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("validation", e.what());
    return kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(cfg);
    if (*norm) return cmd_norm(cfg);
    if (*ovl) return cmd_overlap(cfg);
    if (*st) return cmd_state(cfg);
    return cmd_oracle_check(cfg);
  } catch (const ValidationError& e) {
    diagnose("validation", e.what(), e.field());
    return kExitValidation;
  } catch (const NumericError& e) {
    diagnose("numeric", e.what());
    return kExitNumeric;
  } catch (const IoError& e) {
    diagnose("io", e.what());
    return kExitIo;
  }
}
