// SPDX-License-Identifier: Apache-2.0
#include "cvgauss/circuit.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cvgauss {

using json = nlohmann::json;
using cd = std::complex<double>;

void validate_circuit(const CircuitSpec& c) {
  if (c.modes < 1) throw ValidationError("mode count must be positive", "/modes");
  for (std::size_t t = 0; t < c.gates.size(); ++t) {
    try {
      validate_gate(c.gates[t], c.modes);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "/gates/" + std::to_string(t) + "/" + e.field());
    }
  }
  if (c.measurement) {
    try {
      validate_outcome(*c.measurement, c.modes);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "/measure/" + e.field());
    }
  }
}

Superposition evolve(const Superposition& psi, const std::vector<GateSpec>& gates) {
  Superposition out = psi;
  for (const auto& g : gates) validate_gate(g, psi.modes());
  for (auto& t : out.terms)
    for (const auto& g : gates) t.state = apply_unitary(t.state, g);
  return out;
}

namespace {

const Outcome& require_measurement(const CircuitSpec& c) {
  if (!c.measurement) throw ValidationError("circuit has no measurement block", "/measure");
  return *c.measurement;
}

void require_compatible(const Superposition& psi, const CircuitSpec& c) {
  validate_circuit(c);
  if (psi.terms.empty()) throw ValidationError("superposition has no terms", "/state");
  if (psi.modes() != c.modes) throw ValidationError("state and circuit have different mode counts", "/modes");
}

}  // namespace

SimulationResult simulate_exact(const Superposition& psi, const CircuitSpec& circuit, double norm_tol) {
  require_compatible(psi, circuit);
  const Outcome& out = require_measurement(circuit);
  const double nrm = exact_norm(psi);
  if (std::abs(nrm - 1.0) > norm_tol)
    throw ValidationError("initial state is not normalised (norm " + std::to_string(nrm) + ")", "/state");
  const auto evolved = evolve(psi, circuit.gates);
  const auto post = post_measurement_superposition(evolved, out);
  SimulationResult res;
  res.method = Method::Exact;
  res.density = exact_norm_squared(post.state) / std::pow(std::numbers::pi, double(out.k()));
  res.dropped_branches = post.dropped;
  return res;
}

SimulationResult simulate_approx(const Superposition& psi, const CircuitSpec& circuit, const ApproxOptions& opt) {
  require_compatible(psi, circuit);
  const Outcome& out = require_measurement(circuit);
  if (!(opt.epsilon > 0)) throw ValidationError("epsilon must be positive", "epsilon");
  if (!(opt.p_fail > 0 && opt.p_fail < 1)) throw ValidationError("p_fail must lie in (0, 1)", "p_fail");

  double post_energy = 0;
  if (opt.energy_override) {
    post_energy = *opt.energy_override;
  } else {
    double e0 = 0;
    if (opt.mean_photons) {
      if (!(*opt.mean_photons >= 0)) throw ValidationError("mean photon bound must be non-negative", "mean_photons");
      e0 = 2.0 * (*opt.mean_photons + psi.modes());
    } else {
      e0 = superposition_energy_exact(psi);
    }
    const double e = circuit_energy_bound(e0, circuit.gates, opt.rule);
    post_energy = typical_parameters(e, opt.delta.value_or(opt.p_fail)).post_energy;
  }

  const auto evolved = evolve(psi, circuit.gates);
  MeasuredSuperposition<double> post;
  try {
    post = post_measurement_superposition(evolved, out);
  } catch (const NumericError&) {
    throw NumericError("non-typical outcome: every branch has density below the floor");
  }
  FastNormOptions fo;
  fo.epsilon = opt.epsilon;
  fo.p_fail = opt.p_fail;
  fo.energy = post_energy;
  fo.seed = opt.seed;
  fo.workers = opt.workers;
  fo.rule = opt.sample_rule;
  const auto est = fast_norm(post.state, fo);

  SimulationResult res;
  res.method = Method::Approx;
  res.density = est.value / std::pow(std::numbers::pi, double(out.k()));
  res.estimate = est;
  res.dropped_branches = post.dropped;
  return res;
}

// ---------------------------------------------------------------------------
// JSON reading

namespace {

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

[[noreturn]] void fail(const std::string& msg, const std::string& path) { throw ValidationError(msg, path); }

const json& member(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing field \"" + key + "\"", join(path, key));
  return *it;
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  if (!obj.is_object()) fail("expected an object", path);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail("unknown field \"" + it.key() + "\"", join(path, it.key()));
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail("expected a number", path);
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("non-finite number", path);
  return x;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail("expected an integer", path);
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail("integer out of range", path);
  return static_cast<int>(x);
}

cd complex_number(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail("expected a complex number [re, im]", path);
  return {number(v[0], path + "/0"), number(v[1], path + "/1")};
}

Eigen::VectorXcd complex_vector(const json& v, const std::string& path) {
  if (!v.is_array()) fail("expected an array of complex numbers", path);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) out(static_cast<Eigen::Index>(j)) = complex_number(v[j], path + "/" + std::to_string(j));
  return out;
}

Eigen::MatrixXd real_matrix(const json& v, Eigen::Index dim, const std::string& path) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(dim))
    fail("expected " + std::to_string(dim) + " rows", path);
  Eigen::MatrixXd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rp = path + "/" + std::to_string(i);
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      fail("expected " + std::to_string(dim) + " entries", rp);
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = number(row[static_cast<std::size_t>(j)], rp + "/" + std::to_string(j));
  }
  return m;
}

GateSpec parse_gate(const json& g, int modes, const std::string& path) {
  if (!g.is_object()) fail("expected a gate object", path);
  const json& op = member(g, "op", path);
  if (!op.is_string()) fail("expected a string", join(path, "op"));
  const std::string name = op.get<std::string>();
  GateSpec gate;
  if (name == "displacement") {
    allow_keys(g, {"op", "alpha"}, path);
    const auto a = complex_vector(member(g, "alpha", path), join(path, "alpha"));
    if (a.size() != modes) fail("displacement needs " + std::to_string(modes) + " amplitudes", join(path, "alpha"));
    gate = Displacement<double>{a};
  } else if (name == "phaseshift") {
    allow_keys(g, {"op", "mode", "phi"}, path);
    gate = PhaseShift<double>{number(member(g, "phi", path), join(path, "phi")),
                              integer(member(g, "mode", path), join(path, "mode"))};
  } else if (name == "beamsplitter") {
    allow_keys(g, {"op", "modes", "omega"}, path);
    const json& m = member(g, "modes", path);
    if (!m.is_array() || m.size() != 2) fail("beamsplitter needs two modes", join(path, "modes"));
    gate = Beamsplitter<double>{number(member(g, "omega", path), join(path, "omega")),
                                integer(m[0], join(path, "modes/0")), integer(m[1], join(path, "modes/1"))};
  } else if (name == "squeeze") {
    allow_keys(g, {"op", "mode", "z"}, path);
    gate = Squeeze<double>{number(member(g, "z", path), join(path, "z")),
                           integer(member(g, "mode", path), join(path, "mode"))};
  } else {
    fail("unknown op \"" + name + "\"", join(path, "op"));
  }
  try {
    validate_gate(gate, modes);
  } catch (const ValidationError& e) {
    fail(e.what(), join(path, e.field()));
  }
  return gate;
}

StateSpec parse_state(const json& s, int modes, double tol, const std::string& path) {
  if (!s.is_object()) fail("expected a state object", path);
  const json& type = member(s, "type", path);
  if (!type.is_string()) fail("expected a string", join(path, "type"));
  const std::string name = type.get<std::string>();
  if (name == "vacuum") {
    allow_keys(s, {"type"}, path);
    return VacuumState{};
  }
  if (name == "terms") {
    allow_keys(s, {"type", "terms"}, path);
    const json& arr = member(s, "terms", path);
    const std::string tp = join(path, "terms");
    if (!arr.is_array() || arr.empty()) fail("expected a non-empty array of terms", tp);
    TermsState ts;
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string p = tp + "/" + std::to_string(j);
      const json& t = arr[j];
      allow_keys(t, {"c", "cov", "alpha", "r"}, p);
      Description d;
      d.alpha = complex_vector(member(t, "alpha", p), join(p, "alpha"));
      if (d.alpha.size() != modes) fail("alpha needs " + std::to_string(modes) + " entries", join(p, "alpha"));
      d.cov = real_matrix(member(t, "cov", p), 2 * modes, join(p, "cov"));
      d.r = complex_number(member(t, "r", p), join(p, "r"));
      const auto rep = validate_description(d, tol);
      if (!rep.valid) fail("covariance matrix violates Gamma + i Omega >= 0", join(p, "cov"));
      if (!rep.pure) fail("covariance matrix is not pure", join(p, "cov"));
      if (!rep.r_consistent) fail("|r|^2 inconsistent with the covariance matrix", join(p, "r"));
      ts.terms.terms.push_back({complex_number(member(t, "c", p), join(p, "c")), std::move(d)});
    }
    return ts;
  }
  if (name == "cat") {
    allow_keys(s, {"type", "alpha", "parity"}, path);
    CatState c;
    c.alpha = complex_number(member(s, "alpha", path), join(path, "alpha"));
    const json& par = member(s, "parity", path);
    if (!par.is_string() || (par != "even" && par != "odd")) fail("parity must be \"even\" or \"odd\"", join(path, "parity"));
    c.parity = par == "even" ? Parity::Even : Parity::Odd;
    if (c.parity == Parity::Odd && c.alpha == cd(0)) fail("odd cat state at alpha = 0 is the zero vector", join(path, "alpha"));
    return c;
  }
  if (name == "gkp") {
    allow_keys(s, {"type", "z", "m", "step", "envelope"}, path);
    GkpState g;
    g.z = number(member(s, "z", path), join(path, "z"));
    g.half_width = integer(member(s, "m", path), join(path, "m"));
    g.step = number(member(s, "step", path), join(path, "step"));
    g.envelope = number(member(s, "envelope", path), join(path, "envelope"));
    if (!(g.z > 0)) fail("comb squeezing must be positive", join(path, "z"));
    if (g.half_width < 0) fail("half width must be non-negative", join(path, "m"));
    if (!(g.envelope > 0)) fail("envelope width must be positive", join(path, "envelope"));
    return g;
  }
  if (name == "appendixD") {
    allow_keys(s, {"type", "p", "r", "z"}, path);
    if (modes < 2) fail("this state needs at least two modes", "/modes");
    AppendixDState a;
    a.p = number(member(s, "p", path), join(path, "p"));
    a.r = number(member(s, "r", path), join(path, "r"));
    a.z = number(member(s, "z", path), join(path, "z"));
    if (!(a.p >= 0 && a.p <= 1)) fail("p must lie in [0, 1]", join(path, "p"));
    return a;
  }
  fail("unknown state type \"" + name + "\"", join(path, "type"));
}

/// Rejects repeated keys inside any object while parsing.
json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> seen;
  std::vector<std::string> path;
  auto cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        seen.emplace_back();
        break;
      case json::parse_event_t::object_end:
        seen.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        if (!seen.back().insert(k).second) fail("duplicate field \"" + k + "\"", "/" + k);
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col),
                          "line " + std::to_string(line));
  }
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

json complex_vector_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (Eigen::Index j = 0; j < v.size(); ++j) a.push_back(complex_json(v(j)));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json gate_json(const GateSpec& g) {
  return std::visit(
      [](const auto& gate) -> json {
        using G = std::decay_t<decltype(gate)>;
        if constexpr (std::is_same_v<G, Displacement<double>>)
          return {{"op", "displacement"}, {"alpha", complex_vector_json(gate.alpha)}};
        else if constexpr (std::is_same_v<G, PhaseShift<double>>)
          return {{"op", "phaseshift"}, {"mode", gate.mode}, {"phi", gate.phi}};
        else if constexpr (std::is_same_v<G, Beamsplitter<double>>)
          return {{"op", "beamsplitter"}, {"modes", json::array({gate.mode_j, gate.mode_k})}, {"omega", gate.omega}};
        else
          return {{"op", "squeeze"}, {"mode", gate.mode}, {"z", gate.z}};
      },
      g);
}

json state_json(const StateSpec& s) {
  return std::visit(
      [](const auto& st) -> json {
        using S = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<S, VacuumState>) {
          return {{"type", "vacuum"}};
        } else if constexpr (std::is_same_v<S, TermsState>) {
          json terms = json::array();
          for (const auto& t : st.terms.terms)
            terms.push_back({{"c", complex_json(t.coeff)},
                             {"cov", matrix_json(t.state.cov)},
                             {"alpha", complex_vector_json(t.state.alpha)},
                             {"r", complex_json(t.state.r)}});
          return {{"type", "terms"}, {"terms", terms}};
        } else if constexpr (std::is_same_v<S, CatState>) {
          return {{"type", "cat"}, {"alpha", complex_json(st.alpha)}, {"parity", st.parity == Parity::Even ? "even" : "odd"}};
        } else if constexpr (std::is_same_v<S, GkpState>) {
          return {{"type", "gkp"}, {"z", st.z}, {"m", st.half_width}, {"step", st.step}, {"envelope", st.envelope}};
        } else {
          return {{"type", "appendixD"}, {"p", st.p}, {"r", st.r}, {"z", st.z}};
        }
      },
      s);
}

}  // namespace

CircuitDocument parse_circuit_document(const std::string& text, double tol) {
  const json doc = parse_strict(text);
  allow_keys(doc, {"modes", "state", "gates", "measure"}, "");
  CircuitDocument out;
  out.modes = integer(member(doc, "modes", ""), "/modes");
  if (out.modes < 1) fail("mode count must be positive", "/modes");
  out.circuit.modes = out.modes;
  out.state = doc.contains("state") ? parse_state(doc["state"], out.modes, tol, "/state") : StateSpec{VacuumState{}};
  if (doc.contains("gates")) {
    const json& gates = doc["gates"];
    if (!gates.is_array()) fail("expected an array of gates", "/gates");
    for (std::size_t t = 0; t < gates.size(); ++t)
      out.circuit.gates.push_back(parse_gate(gates[t], out.modes, "/gates/" + std::to_string(t)));
  }
  if (doc.contains("measure")) {
    const json& m = doc["measure"];
    allow_keys(m, {"k", "beta"}, "/measure");
    const int k = integer(member(m, "k", "/measure"), "/measure/k");
    if (k < 1 || k > out.modes) fail("measured mode count " + std::to_string(k) + " outside [1, " + std::to_string(out.modes) + "]", "/measure/k");
    Outcome o{complex_vector(member(m, "beta", "/measure"), "/measure/beta")};
    if (o.k() != k) fail("beta needs " + std::to_string(k) + " entries", "/measure/beta");
    out.circuit.measurement = std::move(o);
  }
  return out;
}

std::string emit_circuit_document(const CircuitDocument& d) {
  json doc;
  doc["modes"] = d.modes;
  doc["state"] = state_json(d.state);
  json gates = json::array();
  for (const auto& g : d.circuit.gates) gates.push_back(gate_json(g));
  doc["gates"] = gates;
  if (d.circuit.measurement)
    doc["measure"] = {{"k", d.circuit.measurement->k()}, {"beta", complex_vector_json(d.circuit.measurement->beta)}};
  return doc.dump(2) + "\n";
}

Superposition build_state(const CircuitDocument& doc) {
  const Index n = doc.modes;
  return std::visit(
      [n](const auto& st) -> Superposition {
        using S = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<S, VacuumState>) {
          return Superposition{{{cd(1), vacuum_description<double>(n)}}};
        } else if constexpr (std::is_same_v<S, TermsState>) {
          return st.terms;
        } else if constexpr (std::is_same_v<S, CatState>) {
          return tensor_vacuum(cat_state<double>(st.alpha, st.parity), n - 1);
        } else if constexpr (std::is_same_v<S, GkpState>) {
          return tensor_vacuum(gkp_comb<double>(st.z, st.half_width, st.step, st.envelope), n - 1);
        } else {
          return tensor_vacuum(appendix_d_state<double>(st.p, st.r, st.z), n - 2);
        }
      },
      doc.state);
}

std::pair<Superposition, CircuitSpec> parse_circuit(const std::string& text, double tol) {
  const auto doc = parse_circuit_document(text, tol);
  return {build_state(doc), doc.circuit};
}

CircuitDocument terms_document(const Superposition& psi, const CircuitSpec& circuit) {
  CircuitDocument d;
  d.modes = static_cast<int>(psi.modes());
  d.state = TermsState{psi};
  d.circuit = circuit;
  d.circuit.modes = d.modes;
  return d;
}

std::string emit_result(const SimulationResult& r) {
  json doc;
  doc["p"] = r.density;
  doc["method"] = r.method == Method::Exact ? "exact" : "approx";
  if (r.estimate) {
    doc["epsilon"] = r.estimate->epsilon;
    doc["p_fail"] = r.estimate->p_fail;
    doc["energy_bound"] = r.estimate->energy;
    doc["R"] = r.estimate->radius;
    doc["L"] = r.estimate->samples;
    doc["seed"] = r.estimate->seed;
  }
  return doc.dump() + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

}  // namespace cvgauss
