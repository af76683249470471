// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstring>

#include "cvgauss/circuit.hpp"
#include "support.hpp"

using namespace testing;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_circuit_document(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

CircuitSpec circuit(int modes, std::vector<GateSpec> gates, Eigen::VectorXcd beta) {
  return {modes, std::move(gates), Outcome{std::move(beta)}};
}

/// Exchanges modes 1 and 2 of a two-mode description.
Description swap_modes(const Description& d) {
  Eigen::PermutationMatrix<Eigen::Dynamic> p(4);
  p.indices() << 2, 3, 0, 1;
  Description out = d;
  out.cov = p * d.cov * p.transpose();
  out.alpha = cvec({d.alpha(1), d.alpha(0)});
  return out;
}

GateSpec swap_modes(const GateSpec& g) {
  auto flip = [](int m) { return 3 - m; };
  return std::visit(
      [&](const auto& x) -> GateSpec {
        using G = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<G, Displacement<double>>)
          return Displacement<double>{cvec({x.alpha(1), x.alpha(0)})};
        else if constexpr (std::is_same_v<G, PhaseShift<double>>)
          return PhaseShift<double>{x.phi, flip(x.mode)};
        else if constexpr (std::is_same_v<G, Beamsplitter<double>>)
          return Beamsplitter<double>{x.omega, flip(x.mode_j), flip(x.mode_k)};
        else
          return Squeeze<double>{x.z, flip(x.mode)};
      },
      g);
}

}  // namespace

TEST_CASE("circuit: documents") {
  const std::string text = R"({
    "modes": 2,
    "state": {"type": "cat", "alpha": [1.0, 0.5], "parity": "odd"},
    "gates": [
      {"op": "squeeze", "mode": 1, "z": 0.4},
      {"op": "beamsplitter", "modes": [1, 2], "omega": 0.7},
      {"op": "phaseshift", "mode": 2, "phi": -0.3},
      {"op": "displacement", "alpha": [[0.1, 0.2], [-0.3, 0.0]]}
    ],
    "measure": {"k": 1, "beta": [[0.2, -0.1]]}
  })";
  const auto doc = parse_circuit_document(text);
  CHECK(doc.modes == 2);
  CHECK(doc.circuit.gates.size() == 4);
  REQUIRE(doc.circuit.measurement);
  CHECK(doc.circuit.measurement->k() == 1);
  const std::string emitted = emit_circuit_document(doc);
  CHECK(emit_circuit_document(parse_circuit_document(emitted)) == emitted);

  // explicit terms survive a round trip bit for bit
  std::mt19937_64 rng(60);
  Superposition psi;
  for (int j = 0; j < 2; ++j) psi.terms.push_back({random_cvec(rng, 1, 1.0)(0), random_description(rng, 2, 1.0, 1.0)});
  const auto terms = terms_document(psi, circuit(2, {Squeeze<double>{0.3, 2}}, cvec({0.1, 0.2})));
  const auto back = build_state(parse_circuit_document(emit_circuit_document(terms)));
  REQUIRE(back.size() == 2);
  for (int j = 0; j < 2; ++j) {
    CHECK(back.terms[j].coeff == psi.terms[j].coeff);
    CHECK(back.terms[j].state.cov == psi.terms[j].state.cov);
    CHECK(back.terms[j].state.alpha == psi.terms[j].state.alpha);
    CHECK(back.terms[j].state.r == psi.terms[j].state.r);
  }

  CHECK(field_of(R"({"modes": 1, "gates": [{"op": "squeeze", "mode": 0, "z": 0.5}]})") == "/gates/0/mode");
  CHECK(field_of(R"({"modes": 1, "gates": [{"op": "squeeze", "mode": 2, "z": 0.5}]})") == "/gates/0/mode");
  CHECK(field_of(R"({"modes": 1, "gates": [{"op": "squeeze", "mode": 1, "z": 0.0}]})") == "/gates/0/z");
  CHECK(field_of(R"({"modes": 1, "measure": {"k": 2, "beta": [[0, 0], [0, 0]]}})") == "/measure/k");
  CHECK(field_of(R"({"modes": 1, "modes": 1})") == "/modes");
  CHECK(field_of(R"({"modes": 1, "extra": 0})") == "/extra");
  CHECK(field_of(R"({"modes": 0})") == "/modes");
  CHECK(field_of(R"({"modes": 1, "gates": [{"op": "twist", "mode": 1}]})") == "/gates/0/op");
  CHECK(field_of(R"({"modes": 2, "gates": [{"op": "beamsplitter", "modes": [1, 1], "omega": 1}]})").starts_with("/gates/0"));
  CHECK(field_of("{\"modes\": 1,\n  \"gates\": [}") == "line 2");
  CHECK(field_of(R"({"modes": 1, "state": {"type": "cat", "alpha": [0, 0], "parity": "odd"}})") == "/state/alpha");

  // a term whose |r| disagrees with its covariance matrix
  const std::string bad_r = R"({"modes": 1, "state": {"type": "terms", "terms": [
    {"c": [1, 0], "cov": [[1, 0], [0, 1]], "alpha": [[0, 0]], "r": [0.5, 0]}]}})";
  CHECK(field_of(bad_r) == "/state/terms/0/r");
  const std::string bad_cov = R"({"modes": 1, "state": {"type": "terms", "terms": [
    {"c": [1, 0], "cov": [[0.5, 0], [0, 0.5]], "alpha": [[0, 0]], "r": [1, 0]}]}})";
  CHECK(field_of(bad_cov) == "/state/terms/0/cov");
}

TEST_CASE("circuit: exact simulation") {
  const auto vac = build_state(parse_circuit_document(R"({"modes": 1})"));
  CHECK(std::abs(simulate_exact(vac, circuit(1, {}, cvec({0.0}))).density - 1 / std::numbers::pi) < 1e-12);

  // displacing and measuring at the label gives the vacuum peak
  const cd b0(0.7, -0.4);
  const auto shifted = simulate_exact(vac, circuit(1, {Displacement<double>{cvec({b0})}}, cvec({-b0})));
  CHECK(std::abs(shifted.density - 1 / std::numbers::pi) < 1e-12);

  // cat state through a beamsplitter, against the number basis
  const auto cat = tensor_vacuum(cat_state<double>(cd(1.0, 0.3), Parity::Even), 1);
  const std::vector<GateSpec> gates{Squeeze<double>{0.3, 1}, Beamsplitter<double>{0.6, 1, 2}};
  const auto v = fock_run_circuit(cat, gates);
  for (const auto& beta : {cvec({0.3}), cvec({cd(-0.5, 0.8)}), cvec({0.2, cd(0.1, -0.6)})}) {
    const double p = simulate_exact(cat, circuit(2, gates, beta)).density;
    CHECK(std::abs(p - fock_heterodyne_density(v, beta)) < 1e-6);
  }

  CHECK_THROWS_AS(simulate_exact(cat, {2, gates, std::nullopt}), ValidationError);
  Superposition twice = cat;
  for (auto& t : twice.terms) t.coeff *= 2.0;
  CHECK_THROWS_AS(simulate_exact(twice, circuit(2, gates, cvec({0.0}))), ValidationError);
  CHECK_THROWS_AS(simulate_exact(vac, circuit(2, {}, cvec({0.0}))), ValidationError);
}

TEST_CASE("circuit: gate order and mode relabelling") {
  const auto vac = build_state(parse_circuit_document(R"({"modes": 1})"));
  const GateSpec d = Displacement<double>{cvec({0.8})};
  const GateSpec s = Squeeze<double>{0.6, 1};
  const auto beta = cvec({-0.5});
  const double ds = simulate_exact(vac, circuit(1, {d, s}, beta)).density;
  const double sd = simulate_exact(vac, circuit(1, {s, d}, beta)).density;
  CHECK(std::abs(ds - sd) > 1e-3);
  auto v = fock_vacuum(1, 80);
  apply_fock_gate(v, d);
  apply_fock_gate(v, s);
  CHECK(std::abs(ds - fock_heterodyne_density(v, beta)) < 1e-8);

  std::mt19937_64 rng(61);
  for (int t = 0; t < 6; ++t) {
    Superposition psi, swapped;
    for (int j = 0; j < 2; ++j) {
      const auto desc = random_description(rng, 2, 0.8, 1.0);
      const cd c = random_cvec(rng, 1, 1.0)(0);
      psi.terms.push_back({c, desc});
      swapped.terms.push_back({c, swap_modes(desc)});
    }
    psi = normalized(psi);
    swapped = normalized(swapped);
    std::vector<GateSpec> gates, gates_swapped;
    for (int g = 0; g < 3; ++g) {
      gates.push_back(random_gate(rng, 2, 0.6, 0.8));
      gates_swapped.push_back(swap_modes(gates.back()));
    }
    const auto b = random_cvec(rng, 2, 1.0);
    const double p = simulate_exact(psi, circuit(2, gates, b)).density;
    const double q = simulate_exact(swapped, circuit(2, gates_swapped, cvec({b(1), b(0)}))).density;
    CHECK(std::abs(p - q) < 1e-12 * std::max(1.0, p));
  }
}

TEST_CASE("circuit: approximate simulation") {
  const auto cat = tensor_vacuum(cat_state<double>(1.0, Parity::Even), 1);
  const auto c = circuit(2, {Beamsplitter<double>{0.5, 1, 2}}, cvec({0.2}));
  ApproxOptions o;
  o.epsilon = 0.5;
  o.p_fail = 0.25;
  o.seed = 7;
  o.workers = 1;
  const auto one = simulate_approx(cat, c, o);
  CHECK(one.method == Method::Approx);
  REQUIRE(one.estimate);
  CHECK(one.estimate->seed == 7u);
  for (unsigned w : {2u, 5u}) {
    o.workers = w;
    const auto many = simulate_approx(cat, c, o);
    CHECK(std::memcmp(&one.density, &many.density, sizeof(double)) == 0);
    CHECK(emit_result(one) == emit_result(many));
  }

  // an explicit energy bound replaces the derived one
  o.workers = 1;
  o.energy_override = 9.0;
  CHECK(simulate_approx(cat, c, o).estimate->energy == 9.0);
  o.energy_override.reset();
  o.mean_photons = 1.0;
  const auto derived = simulate_approx(cat, c, o);
  CHECK(derived.estimate->energy == doctest::Approx(typical_parameters(circuit_energy_bound(2.0 * (1.0 + 2), c.gates), o.p_fail).post_energy));

  // estimates scatter around the exact value when given the post-measurement energy
  const double exact = simulate_exact(cat, c).density;
  const auto post = post_measurement_superposition(evolve(cat, c.gates), *c.measurement);
  o.mean_photons.reset();
  o.energy_override = superposition_energy_exact(normalized(post.state));
  o.epsilon = 0.3;
  o.sample_rule = SampleRule::Chebyshev;
  int bad = 0;
  for (int s = 0; s < 40; ++s) {
    o.seed = 300 + s;
    const double p = simulate_approx(cat, c, o).density;
    if (std::abs(p / exact - 1) > o.epsilon) ++bad;
  }
  CHECK(bad <= 10);

  o.epsilon = 0.0;
  CHECK_THROWS_AS(simulate_approx(cat, c, o), ValidationError);
}
